#include "dialogos/dialogue/act.hpp"

#include <algorithm>
#include <cctype>

#include "dialogos/common/errors.hpp"
#include "dialogos/common/text.hpp"

namespace dialogos {

namespace {

constexpr std::string_view kReserved = "(),;=";

bool has_reserved(std::string_view s) { return s.find_first_of(kReserved) != std::string_view::npos; }

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool padded(std::string_view s) { return !s.empty() && (is_space(s.front()) || is_space(s.back())); }

bool has_space(std::string_view s) { return std::any_of(s.begin(), s.end(), is_space); }

}  // namespace

std::optional<std::string> DialogueAct::value_of(std::string_view slot) const {
    for (const auto& p : params)
        if (p.slot == slot) return p.value;
    return std::nullopt;
}

bool DialogueAct::has_slot(std::string_view slot) const {
    return std::any_of(params.begin(), params.end(), [&](const SlotParam& p) { return p.slot == slot; });
}

DialogueAct make_act(std::string intent) { return DialogueAct(std::move(intent)); }

DialogueAct inform(std::string slot, std::string value) {
    return DialogueAct("inform", {SlotParam{std::move(slot), std::move(value)}});
}

DialogueAct request(std::string slot) { return DialogueAct("request", {SlotParam{std::move(slot), std::nullopt}}); }

IntentRegistry::IntentRegistry()
    : intents_{"hello",   "inform", "request",    "offer",  "bye",     "thankyou",
               "reqalts", "canthelp", "affirm", "negate", "welcomemsg"} {}

const IntentRegistry& IntentRegistry::defaults() {
    static const IntentRegistry registry;
    return registry;
}

void IntentRegistry::add(std::string intent) { intents_.insert(text::to_lower(intent)); }

bool IntentRegistry::contains(std::string_view intent) const { return intents_.contains(text::to_lower(intent)); }

void validate_act(const DialogueAct& act, const IntentRegistry& registry) {
    if (act.intent.empty()) throw ValidationError("intent: must not be empty");
    if (has_reserved(act.intent) || has_space(act.intent))
        throw ValidationError("intent: '" + act.intent + "' contains a reserved character or whitespace");
    if (!registry.contains(act.intent)) throw ValidationError("intent: '" + act.intent + "' is not registered");

    const auto intent = text::to_lower(act.intent);
    for (std::size_t i = 0; i < act.params.size(); ++i) {
        const auto& p = act.params[i];
        const auto where = "params[" + std::to_string(i) + "]";
        if (p.slot.empty()) throw ValidationError(where + ".slot: must not be empty");
        if (has_reserved(p.slot) || has_space(p.slot))
            throw ValidationError(where + ".slot: '" + p.slot + "' contains a reserved character or whitespace");
        if (p.value) {
            if (p.value->empty()) throw ValidationError(where + ".value: must not be empty when present");
            if (has_reserved(*p.value) || padded(*p.value))
                throw ValidationError(where + ".value: '" + *p.value + "' contains a reserved character or padding");
        }
        if (intent == "request" && p.value) throw ValidationError(where + ".value: request parameters carry no value");
        if (intent == "inform" && !p.value) throw ValidationError(where + ".value: inform parameters need a value");
    }
}

DialogueAct canonicalize_act(const DialogueAct& act) {
    if (act.intent.empty()) throw ValidationError("intent: must not be empty");
    for (std::size_t i = 0; i < act.params.size(); ++i)
        if (act.params[i].slot.empty())
            throw ValidationError("params[" + std::to_string(i) + "].slot: must not be empty");

    DialogueAct out(text::to_lower(act.intent), act.params);
    std::stable_sort(out.params.begin(), out.params.end(),
                     [](const SlotParam& a, const SlotParam& b) { return a.slot < b.slot; });
    return out;
}

ActList canonicalize_acts(const ActList& acts) {
    ActList out;
    out.reserve(acts.size());
    for (const auto& a : acts) out.push_back(canonicalize_act(a));
    return out;
}

std::string serialize_act(const DialogueAct& act) {
    std::string out = act.intent;
    out.push_back('(');
    for (std::size_t i = 0; i < act.params.size(); ++i) {
        if (i > 0) out += ", ";
        out += act.params[i].slot;
        if (act.params[i].value) {
            out.push_back('=');
            out += *act.params[i].value;
        }
    }
    out.push_back(')');
    return out;
}

std::string serialize_acts(const ActList& acts) {
    std::string out;
    for (std::size_t i = 0; i < acts.size(); ++i) {
        if (i > 0) out += "; ";
        out += serialize_act(acts[i]);
    }
    return out;
}

namespace {

class ActParser {
public:
    explicit ActParser(std::string_view text) : text_(text) {}

    ActList parse() {
        ActList acts;
        skip_ws();
        if (at_end()) return acts;
        acts.push_back(parse_act());
        skip_ws();
        while (!at_end()) {
            if (peek() != ';') throw ParseError(pos_, std::string("expected ';' but found '") + peek() + "'");
            ++pos_;
            skip_ws();
            if (at_end()) throw ParseError(pos_, "dangling ';' separator");
            acts.push_back(parse_act());
            skip_ws();
        }
        return acts;
    }

private:
    DialogueAct parse_act() {
        const auto [intent, intent_at] = read_token();
        if (intent.empty()) throw ParseError(intent_at, "empty intent");
        if (has_space(intent)) throw ParseError(intent_at, "intent contains whitespace");
        if (at_end()) throw ParseError(pos_, "expected '('");
        if (peek() != '(') throw ParseError(pos_, std::string("expected '(' but found '") + peek() + "'");
        ++pos_;

        DialogueAct act{std::string(intent)};
        skip_ws();
        if (!at_end() && peek() == ')') {
            ++pos_;
            return act;
        }
        while (true) {
            const auto [slot, slot_at] = read_token();
            if (slot.empty()) throw ParseError(slot_at, "empty slot");
            if (has_space(slot)) throw ParseError(slot_at, "slot contains whitespace");
            SlotParam param{std::string(slot), std::nullopt};
            if (at_end()) throw ParseError(pos_, "unbalanced parentheses: expected ')'");
            if (peek() == '=') {
                ++pos_;
                const auto [value, value_at] = read_token();
                if (value.empty()) throw ParseError(value_at, "empty value");
                param.value = std::string(value);
            }
            act.params.push_back(std::move(param));
            if (at_end()) throw ParseError(pos_, "unbalanced parentheses: expected ')'");
            const char c = peek();
            ++pos_;
            if (c == ')') return act;
            if (c != ',') throw ParseError(pos_ - 1, std::string("unexpected '") + c + "' in parameter list");
        }
    }

    // Reads up to the next reserved character; returns the trimmed token
    // and the offset at which it starts (or where it was expected).
    std::pair<std::string_view, std::size_t> read_token() {
        skip_ws();
        const auto start = pos_;
        while (!at_end() && kReserved.find(peek()) == std::string_view::npos) ++pos_;
        auto token = text::trim(text_.substr(start, pos_ - start));
        return {token, start};
    }

    void skip_ws() {
        while (!at_end() && is_space(peek())) ++pos_;
    }
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

ActList deserialize_acts(std::string_view text) { return ActParser(text).parse(); }

}  // namespace dialogos
