#include "dialogos/slotfill/nlu.hpp"

#include <algorithm>
#include <set>

#include "dialogos/common/text.hpp"

namespace dialogos {

namespace {

// Surface phrase -> candidate slots. A cue is active for the first
// candidate the ontology knows.
const std::vector<std::pair<std::string, std::vector<std::string>>> kSynonyms = {
    {"phone number", {"phone"}},      {"telephone number", {"phone"}}, {"phone", {"phone"}},
    {"telephone", {"phone"}},         {"price range", {"pricerange", "price"}},
    {"price", {"price", "pricerange"}}, {"cost", {"price", "pricerange"}},
    {"colour", {"color"}},            {"color", {"color"}},          {"kind", {"type"}},
    {"sort", {"type"}},               {"address", {"address"}},      {"located", {"address"}},
    {"name", {"name"}},               {"called", {"name"}},          {"cuisine", {"food"}},
    {"food", {"food"}},               {"area", {"area"}},            {"part of town", {"area"}},
    {"post code", {"postcode"}},      {"postcode", {"postcode"}},
};

const std::vector<std::vector<std::string>> kDontCarePhrases = {
    {"dont", "care"}, {"do", "not", "care"}, {"doesnt", "matter"}, {"does", "not", "matter"},
    {"dont", "mind"}, {"no", "preference"},
};

struct Span {
    std::size_t begin;
    std::size_t end;  // exclusive
};

bool matches_at(const std::vector<std::string>& tokens, std::size_t i, const std::vector<std::string>& phrase,
                const std::vector<bool>& consumed) {
    if (phrase.empty() || i + phrase.size() > tokens.size()) return false;
    for (std::size_t k = 0; k < phrase.size(); ++k)
        if (consumed[i + k] || tokens[i + k] != phrase[k]) return false;
    return true;
}

void consume(std::vector<bool>& consumed, Span s) {
    for (auto i = s.begin; i < s.end; ++i) consumed[i] = true;
}

std::size_t gap(Span a, Span b) {
    if (a.end <= b.begin) return b.begin - a.end;
    if (b.end <= a.begin) return a.begin - b.end;
    return 0;
}

}  // namespace

SlotFillingNlu::SlotFillingNlu(const Ontology& ontology, const ItemDatabase* database) : ontology_(ontology) {
    std::set<std::pair<std::vector<std::string>, std::string>> seen;
    const auto add = [&](const std::string& slot, const std::string& value, bool informable) {
        auto tokens = text::tokenize(value);
        if (tokens.empty() || !seen.insert({tokens, slot}).second) return;
        lexicon_.push_back({std::move(tokens), slot, value, informable});
    };
    for (const auto& [slot, values] : ontology.informable)
        for (const auto& v : values) add(slot, v, true);
    if (database) {
        offer_column_ = database->offer_column();
        for (const auto& slot : ontology.requestable) {
            if (ontology.is_informable(slot) || !database->has_column(slot)) continue;
            for (const auto row : database->id_order()) add(slot, database->rows()[row][*database->column_index(slot)], false);
        }
        if (!ontology.is_informable(offer_column_) && !ontology.is_requestable(offer_column_))
            for (const auto row : database->id_order())
                add(offer_column_, database->rows()[row][*database->column_index(offer_column_)], false);
    }
    // Longest first; stable keeps informable values ahead of database ones.
    std::stable_sort(lexicon_.begin(), lexicon_.end(),
                     [](const Entry& a, const Entry& b) { return a.tokens.size() > b.tokens.size(); });

    std::set<std::vector<std::string>> cue_seen;
    const auto add_cue = [&](const std::string& phrase, const std::string& slot) {
        auto tokens = text::tokenize(phrase);
        if (!cue_seen.insert(tokens).second) return;
        cues_.push_back({std::move(tokens), slot});
    };
    const auto known = [&](const std::string& s) { return ontology.is_informable(s) || ontology.is_requestable(s); };
    for (const auto& [phrase, candidates] : kSynonyms)
        for (const auto& slot : candidates)
            if (known(slot)) {
                add_cue(phrase, slot);
                break;
            }
    for (const auto& slot : ontology.requestable) add_cue(slot, slot);
    for (const auto& slot : ontology.informable_slots()) add_cue(slot, slot);
    std::stable_sort(cues_.begin(), cues_.end(),
                     [](const Cue& a, const Cue& b) { return a.tokens.size() > b.tokens.size(); });
}

ActList SlotFillingNlu::understand(std::string_view utterance, const std::optional<std::string>& context_slot) const {
    const auto tokens = text::tokenize(utterance);
    const auto n = tokens.size();
    std::vector<bool> consumed(n, false);
    std::vector<bool> in_value(n, false);

    // 1. Values, longest span first, each token used once.
    struct ValueHit {
        Span span;
        const Entry* entry;
    };
    std::vector<ValueHit> values;
    std::size_t max_len = 0;
    for (const auto& e : lexicon_) max_len = std::max(max_len, e.tokens.size());
    for (std::size_t len = max_len; len > 0; --len) {
        for (std::size_t i = 0; i + len <= n; ++i) {
            for (const auto& e : lexicon_) {
                if (e.tokens.size() != len || !matches_at(tokens, i, e.tokens, consumed)) continue;
                values.push_back({{i, i + len}, &e});
                consume(consumed, {i, i + len});
                for (auto k = i; k < i + len; ++k) in_value[k] = true;
                break;
            }
        }
    }
    std::sort(values.begin(), values.end(), [](const ValueHit& a, const ValueHit& b) { return a.span.begin < b.span.begin; });

    // 2. Multi-token keyword phrases.
    std::vector<Span> dontcare_phrases;
    bool reqalts = false;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& phrase : kDontCarePhrases) {
            if (matches_at(tokens, i, phrase, consumed)) {
                dontcare_phrases.push_back({i, i + phrase.size()});
                consume(consumed, dontcare_phrases.back());
                break;
            }
        }
        for (const auto& phrase : {std::vector<std::string>{"how", "about"},
                                  std::vector<std::string>{"anything", "else"},
                                  std::vector<std::string>{"something", "else"}}) {
            if (matches_at(tokens, i, phrase, consumed)) {
                reqalts = true;
                consume(consumed, {i, i + phrase.size()});
            }
        }
    }
    std::vector<bool> dontcare_used(dontcare_phrases.size(), false);

    // 3. Slot cues.
    std::vector<SlotParam> inform_params, request_params;
    bool any_dontcare = false;
    for (const auto& cue : cues_) {
        for (std::size_t i = 0; i + cue.tokens.size() <= n; ++i) {
            if (!matches_at(tokens, i, cue.tokens, consumed)) continue;
            const Span span{i, i + cue.tokens.size()};
            consume(consumed, span);
            const bool informable = ontology_.is_informable(cue.slot);

            bool dontcare = false;
            if (i > 0 && tokens[i - 1] == "any" && !consumed[i - 1]) {
                consumed[i - 1] = true;
                dontcare = true;
            }
            for (std::size_t d = 0; d < dontcare_phrases.size() && !dontcare; ++d) {
                if (gap(dontcare_phrases[d], span) <= 3) {
                    dontcare_used[d] = true;
                    dontcare = true;
                }
            }
            if (dontcare) {
                if (informable) {
                    inform_params.push_back({cue.slot, std::string(kDontCare)});
                    any_dontcare = true;
                }
                continue;
            }
            const bool value_before = i > 0 && in_value[i - 1];
            std::size_t after = span.end;
            if (after < n && tokens[after] == "is") ++after;
            const bool value_after = after < n && in_value[after];
            if (value_before || value_after) continue;
            if (ontology_.is_requestable(cue.slot)) request_params.push_back({cue.slot, std::nullopt});
        }
    }

    // 4. Bare don't-care answers go to the slot just asked about.
    const bool bare_any = std::count(tokens.begin(), tokens.end(), "any") > 0 && values.empty();
    const bool unused_phrase = std::find(dontcare_used.begin(), dontcare_used.end(), false) != dontcare_used.end();
    if (context_slot && ontology_.is_informable(*context_slot) && !any_dontcare && (unused_phrase || bare_any))
        inform_params.push_back({*context_slot, std::string(kDontCare)});

    // 5. Single-token keywords.
    std::set<std::string> intents;
    bool sorry = false, recommend = false;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& t = tokens[i];
        if (t == "bye" || t == "goodbye") intents.insert("bye");
        else if (t.rfind("thank", 0) == 0) intents.insert("thankyou");
        else if (t == "hi" || t == "hello" || t == "hey") intents.insert("hello");
        else if (t == "welcome") intents.insert("welcomemsg");
        else if (t == "yes" || t == "yeah") intents.insert("affirm");
        else if (t == "no" && i == 0 && !consumed[i]) intents.insert("negate");
        else if (t == "sorry") sorry = true;
        else if (t == "recommend" || t == "suggest") recommend = true;
    }
    if (reqalts) intents.insert("reqalts");

    // 6. Attribute the matched values.
    std::vector<SlotParam> offer_params, canthelp_params;
    for (const auto& v : values) {
        SlotParam p{v.entry->slot, v.entry->value};
        if (recommend && !offer_column_.empty() && v.entry->slot == offer_column_) offer_params.push_back(p);
        else if (sorry) canthelp_params.push_back(p);
        else inform_params.push_back(p);
    }

    std::map<std::string, std::vector<SlotParam>> grouped;
    for (const auto& i : intents) grouped[i];
    if (sorry) grouped["canthelp"] = canthelp_params;
    if (!offer_params.empty()) grouped["offer"] = offer_params;
    if (!inform_params.empty()) grouped["inform"] = inform_params;
    if (!request_params.empty()) grouped["request"] = request_params;

    ActList acts;
    for (auto& [intent, params] : grouped) {
        // Drop exact duplicates, keep first occurrence.
        std::vector<SlotParam> unique;
        for (auto& p : params)
            if (std::find(unique.begin(), unique.end(), p) == unique.end()) unique.push_back(p);
        acts.push_back(canonicalize_act(DialogueAct(intent, std::move(unique))));
    }
    return acts;
}

ActList nlu_understand(std::string_view utterance, const Ontology& ontology, const ItemDatabase* database) {
    return SlotFillingNlu(ontology, database).understand(utterance);
}

}  // namespace dialogos
