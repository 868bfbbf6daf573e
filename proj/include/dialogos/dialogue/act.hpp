#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dialogos {

inline constexpr std::string_view kDontCare = "dontcare";

struct SlotParam {
    std::string slot;
    std::optional<std::string> value;

    friend bool operator==(const SlotParam&, const SlotParam&) = default;
};

// One communicative move: intent plus ordered slot/value parameters.
// Plain value type; validity is checked by validate_act().
struct DialogueAct {
    std::string intent;
    std::vector<SlotParam> params;

    DialogueAct() = default;
    explicit DialogueAct(std::string intent_, std::vector<SlotParam> params_ = {})
        : intent(std::move(intent_)), params(std::move(params_)) {}

    // Value of the first parameter named `slot`, if any.
    std::optional<std::string> value_of(std::string_view slot) const;
    bool has_slot(std::string_view slot) const;

    friend bool operator==(const DialogueAct&, const DialogueAct&) = default;
};

using ActList = std::vector<DialogueAct>;

// Shorthands used throughout the rule-based components and tests.
DialogueAct make_act(std::string intent);
DialogueAct inform(std::string slot, std::string value);
DialogueAct request(std::string slot);

// Set of intents acts may carry. The default registry holds the eleven
// slot-filling intents; applications may register more.
class IntentRegistry {
public:
    IntentRegistry();

    static const IntentRegistry& defaults();

    void add(std::string intent);
    bool contains(std::string_view intent) const;
    const std::set<std::string, std::less<>>& intents() const noexcept { return intents_; }

private:
    std::set<std::string, std::less<>> intents_;
};

// Throws ValidationError naming the offending field.
void validate_act(const DialogueAct& act, const IntentRegistry& registry = IntentRegistry::defaults());

// Lowercased intent, params stably sorted by slot name. Idempotent.
DialogueAct canonicalize_act(const DialogueAct& act);
ActList canonicalize_acts(const ActList& acts);

// Canonical text form: `intent(slot=value, slot)`; acts joined by "; ".
std::string serialize_act(const DialogueAct& act);
std::string serialize_acts(const ActList& acts);

// Inverse of serialize_acts on its image. Whitespace around separators is
// ignored. Throws ParseError carrying the character offset of the problem.
ActList deserialize_acts(std::string_view text);

}  // namespace dialogos
