#include "dialogos/slotfill/policy.hpp"

#include <algorithm>

#include "dialogos/common/text.hpp"

namespace dialogos {

namespace {

ActList canthelp(const DialogueState& state) {
    DialogueAct act("canthelp");
    for (const auto& [slot, value] : state.slots_filled)
        if (text::to_lower(value) != kDontCare) act.params.push_back({slot, value});
    return {act};
}

std::optional<std::string> offer_label(const DialogueState& state, const ItemDatabase& db,
                                       const std::optional<std::string>& previous_offer) {
    const auto matches = query(db, state.slots_filled);
    if (matches.empty()) return std::nullopt;
    const auto& column = db.offer_column();
    const auto position = [&](const std::string& label) {
        return std::find_if(matches.begin(), matches.end(),
                            [&](const Item& item) { return text::iequals(item.get(column), label); });
    };
    if (state.offered_item) {
        if (const auto it = position(*state.offered_item); it != matches.end()) return it->get(column);
    } else if (previous_offer) {
        if (const auto it = position(*previous_offer); it != matches.end()) {
            const auto next = static_cast<std::size_t>(it - matches.begin() + 1) % matches.size();
            return matches[next].get(column);
        }
    }
    return matches.front().get(column);
}

std::optional<std::string> offered_value(const DialogueState& state, const ItemDatabase& db, const std::string& slot) {
    if (!state.offered_item || !db.has_column(slot)) return std::nullopt;
    const auto items = db.find_by_label(*state.offered_item);
    if (items.empty()) return std::nullopt;
    return items.front().get(slot);
}

}  // namespace

ActList policy_respond(const DialogueState& state, const Ontology& ontology, const ItemDatabase& db,
                       const std::optional<std::string>& previous_offer) {
    if (state.is_terminal) return {make_act("bye")};

    const bool said_hello = std::any_of(state.last_user_acts.begin(), state.last_user_acts.end(),
                                        [](const DialogueAct& a) { return text::to_lower(a.intent) == "hello"; });
    if (said_hello && state.turn <= 1) return {make_act("welcomemsg")};

    for (const auto& slot : ontology.system_requestable)
        if (!state.slots_filled.contains(slot)) return {request(slot)};

    if (query(db, state.slots_filled).empty()) return canthelp(state);

    if (state.requested_slot)
        if (const auto value = offered_value(state, db, *state.requested_slot))
            return {inform(*state.requested_slot, *value)};

    const auto label = offer_label(state, db, previous_offer);
    return {DialogueAct("offer", {{db.offer_column(), *label}})};
}

ActList realize_system_action(const SystemAction& action, const DialogueState& state, const Ontology& /*ontology*/,
                              const ItemDatabase& db, const std::optional<std::string>& previous_offer) {
    switch (action.kind) {
        case SystemActionKind::request: return {request(action.slot)};
        case SystemActionKind::offer: {
            if (const auto label = offer_label(state, db, previous_offer))
                return {DialogueAct("offer", {{db.offer_column(), *label}})};
            return canthelp(state);
        }
        case SystemActionKind::inform_requested: {
            if (state.requested_slot)
                if (const auto value = offered_value(state, db, *state.requested_slot))
                    return {inform(*state.requested_slot, *value)};
            return canthelp(state);
        }
        case SystemActionKind::canthelp: return canthelp(state);
        case SystemActionKind::bye: return {make_act("bye")};
        case SystemActionKind::welcomemsg: return {make_act("welcomemsg")};
    }
    return {make_act("bye")};
}

}  // namespace dialogos
