#include "dialogos/slotfill/dst.hpp"

#include "dialogos/common/text.hpp"

namespace dialogos {

MatchCounter database_counter(const ItemDatabase& db) {
    return [&db](const SlotMap& constraints) { return count_matches(db, constraints); };
}

DstOutcome dst_update(const DialogueState& state, const ActList& acts, const Ontology& ontology,
                      const MatchCounter& count) {
    DstOutcome out{state, 0};
    auto& s = out.state;
    s.requested_slot.reset();
    for (const auto& act : acts) {
        const auto intent = text::to_lower(act.intent);
        if (intent == "inform") {
            for (const auto& p : act.params) {
                if (!ontology.is_informable(p.slot) || !p.value) {
                    ++out.warnings;
                    continue;
                }
                s.slots_filled[p.slot] = *p.value;
            }
        } else if (intent == "request") {
            for (const auto& p : act.params) {
                if (!ontology.is_requestable(p.slot)) {
                    ++out.warnings;
                    continue;
                }
                s.requested_slot = p.slot;
            }
        } else if (intent == "reqalts") {
            s.offered_item.reset();
        } else if (intent == "bye") {
            s.is_terminal = true;
        }
    }
    s.is_terminal = s.is_terminal || state.is_terminal;
    s.db_match_count = count ? count(s.slots_filled) : 0;
    s.last_user_acts = acts;
    ++s.turn;
    return out;
}

DialogueState dst_note_own_acts(const DialogueState& state, const ActList& acts) {
    DialogueState s = state;
    s.last_system_acts = acts;
    for (const auto& act : acts) {
        const auto intent = text::to_lower(act.intent);
        if (intent == "offer" && !act.params.empty() && act.params.front().value)
            s.offered_item = *act.params.front().value;
        else if (intent == "bye")
            s.is_terminal = true;
    }
    return s;
}

}  // namespace dialogos
