#pragma once

#include <cstddef>
#include <functional>

#include "dialogos/dialogue/state.hpp"
#include "dialogos/domain/item_database.hpp"
#include "dialogos/domain/ontology.hpp"

namespace dialogos {

// Number of items matching a constraint map.
using MatchCounter = std::function<std::size_t(const SlotMap&)>;

MatchCounter database_counter(const ItemDatabase& db);

struct DstOutcome {
    DialogueState state;
    std::size_t warnings = 0;  // acts ignored for naming unknown slots
};

// Folds the other party's acts into the state:
//   inform(s=v)  slots_filled[s] = v
//   request(s)   requested_slot = s (the last one wins; cleared every turn)
//   reqalts()    offered_item cleared
//   bye()        terminal
// then stores the match count of the new constraints, increments the turn
// and replaces last_user_acts. A terminal state stays terminal.
DstOutcome dst_update(const DialogueState& state, const ActList& acts, const Ontology& ontology,
                      const MatchCounter& count);

// Notes the tracker's own side's acts: last_system_acts, offer(x) ->
// offered_item = x, bye() -> terminal. The turn counter is untouched.
DialogueState dst_note_own_acts(const DialogueState& state, const ActList& acts);

}  // namespace dialogos
