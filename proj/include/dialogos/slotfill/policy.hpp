#pragma once

#include <optional>
#include <string>

#include "dialogos/dialogue/act.hpp"
#include "dialogos/dialogue/state.hpp"
#include "dialogos/domain/item_database.hpp"
#include "dialogos/domain/ontology.hpp"
#include "dialogos/learning/tabular_view.hpp"

namespace dialogos {

// First matching rule wins:
//   1. terminal state                          -> bye()
//   2. user said hello, turn <= 1              -> welcomemsg()
//   3. a system-requestable slot is unfilled   -> request(first such slot)
//   4. no item matches the constraints         -> canthelp(constraints)
//   5. a slot is requested and an item offered -> inform(slot = item value)
//   6. otherwise                               -> offer(name = item)
// Rule 6 re-offers the current item while it still matches. After reqalts
// cleared it, the item following `previous_offer` in id order is offered,
// wrapping around; otherwise the first match.
ActList policy_respond(const DialogueState& state, const Ontology& ontology, const ItemDatabase& db,
                       const std::optional<std::string>& previous_offer = std::nullopt);

// Concrete acts for an abstract system action in a state. Realizations:
// request(s), offer(<rule 6 item>), inform(requested slot of the offered
// item), canthelp(constraints), bye(), welcomemsg(). Degenerate cases (an
// offer with no match, inform without an offer) fall back to canthelp.
ActList realize_system_action(const SystemAction& action, const DialogueState& state, const Ontology& ontology,
                              const ItemDatabase& db, const std::optional<std::string>& previous_offer = std::nullopt);

}  // namespace dialogos
