#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dialogos/common/rng.hpp"
#include "dialogos/dialogue/act.hpp"
#include "dialogos/dialogue/state.hpp"
#include "dialogos/domain/item_database.hpp"
#include "dialogos/domain/ontology.hpp"

namespace dialogos {

struct UserGoal {
    SlotMap constraints;
    std::vector<std::string> requests;  // ontology order
    SlotMap received;                   // answers observed so far
    std::vector<std::string> offers;    // item labels offered, in order

    friend bool operator==(const UserGoal&, const UserGoal&) = default;
};

// Stack of pending user acts; the back of stack() is the top.
class Agenda {
public:
    // No-op when `act` equals the current top.
    void push(DialogueAct act);
    DialogueAct pop();  // throws SimulationError when empty
    const DialogueAct& top() const;
    bool empty() const noexcept { return stack_.empty(); }
    std::size_t size() const noexcept { return stack_.size(); }

    // Removes every act for which `pred` holds.
    template <class Pred>
    void remove_if(Pred pred) {
        std::erase_if(stack_, pred);
    }
    void reset_to_bye();

    const std::vector<DialogueAct>& stack() const noexcept { return stack_; }
    ActList top_to_bottom() const { return {stack_.rbegin(), stack_.rend()}; }

    friend bool operator==(const Agenda&, const Agenda&) = default;

private:
    std::vector<DialogueAct> stack_;
};

struct SimProfile {
    std::size_t patience = 3;
    double pop_one = 0.7;  // probability of emitting one act; two otherwise

    void validate() const;  // throws ValidationError
};

// k ~ U{1..|system_requestable|} constraint slots with values copied from a
// uniformly drawn item; m ~ U{1..|requestable|} request slots, taken from
// the non-constraint slots first. Throws SimulationError on an empty
// database.
UserGoal sample_goal(const Ontology& ontology, const ItemDatabase& db, Rng& rng);

// Top to bottom: informs of the constraints (ontology order), requests
// (ontology order), bye().
Agenda init_agenda(const UserGoal& goal, const Ontology& ontology);

struct PatienceState {
    ActList last_system_acts;
    std::size_t repeats = 0;
};

// Applies the system's acts to the agenda and goal:
//   request(s)        push inform(s = goal value, or dontcare)
//   inform(s=v)       conflicting constraint: push inform(s = goal value);
//                     requested slot: record the answer, drop request(s)
//   offer(x)          record the offer (answers a request for the offer column)
//   canthelp(...)     relax the last constrained slot to dontcare and push
//                     reqalts() and that inform; nothing to relax: [bye()]
// An identical system turn repeated `patience` times resets the agenda to
// [bye()]. Pushing an inform drops other informs of the same slot.
// `unanswered` holds requests the user asked last turn; those still
// unanswered go back on the agenda below this turn's pushes.
void sim_receive(Agenda& agenda, UserGoal& goal, const ActList& system_acts, PatienceState& patience,
                 const SimProfile& profile, const Ontology& ontology, const ItemDatabase& db,
                 const ActList& unanswered = {});

// Pops one or two acts (probability pop_one of one), capped by the agenda
// size; bye() is never batched. Exactly one uniform draw per call. Throws
// SimulationError on an empty agenda.
ActList sim_respond(Agenda& agenda, const SimProfile& profile, Rng& rng);

// Pops exactly `count` acts (bye() still travels alone).
ActList sim_pop(Agenda& agenda, std::size_t count);

// Some offered item satisfies every non-dontcare constraint and every goal
// request was answered with that item's value.
bool check_success(const UserGoal& goal, const ItemDatabase& db);

// Goal, agenda and bookkeeping of one simulated user.
class AgendaSimulator {
public:
    static constexpr const char* kStreamName = "agenda_based_us";

    AgendaSimulator(std::shared_ptr<const Ontology> ontology, std::shared_ptr<const ItemDatabase> db,
                    SimProfile profile = {});

    // Seeds the simulator's generator with the per-dialogue seed, samples a
    // goal and builds the agenda.
    void start(std::uint64_t dialogue_seed);
    void receive(const ActList& system_acts);
    ActList respond();
    // Emits given acts as this turn's output (learned user policies).
    ActList respond_with_pop(std::size_t count);
    ActList respond_with(ActList acts);

    bool said_bye() const noexcept { return said_bye_; }
    bool success() const { return check_success(goal_, *db_); }
    const UserGoal& goal() const noexcept { return goal_; }
    const Agenda& agenda() const noexcept { return agenda_; }
    const SimProfile& profile() const noexcept { return profile_; }
    const ActList& last_emitted() const noexcept { return last_emitted_; }
    const ActList& last_received() const noexcept { return last_received_; }

    // The user's own view of the dialogue, in DialogueState form: informed
    // constraints, first unanswered request, last offer, agenda size in
    // db_match_count, receive count in turn.
    DialogueState user_view() const;

    Rng& rng() noexcept { return rng_; }

private:
    ActList emit(ActList acts);

    std::shared_ptr<const Ontology> ontology_;
    std::shared_ptr<const ItemDatabase> db_;
    SimProfile profile_;
    Rng rng_;
    UserGoal goal_;
    Agenda agenda_;
    PatienceState patience_;
    ActList last_emitted_;
    ActList last_received_;
    SlotMap informed_;
    std::size_t receives_ = 0;
    bool said_bye_ = false;
    bool heard_bye_ = false;
};

}  // namespace dialogos
