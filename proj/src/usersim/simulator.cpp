#include "dialogos/usersim/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "dialogos/common/errors.hpp"
#include "dialogos/common/text.hpp"

namespace dialogos {

namespace {

bool is_intent(const DialogueAct& act, std::string_view intent) { return text::to_lower(act.intent) == intent; }

bool is_dontcare(const std::string& v) { return text::to_lower(v) == kDontCare; }

bool informs_slot(const DialogueAct& act, const std::string& slot) {
    return is_intent(act, "inform") && act.has_slot(slot);
}

bool requests_slot(const DialogueAct& act, const std::string& slot) {
    return is_intent(act, "request") && act.has_slot(slot);
}

void push_inform(Agenda& agenda, const std::string& slot, const std::string& value) {
    agenda.remove_if([&](const DialogueAct& a) { return informs_slot(a, slot); });
    agenda.push(inform(slot, value));
}

}  // namespace

// --- agenda ----------------------------------------------------------------

void Agenda::push(DialogueAct act) {
    if (!stack_.empty() && stack_.back() == act) return;
    stack_.push_back(std::move(act));
}

DialogueAct Agenda::pop() {
    if (stack_.empty()) throw SimulationError("pop from an empty agenda");
    auto act = std::move(stack_.back());
    stack_.pop_back();
    return act;
}

const DialogueAct& Agenda::top() const {
    if (stack_.empty()) throw SimulationError("empty agenda has no top");
    return stack_.back();
}

void Agenda::reset_to_bye() { stack_ = {make_act("bye")}; }

void SimProfile::validate() const {
    if (patience < 1) throw ValidationError("patience must be at least 1");
    if (!(pop_one >= 0.0 && pop_one <= 1.0)) throw ValidationError("pop probabilities must lie in [0, 1]");
}

// --- goal and agenda ------------------------------------------------------

UserGoal sample_goal(const Ontology& ontology, const ItemDatabase& db, Rng& rng) {
    if (db.empty()) throw SimulationError("cannot sample a goal from an empty database");
    if (ontology.system_requestable.empty() || ontology.requestable.empty())
        throw SimulationError("ontology needs system-requestable and requestable slots to sample goals");

    UserGoal goal;
    const auto k = 1 + uniform_index(rng, ontology.system_requestable.size());
    auto slots = ontology.system_requestable;
    std::shuffle(slots.begin(), slots.end(), rng);
    const auto& row = db.rows()[uniform_index(rng, db.size())];
    for (std::size_t i = 0; i < k; ++i) {
        const auto& value = row[*db.column_index(slots[i])];
        if (!value.empty()) goal.constraints[slots[i]] = value;
    }
    if (goal.constraints.empty()) throw SimulationError("sampled item has no values for the chosen slots");

    const auto m = 1 + uniform_index(rng, ontology.requestable.size());
    std::vector<std::string> free_slots, constrained;
    for (const auto& s : ontology.requestable) (goal.constraints.contains(s) ? constrained : free_slots).push_back(s);
    std::shuffle(free_slots.begin(), free_slots.end(), rng);
    std::shuffle(constrained.begin(), constrained.end(), rng);
    free_slots.insert(free_slots.end(), constrained.begin(), constrained.end());
    free_slots.resize(m);
    for (const auto& s : ontology.requestable)
        if (std::find(free_slots.begin(), free_slots.end(), s) != free_slots.end()) goal.requests.push_back(s);
    return goal;
}

Agenda init_agenda(const UserGoal& goal, const Ontology& ontology) {
    Agenda agenda;
    agenda.push(make_act("bye"));
    for (auto it = goal.requests.rbegin(); it != goal.requests.rend(); ++it) agenda.push(request(*it));
    const auto order = ontology.informable_slots();
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if (const auto c = goal.constraints.find(*it); c != goal.constraints.end()) agenda.push(inform(c->first, c->second));
    // Constraints outside the informable list (should not happen) go last.
    for (const auto& [slot, value] : goal.constraints)
        if (std::find(order.begin(), order.end(), slot) == order.end()) agenda.push(inform(slot, value));
    return agenda;
}

// --- update rules ------------------------------------------------------------

void sim_receive(Agenda& agenda, UserGoal& goal, const ActList& system_acts, PatienceState& patience,
                 const SimProfile& profile, const Ontology& ontology, const ItemDatabase& db,
                 const ActList& unanswered) {
    // Requests the system ignored last turn come back first (lowest).
    for (const auto& act : unanswered) {
        if (!is_intent(act, "request")) continue;
        for (const auto& p : act.params) {
            if (goal.received.contains(p.slot)) continue;
            const bool queued = std::any_of(agenda.stack().begin(), agenda.stack().end(),
                                            [&](const DialogueAct& a) { return requests_slot(a, p.slot); });
            if (!queued) agenda.push(request(p.slot));
        }
    }

    for (const auto& act : system_acts) {
        const auto intent = text::to_lower(act.intent);
        if (intent == "request") {
            for (const auto& p : act.params) {
                const auto c = goal.constraints.find(p.slot);
                push_inform(agenda, p.slot, c != goal.constraints.end() ? c->second : std::string(kDontCare));
            }
        } else if (intent == "inform") {
            for (const auto& p : act.params) {
                if (!p.value) continue;
                const auto c = goal.constraints.find(p.slot);
                if (c != goal.constraints.end() && !is_dontcare(c->second) && !text::iequals(c->second, *p.value)) {
                    push_inform(agenda, p.slot, c->second);
                    continue;
                }
                if (std::find(goal.requests.begin(), goal.requests.end(), p.slot) != goal.requests.end()) {
                    goal.received[p.slot] = *p.value;
                    agenda.remove_if([&](const DialogueAct& a) { return requests_slot(a, p.slot); });
                }
            }
        } else if (intent == "offer") {
            if (act.params.empty() || !act.params.front().value) continue;
            const auto& label = *act.params.front().value;
            goal.offers.push_back(label);
            const auto& column = db.offer_column();
            if (std::find(goal.requests.begin(), goal.requests.end(), column) != goal.requests.end()) {
                goal.received[column] = label;
                agenda.remove_if([&](const DialogueAct& a) { return requests_slot(a, column); });
            }
        } else if (intent == "canthelp") {
            std::optional<std::string> relax;
            for (const auto& slot : ontology.informable_slots()) {
                const auto c = goal.constraints.find(slot);
                if (c != goal.constraints.end() && !is_dontcare(c->second)) relax = slot;
            }
            if (!relax) {
                agenda.reset_to_bye();
                continue;
            }
            goal.constraints[*relax] = std::string(kDontCare);
            agenda.push(make_act("reqalts"));
            push_inform(agenda, *relax, std::string(kDontCare));
        }
    }

    if (!system_acts.empty() && system_acts == patience.last_system_acts) {
        if (++patience.repeats >= profile.patience) agenda.reset_to_bye();
    } else {
        patience.repeats = 0;
    }
    patience.last_system_acts = system_acts;
}

ActList sim_pop(Agenda& agenda, std::size_t count) {
    if (agenda.empty()) throw SimulationError("respond called with an empty agenda");
    ActList out;
    for (std::size_t i = 0; i < count && !agenda.empty(); ++i) {
        const bool bye = is_intent(agenda.top(), "bye");
        if (bye && !out.empty()) break;
        out.push_back(agenda.pop());
        if (bye) break;
    }
    return out;
}

ActList sim_respond(Agenda& agenda, const SimProfile& profile, Rng& rng) {
    if (agenda.empty()) throw SimulationError("respond called with an empty agenda");
    const std::size_t n = uniform01(rng) < profile.pop_one ? 1 : 2;
    return sim_pop(agenda, n);
}

bool check_success(const UserGoal& goal, const ItemDatabase& db) {
    for (const auto& label : goal.offers) {
        for (const auto& item : db.find_by_label(label)) {
            bool ok = true;
            for (const auto& [slot, value] : goal.constraints) {
                if (is_dontcare(value)) continue;
                if (!db.has_column(slot) || !text::iequals(item.get(slot), value)) ok = false;
            }
            for (const auto& slot : goal.requests) {
                const auto r = goal.received.find(slot);
                if (r == goal.received.end() || !db.has_column(slot) || !text::iequals(item.get(slot), r->second))
                    ok = false;
            }
            if (ok) return true;
        }
    }
    return false;
}

// --- simulator -------------------------------------------------------------

AgendaSimulator::AgendaSimulator(std::shared_ptr<const Ontology> ontology, std::shared_ptr<const ItemDatabase> db,
                                 SimProfile profile)
    : ontology_(std::move(ontology)), db_(std::move(db)), profile_(profile) {
    profile_.validate();
}

void AgendaSimulator::start(std::uint64_t dialogue_seed) {
    rng_.seed(derive_seed(dialogue_seed, kStreamName));
    goal_ = sample_goal(*ontology_, *db_, rng_);
    agenda_ = init_agenda(goal_, *ontology_);
    patience_ = {};
    last_emitted_.clear();
    last_received_.clear();
    informed_.clear();
    receives_ = 0;
    said_bye_ = false;
    heard_bye_ = false;
}

void AgendaSimulator::receive(const ActList& system_acts) {
    ++receives_;
    last_received_ = system_acts;
    if (std::any_of(system_acts.begin(), system_acts.end(), [](const DialogueAct& a) { return is_intent(a, "bye"); }))
        heard_bye_ = true;
    sim_receive(agenda_, goal_, system_acts, patience_, profile_, *ontology_, *db_, last_emitted_);
}

ActList AgendaSimulator::emit(ActList acts) {
    for (const auto& a : acts) {
        if (is_intent(a, "bye")) said_bye_ = true;
        if (is_intent(a, "inform"))
            for (const auto& p : a.params)
                if (p.value && goal_.constraints.contains(p.slot)) informed_[p.slot] = *p.value;
    }
    last_emitted_ = acts;
    return acts;
}

ActList AgendaSimulator::respond() { return emit(sim_respond(agenda_, profile_, rng_)); }

ActList AgendaSimulator::respond_with_pop(std::size_t count) { return emit(sim_pop(agenda_, count)); }

ActList AgendaSimulator::respond_with(ActList acts) { return emit(std::move(acts)); }

DialogueState AgendaSimulator::user_view() const {
    DialogueState s;
    s.slots_filled = informed_;
    for (const auto& r : goal_.requests)
        if (!goal_.received.contains(r)) {
            s.requested_slot = r;
            break;
        }
    if (!goal_.offers.empty()) s.offered_item = goal_.offers.back();
    s.last_user_acts = last_emitted_;
    s.last_system_acts = last_received_;
    s.db_match_count = agenda_.size();
    s.turn = receives_;
    s.is_terminal = said_bye_ || heard_bye_;
    return s;
}

}  // namespace dialogos
