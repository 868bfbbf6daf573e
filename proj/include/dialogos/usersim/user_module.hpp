#pragma once

#include <memory>
#include <optional>

#include "dialogos/agent/module.hpp"
#include "dialogos/learning/learner.hpp"
#include "dialogos/learning/tabular_view.hpp"
#include "dialogos/usersim/simulator.hpp"

namespace dialogos {

// Discrete view of the simulated user's situation, for learned user
// policies. State fields (as stored by AgendaSimulator::user_view):
// kind of the last system act (8), an offer received (2), a request still
// unanswered (2), agenda size bucket (4), terminal (2).
// Actions: pop one agenda act, pop two, ask for alternatives, say bye.
class UserView final : public TabularView {
public:
    enum Action : std::size_t { pop_one = 0, pop_two = 1, reqalts = 2, bye = 3 };
    static constexpr std::size_t kSystemActKinds = 8;

    std::size_t num_states() const override { return kSystemActKinds * 2 * 2 * 4 * 2; }
    std::size_t num_actions() const override { return 4; }
    std::size_t encode(const DialogueState& state) const override;
    // Terminal: only bye. Otherwise bye only once the agenda holds nothing
    // else; pop_one needs a non-empty agenda, pop_two at least two acts,
    // reqalts a received offer.
    ActionMask valid_actions(const DialogueState& state) const override;
    std::size_t fallback_action() const override { return bye; }
    std::string describe(std::size_t action) const override;

    // 0 none, 1 welcomemsg/hello, 2 request, 3 offer, 4 inform, 5 canthelp,
    // 6 bye, 7 anything else; decided by the first act.
    static std::size_t system_act_kind(const ActList& acts);
};

// acts -> acts. The agenda-based simulated user as a pipeline module.
// Arguments: patience, pop_one, and learner (none | random | q_learning |
// reinforce) with the learned-policy hyperparameters. An empty first input
// is the opening turn: the user speaks without having heard anything.
class AgendaBasedUsModule final : public ConversationalModule {
public:
    AgendaBasedUsModule() : ConversationalModule(AgendaSimulator::kStreamName) {}
    std::optional<Modality> accepts() const override { return Modality::acts; }
    std::optional<Modality> produces() const override { return Modality::acts; }

    std::optional<DialogueState> tracked_state() const override;
    std::optional<Decision> last_decision() const override { return decision_; }
    std::optional<bool> judge_success() const override;

    bool trainable() const override;
    std::size_t train(const TrainingInput& input) override;
    bool parameters_finite() const override { return !learner_ || learner_->finite(); }
    void save(const std::string& path) const override;
    void load(const std::string& path) override;

    const AgendaSimulator& simulator() const { return *sim_; }
    const TabularLearner* learner() const { return learner_.get(); }

protected:
    void on_initialize(const ModuleArgs& args, const ModuleEnvironment& env) override;
    void on_start(const DialogueContext& context) override;
    void on_input(const ConversationalFrame& frame) override;
    ConversationalFrame on_output() override;

private:
    std::unique_ptr<AgendaSimulator> sim_;
    UserView view_;
    std::unique_ptr<TabularLearner> learner_;
    Rng learner_rng_;
    std::optional<Decision> decision_;
    bool train_ = true;
    bool started_ = false;
    bool heard_anything_ = false;
    Role role_ = Role::user;
};

}  // namespace dialogos
