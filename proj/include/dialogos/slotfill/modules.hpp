#pragma once

#include <memory>
#include <optional>
#include <string>

#include "dialogos/agent/module.hpp"
#include "dialogos/learning/learner.hpp"
#include "dialogos/learning/tabular_view.hpp"
#include "dialogos/slotfill/dst.hpp"
#include "dialogos/slotfill/nlg.hpp"
#include "dialogos/slotfill/nlu.hpp"

namespace dialogos {

// text -> acts. A bare "dont care" answer is attributed to the slot this
// agent requested in its previous turn.
class SlotFillingNluModule final : public ConversationalModule {
public:
    SlotFillingNluModule() : ConversationalModule("slot_filling_nlu") {}
    std::optional<Modality> accepts() const override { return Modality::text; }
    std::optional<Modality> produces() const override { return Modality::acts; }
    void observe_own_acts(const ActList& acts) override;

protected:
    void on_initialize(const ModuleArgs& args, const ModuleEnvironment& env) override;
    void on_start(const DialogueContext& context) override;
    void on_input(const ConversationalFrame& frame) override;
    ConversationalFrame on_output() override;

private:
    std::unique_ptr<SlotFillingNlu> nlu_;
    std::optional<std::string> context_slot_;
    ActList parsed_;
    Role role_ = Role::system;
};

// acts -> custom (state frame).
class SlotFillingDstModule final : public ConversationalModule {
public:
    SlotFillingDstModule() : ConversationalModule("slot_filling_dst") {}
    std::optional<Modality> accepts() const override { return Modality::acts; }
    std::optional<Modality> produces() const override { return Modality::custom; }
    void observe_own_acts(const ActList& acts) override;
    std::optional<DialogueState> tracked_state() const override { return state_; }

    std::size_t warnings() const noexcept { return warnings_; }

protected:
    void on_initialize(const ModuleArgs& args, const ModuleEnvironment& env) override;
    void on_start(const DialogueContext& context) override;
    void on_input(const ConversationalFrame& frame) override;
    ConversationalFrame on_output() override;

private:
    std::shared_ptr<const Ontology> ontology_;
    std::shared_ptr<const ItemDatabase> db_;
    DialogueState state_;
    std::size_t warnings_ = 0;
    Role role_ = Role::system;
};

// text -> custom: understanding and tracking in one module.
class JointNluDstModule final : public ConversationalModule {
public:
    JointNluDstModule() : ConversationalModule("joint_nlu_dst") {}
    std::optional<Modality> accepts() const override { return Modality::text; }
    std::optional<Modality> produces() const override { return Modality::custom; }
    void observe_own_acts(const ActList& acts) override;
    std::optional<DialogueState> tracked_state() const override { return state_; }

protected:
    void on_initialize(const ModuleArgs& args, const ModuleEnvironment& env) override;
    void on_start(const DialogueContext& context) override;
    void on_input(const ConversationalFrame& frame) override;
    ConversationalFrame on_output() override;

private:
    std::shared_ptr<const Ontology> ontology_;
    std::shared_ptr<const ItemDatabase> db_;
    std::unique_ptr<SlotFillingNlu> nlu_;
    std::optional<std::string> context_slot_;
    DialogueState state_;
    Role role_ = Role::system;
};

// Common part of the rule-based and learned system policies: custom ->
// acts, remembers the last item it offered, reports its decision.
class PolicyModuleBase : public ConversationalModule {
public:
    using ConversationalModule::ConversationalModule;
    std::optional<Modality> accepts() const override { return Modality::custom; }
    std::optional<Modality> produces() const override { return Modality::acts; }
    void observe_own_acts(const ActList& acts) override;
    std::optional<Decision> last_decision() const override { return decision_; }

protected:
    void on_initialize(const ModuleArgs& args, const ModuleEnvironment& env) override;
    void on_start(const DialogueContext& context) override;
    void on_input(const ConversationalFrame& frame) override;
    ConversationalFrame on_output() override;

    // Picks the acts for the current state and the abstract action id.
    virtual std::pair<ActList, std::size_t> decide(const DialogueState& state) = 0;

    std::shared_ptr<const Ontology> ontology_;
    std::shared_ptr<const ItemDatabase> db_;
    std::unique_ptr<SystemView> view_;
    std::optional<std::string> previous_offer_;

private:
    std::optional<DialogueState> state_;
    std::optional<Decision> decision_;
    Role role_ = Role::system;
};

class SlotFillingPolicyModule final : public PolicyModuleBase {
public:
    SlotFillingPolicyModule() : PolicyModuleBase("slot_filling_policy") {}

protected:
    std::pair<ActList, std::size_t> decide(const DialogueState& state) override;
};

// A tabular learner over the system view. Types: q_learning_policy,
// reinforce_policy, random_policy. Arguments: learning_rate,
// discount_factor, epsilon, epsilon_decay, epsilon_min, explore, train.
class LearnedPolicyModule final : public PolicyModuleBase {
public:
    explicit LearnedPolicyModule(LearnerKind kind);

    bool trainable() const override;
    std::size_t train(const TrainingInput& input) override;
    bool parameters_finite() const override { return learner_ && learner_->finite(); }
    void save(const std::string& path) const override;
    void load(const std::string& path) override;

    const TabularLearner& learner() const { return *learner_; }

protected:
    void on_initialize(const ModuleArgs& args, const ModuleEnvironment& env) override;
    std::pair<ActList, std::size_t> decide(const DialogueState& state) override;

private:
    LearnerKind kind_;
    std::unique_ptr<TabularLearner> learner_;
    bool train_ = true;
};

// Learner hyperparameters from module arguments, over the kind's defaults.
LearnerParams learner_params_from_args(LearnerKind kind, const ModuleArgs& args);

// acts -> text. Argument templates_path layers a template file over the
// defaults of the agent's role.
class SlotFillingNlgModule final : public ConversationalModule {
public:
    SlotFillingNlgModule() : ConversationalModule("slot_filling_nlg") {}
    std::optional<Modality> accepts() const override { return Modality::acts; }
    std::optional<Modality> produces() const override { return Modality::text; }

protected:
    void on_initialize(const ModuleArgs& args, const ModuleEnvironment& env) override;
    void on_input(const ConversationalFrame& frame) override;
    ConversationalFrame on_output() override;

private:
    TemplateTable templates_;
    ActList acts_;
    Role role_ = Role::system;
};

}  // namespace dialogos
