#include "dialogos/slotfill/modules.hpp"

#include "dialogos/common/errors.hpp"
#include "dialogos/common/text.hpp"
#include "dialogos/slotfill/policy.hpp"

namespace dialogos {

namespace {

void require_domain(const ModuleEnvironment& env, const std::string& type) {
    if (!env.ontology || !env.database) throw ValidationError(type + " needs an ontology and a database");
}

// The slot our side asked for, if its last acts contained a request.
std::optional<std::string> requested_by(const ActList& acts) {
    for (const auto& a : acts)
        if (text::to_lower(a.intent) == "request" && !a.params.empty()) return a.params.front().slot;
    return std::nullopt;
}

DialogueState require_state(const ConversationalFrame& frame, const std::string& type) {
    auto state = state_from_frame(frame);
    if (!state) throw ValidationError(type + " input carries no dialogue state");
    return *state;
}

}  // namespace

// --- NLU --------------------------------------------------------------------

void SlotFillingNluModule::on_initialize(const ModuleArgs& args, const ModuleEnvironment& env) {
    if (!env.ontology) throw ValidationError("slot_filling_nlu needs an ontology");
    const bool use_db = arg_bool(args, "use_database", true);
    nlu_ = std::make_unique<SlotFillingNlu>(*env.ontology, use_db ? env.database.get() : nullptr);
    role_ = env.role;
}

void SlotFillingNluModule::on_start(const DialogueContext&) {
    context_slot_.reset();
    parsed_.clear();
}

void SlotFillingNluModule::on_input(const ConversationalFrame& frame) {
    parsed_ = nlu_->understand(frame.text(), context_slot_);
}

ConversationalFrame SlotFillingNluModule::on_output() { return ConversationalFrame::from_acts(parsed_, role_); }

void SlotFillingNluModule::observe_own_acts(const ActList& acts) { context_slot_ = requested_by(acts); }

// --- DST --------------------------------------------------------------------

void SlotFillingDstModule::on_initialize(const ModuleArgs&, const ModuleEnvironment& env) {
    require_domain(env, type());
    ontology_ = env.ontology;
    db_ = env.database;
    role_ = env.role;
}

void SlotFillingDstModule::on_start(const DialogueContext&) {
    state_ = {};
    warnings_ = 0;
}

void SlotFillingDstModule::on_input(const ConversationalFrame& frame) {
    auto outcome = dst_update(state_, frame.acts(), *ontology_, database_counter(*db_));
    state_ = std::move(outcome.state);
    warnings_ += outcome.warnings;
}

ConversationalFrame SlotFillingDstModule::on_output() { return make_state_frame(state_, role_); }

void SlotFillingDstModule::observe_own_acts(const ActList& acts) { state_ = dst_note_own_acts(state_, acts); }

// --- joint NLU + DST ---------------------------------------------------------

void JointNluDstModule::on_initialize(const ModuleArgs& args, const ModuleEnvironment& env) {
    require_domain(env, type());
    ontology_ = env.ontology;
    db_ = env.database;
    const bool use_db = arg_bool(args, "use_database", true);
    nlu_ = std::make_unique<SlotFillingNlu>(*ontology_, use_db ? db_.get() : nullptr);
    role_ = env.role;
}

void JointNluDstModule::on_start(const DialogueContext&) {
    state_ = {};
    context_slot_.reset();
}

void JointNluDstModule::on_input(const ConversationalFrame& frame) {
    const auto acts = nlu_->understand(frame.text(), context_slot_);
    state_ = dst_update(state_, acts, *ontology_, database_counter(*db_)).state;
}

ConversationalFrame JointNluDstModule::on_output() { return make_state_frame(state_, role_); }

void JointNluDstModule::observe_own_acts(const ActList& acts) {
    context_slot_ = requested_by(acts);
    state_ = dst_note_own_acts(state_, acts);
}

// --- policies ----------------------------------------------------------------

void PolicyModuleBase::on_initialize(const ModuleArgs&, const ModuleEnvironment& env) {
    require_domain(env, type());
    ontology_ = env.ontology;
    db_ = env.database;
    view_ = std::make_unique<SystemView>(*ontology_);
    role_ = env.role;
}

void PolicyModuleBase::on_start(const DialogueContext&) {
    previous_offer_.reset();
    state_.reset();
    decision_.reset();
}

void PolicyModuleBase::on_input(const ConversationalFrame& frame) {
    state_ = require_state(frame, type());
    decision_.reset();
}

ConversationalFrame PolicyModuleBase::on_output() {
    auto [acts, action] = decide(*state_);
    decision_ = Decision{*state_, action, view_->describe(action)};
    return ConversationalFrame::from_acts(std::move(acts), role_);
}

void PolicyModuleBase::observe_own_acts(const ActList& acts) {
    for (const auto& a : acts)
        if (text::to_lower(a.intent) == "offer" && !a.params.empty() && a.params.front().value)
            previous_offer_ = *a.params.front().value;
}

std::pair<ActList, std::size_t> SlotFillingPolicyModule::decide(const DialogueState& state) {
    auto acts = policy_respond(state, *ontology_, *db_, previous_offer_);
    const auto action = view_->actions().classify(acts).value_or(view_->fallback_action());
    return {std::move(acts), action};
}

LearnerParams learner_params_from_args(LearnerKind kind, const ModuleArgs& args) {
    auto p = default_learner_params(kind);
    p.alpha = arg_double(args, "learning_rate", p.alpha);
    p.gamma = arg_double(args, "discount_factor", p.gamma);
    p.epsilon = arg_double(args, "epsilon", p.epsilon);
    p.epsilon_decay = arg_double(args, "epsilon_decay", p.epsilon_decay);
    p.epsilon_min = arg_double(args, "epsilon_min", p.epsilon_min);
    p.explore = arg_bool(args, "explore", p.explore);
    p.validate();
    return p;
}

namespace {

std::string learned_type(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::q_learning: return "q_learning_policy";
        case LearnerKind::reinforce: return "reinforce_policy";
        case LearnerKind::random: break;
    }
    return "random_policy";
}

}  // namespace

LearnedPolicyModule::LearnedPolicyModule(LearnerKind kind) : PolicyModuleBase(learned_type(kind)), kind_(kind) {}

void LearnedPolicyModule::on_initialize(const ModuleArgs& args, const ModuleEnvironment& env) {
    PolicyModuleBase::on_initialize(args, env);
    learner_ = make_learner(kind_, *view_, learner_params_from_args(kind_, args));
    train_ = arg_bool(args, "train", true);
}

bool LearnedPolicyModule::trainable() const { return train_ && kind_ != LearnerKind::random; }

std::size_t LearnedPolicyModule::train(const TrainingInput& input) {
    return train_round(*learner_, input.pool, input.epochs, input.minibatch_size, *view_, input.rng);
}

void LearnedPolicyModule::save(const std::string& path) const { save_checkpoint(*learner_, path); }

void LearnedPolicyModule::load(const std::string& path) { load_checkpoint(*learner_, path); }

std::pair<ActList, std::size_t> LearnedPolicyModule::decide(const DialogueState& state) {
    const auto action =
        learner_->select(view_->encode(state), view_->valid_actions(state), view_->fallback_action(), rng());
    auto acts = realize_system_action(view_->actions().action(action), state, *ontology_, *db_, previous_offer_);
    return {std::move(acts), action};
}

// --- NLG --------------------------------------------------------------------

void SlotFillingNlgModule::on_initialize(const ModuleArgs& args, const ModuleEnvironment& env) {
    role_ = env.role;
    templates_ = role_ == Role::user ? TemplateTable::user_defaults() : TemplateTable::defaults();
    if (const auto path = arg_string(args, "templates_path"); !path.empty()) templates_ = load_templates(path, templates_);
}

void SlotFillingNlgModule::on_input(const ConversationalFrame& frame) { acts_ = frame.acts(); }

ConversationalFrame SlotFillingNlgModule::on_output() {
    return ConversationalFrame::from_text(nlg_generate(acts_, templates_), role_);
}

}  // namespace dialogos
