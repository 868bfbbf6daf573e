#include "dialogos/usersim/user_module.hpp"

#include "dialogos/common/errors.hpp"
#include "dialogos/common/text.hpp"
#include "dialogos/slotfill/modules.hpp"

namespace dialogos {

// --- user view ----------------------------------------------------------------

std::size_t UserView::system_act_kind(const ActList& acts) {
    if (acts.empty()) return 0;
    const auto intent = text::to_lower(acts.front().intent);
    if (intent == "welcomemsg" || intent == "hello") return 1;
    if (intent == "request") return 2;
    if (intent == "offer") return 3;
    if (intent == "inform") return 4;
    if (intent == "canthelp") return 5;
    if (intent == "bye") return 6;
    return 7;
}

std::size_t UserView::encode(const DialogueState& state) const {
    std::size_t index = system_act_kind(state.last_system_acts);
    index = index * 2 + (state.offered_item ? 1 : 0);
    index = index * 2 + (state.requested_slot ? 1 : 0);
    index = index * 4 + static_cast<std::size_t>(SlotStateEncoder::db_bucket(state.db_match_count));
    index = index * 2 + (state.is_terminal ? 1 : 0);
    return index;
}

ActionMask UserView::valid_actions(const DialogueState& state) const {
    ActionMask mask(num_actions(), false);
    // bye sits at the bottom of the agenda, so a size of one means only bye
    // is left.
    mask[bye] = state.is_terminal || state.db_match_count <= 1;
    if (state.is_terminal) return mask;
    mask[pop_one] = state.db_match_count >= 1;
    mask[pop_two] = state.db_match_count >= 2;
    mask[reqalts] = state.offered_item.has_value();
    return mask;
}

std::string UserView::describe(std::size_t action) const {
    switch (action) {
        case pop_one: return "pop_one";
        case pop_two: return "pop_two";
        case reqalts: return "reqalts";
        case bye: return "bye";
        default: break;
    }
    throw std::out_of_range("user action id " + std::to_string(action));
}

// --- module --------------------------------------------------------------------

void AgendaBasedUsModule::on_initialize(const ModuleArgs& args, const ModuleEnvironment& env) {
    if (!env.ontology || !env.database) throw ValidationError("agenda_based_us needs an ontology and a database");
    SimProfile profile;
    const auto patience = arg_int(args, "patience", static_cast<std::int64_t>(profile.patience));
    if (patience < 1) throw ValidationError("patience must be at least 1");
    profile.patience = static_cast<std::size_t>(patience);
    profile.pop_one = arg_double(args, "pop_one", profile.pop_one);
    sim_ = std::make_unique<AgendaSimulator>(env.ontology, env.database, profile);
    role_ = env.role;

    const auto learner = arg_string(args, "learner", "none");
    learner_.reset();
    if (learner != "none") {
        const auto kind = parse_learner_kind(learner);
        learner_ = make_learner(kind, view_, learner_params_from_args(kind, args));
    }
    train_ = arg_bool(args, "train", true);
}

void AgendaBasedUsModule::on_start(const DialogueContext& context) {
    sim_->start(context.seed);
    learner_rng_.seed(derive_seed(context.seed, std::string(AgendaSimulator::kStreamName) + ":learner"));
    decision_.reset();
    started_ = true;
    heard_anything_ = false;
}

void AgendaBasedUsModule::on_input(const ConversationalFrame& frame) {
    if (!started_) throw LifecycleError("agenda_based_us: input before start_dialogue");
    const auto& acts = frame.acts();
    // The opening turn carries nothing to react to.
    if (!heard_anything_ && acts.empty()) return;
    heard_anything_ = true;
    sim_->receive(acts);
}

ConversationalFrame AgendaBasedUsModule::on_output() {
    const auto before = sim_->user_view();
    ActList acts;
    std::size_t action = 0;
    if (learner_) {
        action = learner_->select(view_.encode(before), view_.valid_actions(before), view_.fallback_action(),
                                  learner_rng_);
        switch (action) {
            case UserView::pop_one: acts = sim_->respond_with_pop(1); break;
            case UserView::pop_two: acts = sim_->respond_with_pop(2); break;
            case UserView::reqalts: acts = sim_->respond_with({make_act("reqalts")}); break;
            default: acts = sim_->respond_with({make_act("bye")}); break;
        }
    } else {
        acts = sim_->respond();
        if (acts.size() == 1 && text::to_lower(acts.front().intent) == "bye") action = UserView::bye;
        else action = acts.size() == 1 ? UserView::pop_one : UserView::pop_two;
    }
    decision_ = Decision{before, action, view_.describe(action)};
    return ConversationalFrame::from_acts(std::move(acts), role_);
}

std::optional<DialogueState> AgendaBasedUsModule::tracked_state() const {
    if (!started_) return std::nullopt;
    return sim_->user_view();
}

std::optional<bool> AgendaBasedUsModule::judge_success() const {
    if (!started_) return std::nullopt;
    return sim_->success();
}

bool AgendaBasedUsModule::trainable() const {
    return train_ && learner_ && learner_->kind() != LearnerKind::random;
}

std::size_t AgendaBasedUsModule::train(const TrainingInput& input) {
    if (!learner_) return 0;
    return train_round(*learner_, input.pool, input.epochs, input.minibatch_size, view_, input.rng);
}

void AgendaBasedUsModule::save(const std::string& path) const {
    if (learner_) save_checkpoint(*learner_, path);
}

void AgendaBasedUsModule::load(const std::string& path) {
    if (!learner_) throw LoadError(path, "agenda_based_us has no learner to load into");
    load_checkpoint(*learner_, path);
}

}  // namespace dialogos
