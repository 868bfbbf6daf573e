#include "dialogos/agent/agent.hpp"

#include <algorithm>

#include "dialogos/common/errors.hpp"
#include "dialogos/common/text.hpp"

namespace dialogos {

void ModuleRegistry::add(const std::string& type, Factory factory) { factories_[type] = std::move(factory); }

std::unique_ptr<ConversationalModule> ModuleRegistry::create(const std::string& type) const {
    const auto it = factories_.find(type);
    if (it == factories_.end()) throw AssemblyError("unknown module type '" + type + "'");
    return it->second();
}

std::vector<std::string> ModuleRegistry::types() const {
    std::vector<std::string> out;
    for (const auto& [name, factory] : factories_) out.push_back(name);
    return out;
}

ConversationalFrame merge_frames(const std::vector<ConversationalFrame>& outputs, Role sender) {
    if (outputs.empty()) throw StepError("group", "no module output to merge");
    if (outputs.size() == 1) return outputs.front();
    const auto modality = outputs.front().modality();
    for (const auto& f : outputs)
        if (f.modality() != modality) throw StepError("group", "parallel modules produced different modalities");
    switch (modality) {
        case Modality::acts: {
            ActList acts;
            for (const auto& f : outputs) acts.insert(acts.end(), f.acts().begin(), f.acts().end());
            return ConversationalFrame::from_acts(std::move(acts), sender);
        }
        case Modality::text: {
            std::vector<std::string> parts;
            for (const auto& f : outputs)
                if (!f.text().empty()) parts.push_back(f.text());
            return ConversationalFrame::from_text(text::join(parts, " "), sender);
        }
        case Modality::custom: {
            CustomPayload merged;
            for (const auto& f : outputs)
                for (const auto& [k, v] : f.custom()) merged[k] = v;
            return ConversationalFrame::from_custom(std::move(merged), sender);
        }
    }
    throw StepError("group", "unknown modality");
}

std::string frame_utterance(const ConversationalFrame& frame) {
    switch (frame.modality()) {
        case Modality::text: return frame.text();
        case Modality::acts: return serialize_acts(frame.acts());
        case Modality::custom: {
            std::vector<std::string> parts;
            for (const auto& [k, v] : frame.custom()) parts.push_back(k + "=" + v);
            return text::join(parts, "; ");
        }
    }
    return {};
}

// --- assembly --------------------------------------------------------------

Agent::Agent(AgentSpec spec, std::uint64_t run_seed)
    : spec_(std::move(spec)),
      recorder_(spec_.train_schedule.experience_pool_size, spec_.experience_log_path),
      train_rng_(derive_seed(run_seed, "train:" + std::string(to_string(spec_.role)))) {}

Agent Agent::assemble(const AgentSpec& spec, const ModuleEnvironment& env, const ModuleArgs& global_args,
                      const ModuleRegistry& registry) {
    if (spec.modules.empty()) throw AssemblyError("empty pipeline");
    try {
        spec.train_schedule.validate();
    } catch (const ValidationError& e) {
        throw AssemblyError(std::string("train schedule: ") + e.what());
    }

    Agent agent(spec, env.seed);
    ModuleEnvironment module_env = env;
    module_env.role = spec.role;

    std::size_t index = 0;
    std::optional<Modality> current;  // modality flowing into the next group; nullopt = not yet known
    bool first_group = true;
    for (std::size_t g = 0; g < spec.modules.size(); ++g) {
        const auto& group = spec.modules[g];
        if (group.empty()) throw AssemblyError("module group " + std::to_string(g) + " is empty");
        std::vector<std::unique_ptr<ConversationalModule>> built;
        std::optional<Modality> group_in = current;
        std::optional<Modality> group_out;
        bool out_known = false;
        for (const auto& desc : group) {
            const auto where = "module " + std::to_string(index) + " (" + desc.type + ")";
            std::unique_ptr<ConversationalModule> m;
            try {
                m = registry.create(desc.type);
            } catch (const AssemblyError& e) {
                throw AssemblyError(where + ": " + e.what());
            }
            const auto in = m->accepts();
            if (in && group_in && *in != *group_in)
                throw AssemblyError(where + " accepts " + std::string(to_string(*in)) + " but receives " +
                                    std::string(to_string(*group_in)));
            if (in && !group_in) group_in = in;
            const auto out = m->produces() ? m->produces() : group_in;
            if (out_known && out && group_out && *out != *group_out)
                throw AssemblyError(where + " produces a different modality than the rest of its group");
            if (!out_known || !group_out) group_out = out;
            out_known = true;

            const auto args = merge_args(global_args, desc.args);
            try {
                m->initialize(args, module_env);
                if (const auto model = arg_string(args, "model_path"); !model.empty()) m->load(model);
            } catch (const std::exception& e) {
                throw AssemblyError(where + ": " + e.what());
            }
            agent.flat_.push_back(m.get());
            built.push_back(std::move(m));
            ++index;
        }
        if (first_group) agent.input_modality_ = group_in;
        first_group = false;
        current = group_out;
        agent.groups_.push_back(std::move(built));
    }
    agent.output_modality_ = current;
    return agent;
}

// --- dialogue --------------------------------------------------------------

void Agent::start_dialogue(std::uint64_t dialogue_id, std::uint64_t dialogue_seed) {
    ++dialogue_count_;
    in_dialogue_ = true;
    failed_ = false;
    last_acts_.clear();
    recorder_.begin(dialogue_id, spec_.role);
    const DialogueContext context{dialogue_id, dialogue_seed};
    for (auto* m : flat_) m->start_dialogue(context);
}

ConversationalFrame Agent::step(const ConversationalFrame& input) {
    if (!in_dialogue_) throw LifecycleError("agent step outside a dialogue");
    ConversationalFrame frame = input;
    std::optional<ActList> own_acts;
    for (auto& group : groups_) {
        std::vector<ConversationalFrame> outputs;
        outputs.reserve(group.size());
        for (auto& m : group) {
            try {
                m->receive_input(frame);
                outputs.push_back(m->generate_output());
            } catch (const StepError&) {
                failed_ = true;
                throw;
            } catch (const std::exception& e) {
                failed_ = true;
                throw StepError(m->type(), e.what());
            }
        }
        try {
            frame = merge_frames(outputs, spec_.role).with_timestamp(++timestamp_);
        } catch (const StepError&) {
            failed_ = true;
            throw;
        }
        if (frame.has_acts()) own_acts = frame.acts();
    }

    last_acts_ = own_acts.value_or(ActList{});
    for (auto* m : flat_) m->observe_own_acts(last_acts_);
    for (auto* m : flat_) {
        if (auto decision = m->last_decision()) {
            recorder_.observe(*decision, frame_utterance(input), frame_utterance(frame));
            break;
        }
    }
    return frame;
}

bool Agent::is_terminal() const {
    if (failed_) return true;
    if (std::any_of(last_acts_.begin(), last_acts_.end(),
                    [](const DialogueAct& a) { return text::to_lower(a.intent) == "bye"; }))
        return true;
    const auto state = tracked_state();
    return state && state->is_terminal;
}

std::optional<DialogueState> Agent::tracked_state() const {
    for (const auto* m : flat_)
        if (auto s = m->tracked_state()) return s;
    return std::nullopt;
}

std::optional<bool> Agent::judge_success() const {
    for (const auto* m : flat_)
        if (auto s = m->judge_success()) return s;
    return std::nullopt;
}

const Episode& Agent::end_dialogue(bool success) {
    auto final_state = tracked_state().value_or(DialogueState{});
    final_state.is_terminal = true;
    const auto& episode = recorder_.finish(final_state, success);
    for (auto* m : flat_) m->end_dialogue();
    in_dialogue_ = false;
    return episode;
}

TrainingReport Agent::maybe_train() {
    TrainingReport report;
    if (!has_trainable_modules() || !should_train(spec_.train_schedule, dialogue_count_)) return report;
    report.scheduled = true;
    const TrainingInput input{recorder_.pool(), spec_.train_schedule.epochs, spec_.train_schedule.minibatch_size,
                              train_rng_};
    for (std::size_t i = 0; i < flat_.size(); ++i) {
        auto* m = flat_[i];
        if (!m->trainable()) continue;
        ModuleTrainingEntry entry{i, m->type(), 0, {}};
        try {
            entry.episodes = m->train(input);
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

TrainingReport Agent::end_dialogue_and_maybe_train(bool success) {
    end_dialogue(success);
    return maybe_train();
}

bool Agent::has_trainable_modules() const {
    return std::any_of(flat_.begin(), flat_.end(), [](const ConversationalModule* m) { return m->trainable(); });
}

bool Agent::parameters_finite() const {
    return std::all_of(flat_.begin(), flat_.end(),
                       [](const ConversationalModule* m) { return m->parameters_finite(); });
}

void Agent::save_models() const {
    for (const auto* m : flat_)
        if (const auto path = arg_string(m->args(), "save_path"); !path.empty()) m->save(path);
}

}  // namespace dialogos
