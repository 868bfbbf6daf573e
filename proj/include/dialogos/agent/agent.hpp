#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dialogos/agent/module.hpp"
#include "dialogos/learning/experience.hpp"

namespace dialogos {

struct ModuleDescriptor {
    std::string type;
    ModuleArgs args = ModuleArgs::object();
};

// Modules in one group all see the same input; their outputs are merged.
using ModuleGroup = std::vector<ModuleDescriptor>;

struct AgentSpec {
    Role role = Role::system;
    std::vector<ModuleGroup> modules;
    TrainSchedule train_schedule;
    std::string experience_log_path;  // empty: no on-disk log
};

class ModuleRegistry {
public:
    using Factory = std::function<std::unique_ptr<ConversationalModule>()>;

    void add(const std::string& type, Factory factory);
    bool contains(const std::string& type) const { return factories_.contains(type); }
    std::unique_ptr<ConversationalModule> create(const std::string& type) const;  // throws AssemblyError
    std::vector<std::string> types() const;

    // Every module type shipped with the platform.
    static const ModuleRegistry& builtin();

private:
    std::map<std::string, Factory> factories_;
};

struct ModuleTrainingEntry {
    std::size_t index = 0;
    std::string type;
    std::size_t episodes = 0;
    std::string error;  // empty on success
};

struct TrainingReport {
    bool scheduled = false;
    std::vector<ModuleTrainingEntry> entries;
};

// Merge rule for the outputs of one group: act lists are concatenated,
// texts joined with a space, custom maps unioned with later modules taking
// precedence. Throws StepError when the outputs disagree on modality.
ConversationalFrame merge_frames(const std::vector<ConversationalFrame>& outputs, Role sender);

// Text form of a frame's payload for logs and transcripts.
std::string frame_utterance(const ConversationalFrame& frame);

class Agent {
public:
    // Throws AssemblyError naming the offending module index.
    static Agent assemble(const AgentSpec& spec, const ModuleEnvironment& env,
                          const ModuleArgs& global_args = ModuleArgs::object(),
                          const ModuleRegistry& registry = ModuleRegistry::builtin());

    Agent(Agent&&) noexcept = default;
    Agent& operator=(Agent&&) noexcept = default;

    Role role() const noexcept { return spec_.role; }
    const AgentSpec& spec() const noexcept { return spec_; }
    std::optional<Modality> input_modality() const noexcept { return input_modality_; }
    std::optional<Modality> output_modality() const noexcept { return output_modality_; }

    void start_dialogue(std::uint64_t dialogue_id, std::uint64_t dialogue_seed);

    // Threads the frame through every group. A module failure throws
    // StepError and marks the dialogue terminal-failed.
    ConversationalFrame step(const ConversationalFrame& input);

    bool failed() const noexcept { return failed_; }
    // The tracked state is terminal, the agent said bye, or a step failed.
    bool is_terminal() const;
    std::optional<DialogueState> tracked_state() const;
    std::optional<bool> judge_success() const;
    const ActList& last_output_acts() const noexcept { return last_acts_; }

    // Closes the episode in the recorder and ends every module's dialogue.
    const Episode& end_dialogue(bool success);
    // Trains every trainable module when the schedule fires.
    TrainingReport maybe_train();
    TrainingReport end_dialogue_and_maybe_train(bool success);

    std::size_t dialogue_count() const noexcept { return dialogue_count_; }
    const DialogueEpisodeRecorder& recorder() const noexcept { return recorder_; }

    std::size_t num_modules() const noexcept { return flat_.size(); }
    ConversationalModule& module(std::size_t index) { return *flat_.at(index); }
    const ConversationalModule& module(std::size_t index) const { return *flat_.at(index); }

    bool has_trainable_modules() const;
    bool parameters_finite() const;
    // Writes every module that has a `save_path` argument.
    void save_models() const;

private:
    Agent(AgentSpec spec, std::uint64_t run_seed);

    AgentSpec spec_;
    std::vector<std::vector<std::unique_ptr<ConversationalModule>>> groups_;
    std::vector<ConversationalModule*> flat_;
    std::optional<Modality> input_modality_;
    std::optional<Modality> output_modality_;
    DialogueEpisodeRecorder recorder_;
    Rng train_rng_;
    std::size_t dialogue_count_ = 0;
    std::uint64_t timestamp_ = 0;
    bool in_dialogue_ = false;
    bool failed_ = false;
    ActList last_acts_;
};

}  // namespace dialogos
