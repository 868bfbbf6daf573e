#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dialogos/agent/agent.hpp"
#include "dialogos/domain/domain_builder.hpp"
#include "dialogos/usersim/simulator.hpp"

namespace dialogos {

struct DialogueRecord {
    std::uint64_t dialogue_id = 0;
    std::size_t turns = 0;
    bool success = false;
    double total_return = 0.0;

    friend bool operator==(const DialogueRecord&, const DialogueRecord&) = default;
};

struct RunStats {
    std::size_t dialogues_run = 0;
    std::size_t success_count = 0;
    std::size_t total_turns = 0;
    double cumulative_reward = 0.0;
    std::vector<DialogueRecord> records;

    void add(const DialogueRecord& record);
    double success_rate() const;
    double average_turns() const;
    double average_return() const;
    // Success rate over records [begin, end).
    double success_rate(std::size_t begin, std::size_t end) const;

    nlohmann::json summary() const;

    friend bool operator==(const RunStats&, const RunStats&) = default;
};

struct TranscriptEntry {
    Role role = Role::user;
    std::string text;  // rendered utterance (act text for acts frames)
    std::string acts;  // serialized acts behind the utterance
    std::optional<DialogueState> state;  // the speaker's tracked state, if any

    friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

using Transcript = std::vector<TranscriptEntry>;

struct RunOptions {
    std::size_t num_dialogues = 1;
    std::size_t max_turns = 30;
    std::uint64_t seed = 0;
    // When set: stats.json and goals.jsonl are written here.
    std::string output_dir;
    bool keep_transcripts = false;
    // Evaluation runs (no trainable module) may be sharded over threads.
    std::size_t workers = 1;
    // Called after each dialogue and its training round, once per agent.
    // Sharded evaluation runs and human text runs do not call it.
    std::function<void(std::size_t dialogue_index, const Agent& agent)> after_dialogue;
};

// Read-only domain shared by every agent and simulator of a run.
struct SharedDomain {
    std::shared_ptr<const Ontology> ontology;
    std::shared_ptr<const ItemDatabase> database;

    static SharedDomain from(Domain domain);
};

struct RunResult {
    std::map<Role, RunStats> stats;
    std::vector<Transcript> transcripts;  // when keep_transcripts
    std::vector<nlohmann::json> goals;    // one per dialogue, simulated users only
};

// A system agent against the agenda-based simulator. The simulator opens
// each dialogue; a dialogue ends when either side is terminal, at
// max_turns (failure) or on a module error (failure). Text-only agents are
// bridged with the slot-filling NLU/NLG on the simulator's side.
RunResult run_single_agent(const AgentSpec& system, const SharedDomain& domain, const ModuleArgs& global_args,
                           const RunOptions& options, const SimProfile& profile = {});

// Two agents, one user and one system role; the user opens. Success is
// judged by the user agent. Throws ConfigError unless exactly one agent of
// each role is given.
RunResult run_multi_agent(const std::vector<AgentSpec>& agents, const SharedDomain& domain, const ModuleArgs& global_args,
                          const RunOptions& options);

// A human typing lines on `in`. "/quit" ends the dialogue as a failure; a
// closed stream ends it and the run. Agent replies go to `out`.
RunResult run_human_text(const AgentSpec& system, const SharedDomain& domain, const ModuleArgs& global_args,
                         const RunOptions& options, std::istream& in, std::ostream& out);

nlohmann::json goal_to_json(std::uint64_t dialogue_id, const UserGoal& goal, bool success);

}  // namespace dialogos
