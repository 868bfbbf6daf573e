#include "dialogos/controller/controller.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "dialogos/common/errors.hpp"
#include "dialogos/common/text.hpp"
#include "dialogos/slotfill/nlg.hpp"
#include "dialogos/slotfill/nlu.hpp"
#include "dialogos/usersim/user_module.hpp"

namespace dialogos {

// --- stats --------------------------------------------------------------------

void RunStats::add(const DialogueRecord& record) {
    ++dialogues_run;
    if (record.success) ++success_count;
    total_turns += record.turns;
    cumulative_reward += record.total_return;
    records.push_back(record);
}

double RunStats::success_rate() const {
    return dialogues_run == 0 ? 0.0 : static_cast<double>(success_count) / static_cast<double>(dialogues_run);
}

double RunStats::average_turns() const {
    return dialogues_run == 0 ? 0.0 : static_cast<double>(total_turns) / static_cast<double>(dialogues_run);
}

double RunStats::average_return() const {
    return dialogues_run == 0 ? 0.0 : cumulative_reward / static_cast<double>(dialogues_run);
}

double RunStats::success_rate(std::size_t begin, std::size_t end) const {
    end = std::min(end, records.size());
    if (begin >= end) return 0.0;
    const auto wins = std::count_if(records.begin() + static_cast<std::ptrdiff_t>(begin),
                                    records.begin() + static_cast<std::ptrdiff_t>(end),
                                    [](const DialogueRecord& r) { return r.success; });
    return static_cast<double>(wins) / static_cast<double>(end - begin);
}

nlohmann::json RunStats::summary() const {
    return {{"dialogues", dialogues_run},
            {"success_count", success_count},
            {"success_rate", success_rate()},
            {"total_turns", total_turns},
            {"avg_turns", average_turns()},
            {"cumulative_reward", cumulative_reward},
            {"avg_return", average_return()}};
}

nlohmann::json goal_to_json(std::uint64_t dialogue_id, const UserGoal& goal, bool success) {
    return {{"dialogue_id", dialogue_id},
            {"constraints", goal.constraints},
            {"requests", goal.requests},
            {"received", goal.received},
            {"offers", goal.offers},
            {"success", success}};
}

SharedDomain SharedDomain::from(Domain domain) {
    return {std::make_shared<const Ontology>(std::move(domain.ontology)),
            std::make_shared<const ItemDatabase>(std::move(domain.database))};
}

namespace {

ModuleEnvironment environment(const SharedDomain& domain, Role role, std::uint64_t seed) {
    return ModuleEnvironment{domain.ontology, domain.database, role, seed};
}

void require_domain(const SharedDomain& domain) {
    if (!domain.ontology || !domain.database) throw ConfigError({"a domain (ontology and database) is required"});
}

ConversationalFrame empty_frame(std::optional<Modality> modality, Role sender) {
    if (modality == Modality::text) return ConversationalFrame::from_text("", sender);
    if (modality == Modality::custom)
        throw ConfigError({"an agent that opens the dialogue cannot take custom frames as input"});
    return ConversationalFrame::from_acts({}, sender);
}

TranscriptEntry entry_for(Role role, const ConversationalFrame& frame, const ActList& acts,
                          std::optional<DialogueState> state) {
    return TranscriptEntry{role, frame_utterance(frame), serialize_acts(acts), std::move(state)};
}

bool said_bye(const ActList& acts) {
    return std::any_of(acts.begin(), acts.end(), [](const DialogueAct& a) { return text::to_lower(a.intent) == "bye"; });
}

struct DialogueOutcome {
    DialogueRecord record;
    Transcript transcript;
    std::optional<nlohmann::json> goal;
    std::map<Role, Episode> episodes;
};

void write_outputs(const RunOptions& options, const RunResult& result) {
    if (options.output_dir.empty()) return;
    try {
        std::filesystem::create_directories(options.output_dir);
        nlohmann::json stats = nlohmann::json::object();
        for (const auto& [role, s] : result.stats) stats[std::string(to_string(role))] = s.summary();
        stats["seed"] = options.seed;
        std::ofstream(std::filesystem::path(options.output_dir) / "stats.json") << stats.dump(2) << '\n';
        if (!result.goals.empty()) {
            std::ofstream goals(std::filesystem::path(options.output_dir) / "goals.jsonl");
            for (const auto& g : result.goals) goals << g.dump() << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "warning: cannot write run outputs to " << options.output_dir << ": " << e.what() << '\n';
    }
}

// --- single agent vs. simulator ----------------------------------------------

class SimulatedUser {
public:
    SimulatedUser(const SharedDomain& domain, const SimProfile& profile, std::optional<Modality> system_in,
                  std::optional<Modality> system_out)
        : sim_(domain.ontology, domain.database, profile),
          speak_text_(system_in == Modality::text),
          hear_text_(system_out == Modality::text),
          templates_(TemplateTable::user_defaults()),
          nlu_(*domain.ontology, domain.database.get()) {
        if (system_in == Modality::custom || system_out == Modality::custom)
            throw ConfigError({"the system agent must take and produce acts or text to talk to the simulator"});
    }

    AgendaSimulator& sim() { return sim_; }

    ConversationalFrame frame(const ActList& acts) const {
        return speak_text_ ? ConversationalFrame::from_text(nlg_generate(acts, templates_), Role::user)
                           : ConversationalFrame::from_acts(acts, Role::user);
    }

    ActList hear(const ConversationalFrame& frame) const {
        if (frame.has_acts()) return frame.acts();
        if (frame.has_text() && hear_text_) return nlu_.understand(frame.text());
        return {};
    }

private:
    AgendaSimulator sim_;
    bool speak_text_;
    bool hear_text_;
    TemplateTable templates_;
    SlotFillingNlu nlu_;
};

DialogueOutcome run_simulated_dialogue(Agent& agent, SimulatedUser& user, std::uint64_t id,
                                       const RunOptions& options) {
    const auto seed = dialogue_seed(options.seed, id);
    DialogueOutcome out;
    out.record.dialogue_id = id;
    agent.start_dialogue(id, seed);
    auto& sim = user.sim();
    sim.start(seed);

    bool finished = false;
    std::size_t turns = 0;
    try {
        while (turns < options.max_turns) {
            const auto user_acts = sim.respond();
            const auto user_frame = user.frame(user_acts);
            if (options.keep_transcripts)
                out.transcript.push_back(entry_for(Role::user, user_frame, user_acts, sim.user_view()));
            const auto reply = agent.step(user_frame);
            ++turns;
            if (options.keep_transcripts)
                out.transcript.push_back(entry_for(Role::system, reply, agent.last_output_acts(), agent.tracked_state()));
            if (agent.is_terminal() || sim.said_bye()) {
                finished = !agent.failed();
                break;
            }
            sim.receive(user.hear(reply));
        }
    } catch (const StepError& e) {
        ++turns;
        std::cerr << "warning: dialogue " << id << ": " << e.what() << '\n';
    }
    const bool success = finished && sim.success();
    out.record.turns = turns;
    out.record.success = success;
    const auto& episode = agent.end_dialogue(success);
    out.record.total_return = episode.total_return();
    out.episodes[Role::system] = episode;
    out.goal = goal_to_json(id, sim.goal(), success);
    return out;
}

AgentSpec without_log(AgentSpec spec) {
    spec.experience_log_path.clear();
    return spec;
}

}  // namespace

RunResult run_single_agent(const AgentSpec& system, const SharedDomain& domain, const ModuleArgs& global_args,
                           const RunOptions& options, const SimProfile& profile) {
    require_domain(domain);
    if (system.role != Role::system) throw ConfigError({"the simulated user needs an agent with role system"});
    profile.validate();

    RunResult result;
    auto& stats = result.stats[Role::system];
    auto agent = Agent::assemble(system, environment(domain, Role::system, options.seed), global_args);
    std::vector<DialogueOutcome> outcomes(options.num_dialogues);

    const auto workers = std::min<std::size_t>(std::max<std::size_t>(options.workers, 1), options.num_dialogues);
    if (workers > 1 && !agent.has_trainable_modules()) {
        // Frozen agents: shard dialogues over threads, one agent each, and
        // log episodes afterwards in dialogue order.
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    auto local = Agent::assemble(without_log(system), environment(domain, Role::system, options.seed),
                                                 global_args);
                    SimulatedUser user(domain, profile, local.input_modality(), local.output_modality());
                    for (std::size_t i = w; i < options.num_dialogues; i += workers)
                        outcomes[i] = run_simulated_dialogue(local, user, i, options);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
        DialogueEpisodeRecorder log(system.train_schedule.experience_pool_size, system.experience_log_path);
        for (const auto& o : outcomes) log.record_episode(o.episodes.at(Role::system));
    } else {
        SimulatedUser user(domain, profile, agent.input_modality(), agent.output_modality());
        for (std::size_t i = 0; i < options.num_dialogues; ++i) {
            outcomes[i] = run_simulated_dialogue(agent, user, i, options);
            for (const auto& entry : agent.maybe_train().entries)
                if (!entry.error.empty())
                    std::cerr << "warning: training module " << entry.index << " (" << entry.type
                              << ") failed: " << entry.error << '\n';
            if (options.after_dialogue) options.after_dialogue(i, agent);
        }
        agent.save_models();
    }

    for (auto& o : outcomes) {
        stats.add(o.record);
        if (o.goal) result.goals.push_back(std::move(*o.goal));
        if (options.keep_transcripts) result.transcripts.push_back(std::move(o.transcript));
    }
    write_outputs(options, result);
    return result;
}

// --- two agents -----------------------------------------------------------------

RunResult run_multi_agent(const std::vector<AgentSpec>& agents, const SharedDomain& domain, const ModuleArgs& global_args,
                          const RunOptions& options) {
    require_domain(domain);
    if (agents.size() != 2)
        throw ConfigError({"multi-agent runs need exactly two agents, got " + std::to_string(agents.size()) +
                           " (more than two is not supported by this controller)"});
    const auto user_it = std::find_if(agents.begin(), agents.end(), [](const AgentSpec& a) { return a.role == Role::user; });
    const auto system_it =
        std::find_if(agents.begin(), agents.end(), [](const AgentSpec& a) { return a.role == Role::system; });
    if (user_it == agents.end() || system_it == agents.end())
        throw ConfigError({"multi-agent runs need one agent with role user and one with role system"});

    auto user = Agent::assemble(*user_it, environment(domain, Role::user, options.seed), global_args);
    auto system = Agent::assemble(*system_it, environment(domain, Role::system, options.seed), global_args);
    if (user.output_modality() != system.input_modality() || system.output_modality() != user.input_modality())
        throw ConfigError({"the agents' input and output modalities do not match"});

    const AgendaBasedUsModule* user_sim = nullptr;
    for (std::size_t i = 0; i < user.num_modules() && !user_sim; ++i)
        user_sim = dynamic_cast<const AgendaBasedUsModule*>(&user.module(i));

    RunResult result;
    auto& user_stats = result.stats[Role::user];
    auto& system_stats = result.stats[Role::system];

    for (std::size_t i = 0; i < options.num_dialogues; ++i) {
        const auto seed = dialogue_seed(options.seed, i);
        user.start_dialogue(i, seed);
        system.start_dialogue(i, seed);
        Transcript transcript;
        auto incoming = empty_frame(user.input_modality(), Role::system);
        bool finished = false;
        std::size_t turns = 0;
        try {
            while (turns < options.max_turns) {
                const auto said = user.step(incoming);
                if (options.keep_transcripts)
                    transcript.push_back(entry_for(Role::user, said, user.last_output_acts(), user.tracked_state()));
                const auto reply = system.step(said);
                ++turns;
                if (options.keep_transcripts)
                    transcript.push_back(
                        entry_for(Role::system, reply, system.last_output_acts(), system.tracked_state()));
                if (system.is_terminal() || user.is_terminal() || said_bye(user.last_output_acts())) {
                    finished = !system.failed() && !user.failed();
                    break;
                }
                incoming = reply;
            }
        } catch (const StepError& e) {
            ++turns;
            std::cerr << "warning: dialogue " << i << ": " << e.what() << '\n';
        }
        const bool success = finished && user.judge_success().value_or(false);
        const auto user_return = user.end_dialogue(success).total_return();
        const auto system_return = system.end_dialogue(success).total_return();
        user_stats.add({i, turns, success, user_return});
        system_stats.add({i, turns, success, system_return});
        if (user_sim) result.goals.push_back(goal_to_json(i, user_sim->simulator().goal(), success));
        if (options.keep_transcripts) result.transcripts.push_back(std::move(transcript));

        for (auto* agent : {&user, &system})
            for (const auto& entry : agent->maybe_train().entries)
                if (!entry.error.empty())
                    std::cerr << "warning: training " << to_string(agent->role()) << " module " << entry.index
                              << " (" << entry.type << ") failed: " << entry.error << '\n';
        if (options.after_dialogue) {
            options.after_dialogue(i, user);
            options.after_dialogue(i, system);
        }
    }
    user.save_models();
    system.save_models();
    write_outputs(options, result);
    return result;
}

// --- human at a terminal ------------------------------------------------------------

RunResult run_human_text(const AgentSpec& system, const SharedDomain& domain, const ModuleArgs& global_args,
                         const RunOptions& options, std::istream& in, std::ostream& out) {
    require_domain(domain);
    auto agent = Agent::assemble(system, environment(domain, system.role, options.seed), global_args);
    const bool text_in = agent.input_modality() != Modality::acts;
    if (agent.input_modality() == Modality::custom)
        throw ConfigError({"an agent talking to a human must take text or acts as input"});

    RunResult result;
    auto& stats = result.stats[system.role];
    const Role human = system.role == Role::system ? Role::user : Role::system;
    bool closed = false;
    for (std::size_t i = 0; i < options.num_dialogues && !closed; ++i) {
        agent.start_dialogue(i, dialogue_seed(options.seed, i));
        Transcript transcript;
        bool finished = false;
        std::size_t turns = 0;
        try {
            while (turns < options.max_turns) {
                out << "> " << std::flush;
                std::string line;
                if (!std::getline(in, line)) {
                    closed = true;
                    break;
                }
                const auto trimmed = std::string(text::trim(line));
                if (trimmed == "/quit") break;
                ConversationalFrame frame = text_in ? ConversationalFrame::from_text(trimmed, human)
                                                    : ConversationalFrame::from_acts(deserialize_acts(trimmed), human);
                if (options.keep_transcripts)
                    transcript.push_back(TranscriptEntry{human, trimmed, text_in ? "" : serialize_acts(frame.acts()), {}});
                const auto reply = agent.step(frame);
                ++turns;
                out << frame_utterance(reply) << '\n';
                if (options.keep_transcripts)
                    transcript.push_back(entry_for(system.role, reply, agent.last_output_acts(), agent.tracked_state()));
                if (agent.is_terminal()) {
                    finished = !agent.failed();
                    break;
                }
            }
        } catch (const StepError& e) {
            ++turns;
            out << "error: " << e.what() << '\n';
        } catch (const ParseError& e) {
            ++turns;
            out << "error: " << e.what() << '\n';
        }
        // Without a user goal, a dialogue that closed itself counts as a success.
        const bool success = finished && agent.judge_success().value_or(true);
        const auto& episode = agent.end_dialogue(success);
        stats.add({i, turns, success, episode.total_return()});
        if (options.keep_transcripts) result.transcripts.push_back(std::move(transcript));
        agent.maybe_train();
    }
    agent.save_models();
    write_outputs(options, result);
    return result;
}

}  // namespace dialogos
