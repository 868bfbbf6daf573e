#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dialogos/agent/agent.hpp"
#include "dialogos/domain/domain_builder.hpp"
#include "dialogos/usersim/simulator.hpp"

namespace dialogos::app {

// Configuration schema. Top-level sections are exactly GENERAL, DIALOGUE
// and AGENT_0 .. AGENT_{n-1}. Relative paths resolve against the directory
// of the config file.
//
// GENERAL
//   interaction_mode     simulation | text | multi_agent | serve
//   num_agents           number of AGENT_i sections
//   experience_log_dir   stats, goals and per-agent experience logs
//   seed                 run seed; drawn at random and reported when absent
//   global_arguments     map merged under every module's arguments
//   host, port           serve only (defaults 127.0.0.1, 8080)
//   session_ttl_minutes  serve only (default 30)
//
// DIALOGUE
//   num_dialogues, max_turns (default 30), workers
//   ontology_path, db_path
//   user_simulator       {patience, pop_one}
//   For the domain sub-command: csv_path, table_name, informable_slots,
//   requestable_slots, system_requestable_slots; ontology_path and db_path
//   are then outputs.
//   For the parse sub-command: dstc2_path; ontology_path is optional.
//
// AGENT_i
//   role                 system | user
//   modules              list; an entry is a module type, a map with `type`
//                        and its arguments, or a list of those (a group
//                        whose members run on the same input)
//   train_schedule       {train_every_n_dialogues, epochs,
//                         experience_pool_size, minibatch_size}
//   log_experience       write <experience_log_dir>/<role>_<i>_experience.csv
//                        (default true when experience_log_dir is set)

enum class Command { run, serve, domain, parse };

enum class InteractionMode { simulation, text, multi_agent, serve };

std::string_view to_string(InteractionMode mode);

struct ServiceSettings {
    std::string host = "127.0.0.1";
    int port = 8080;
    double session_ttl_minutes = 30.0;
};

struct AppConfig {
    std::string path;
    InteractionMode mode = InteractionMode::simulation;
    std::size_t num_agents = 0;
    std::string experience_log_dir;
    std::uint64_t seed = 0;
    bool seed_was_random = false;
    ModuleArgs global_args = ModuleArgs::object();
    ServiceSettings service;

    std::size_t num_dialogues = 1;
    std::size_t max_turns = 30;
    std::size_t workers = 1;
    std::string ontology_path;
    std::string db_path;
    SimProfile user_simulator;

    DomainBuildSpec domain_build;  // domain sub-command
    std::string dstc2_path;        // parse sub-command

    std::vector<AgentSpec> agents;  // in AGENT_i order, global arguments merged in
    std::vector<std::string> warnings;
};

struct LoadOptions {
    Command command = Command::run;
    bool strict = true;  // unknown keys are errors; warnings otherwise
    std::optional<std::uint64_t> seed;
    std::optional<std::string> log_dir;

    // log_dir taken from DIALOGOS_LOG_DIR when set.
    static LoadOptions from_environment(Command command);
};

// Throws ConfigError listing every problem found.
AppConfig load_config(const std::string& path, const LoadOptions& options = {});

}  // namespace dialogos::app
