#include "dialogos/app/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <random>
#include <regex>
#include <set>

#include <yaml-cpp/yaml.h>

#include "dialogos/common/errors.hpp"

namespace dialogos::app {

namespace fs = std::filesystem;

std::string_view to_string(InteractionMode mode) {
    switch (mode) {
        case InteractionMode::simulation: return "simulation";
        case InteractionMode::text: return "text";
        case InteractionMode::multi_agent: return "multi_agent";
        case InteractionMode::serve: return "serve";
    }
    return "simulation";
}

LoadOptions LoadOptions::from_environment(Command command) {
    LoadOptions options;
    options.command = command;
    if (const char* dir = std::getenv("DIALOGOS_LOG_DIR"); dir && *dir) options.log_dir = dir;
    return options;
}

namespace {

const std::set<std::string> kGeneralKeys = {"interaction_mode", "num_agents", "experience_log_dir", "seed",
                                            "global_arguments", "host", "port", "session_ttl_minutes"};
const std::set<std::string> kDialogueKeys = {"num_dialogues",   "max_turns",        "workers",
                                             "ontology_path",   "db_path",          "user_simulator",
                                             "csv_path",        "table_name",       "informable_slots",
                                             "requestable_slots", "system_requestable_slots", "dstc2_path"};
const std::set<std::string> kSimulatorKeys = {"patience", "pop_one"};
const std::set<std::string> kAgentKeys = {"role", "modules", "train_schedule", "log_experience"};
const std::set<std::string> kScheduleKeys = {"train_every_n_dialogues", "epochs", "experience_pool_size",
                                             "minibatch_size"};

// YAML scalars become JSON booleans, integers or reals when they parse as
// such; quoted scalars always stay strings.
ModuleArgs to_json(const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Null:
        case YAML::NodeType::Undefined: return nullptr;
        case YAML::NodeType::Sequence: {
            auto out = ModuleArgs::array();
            for (const auto& item : node) out.push_back(to_json(item));
            return out;
        }
        case YAML::NodeType::Map: {
            auto out = ModuleArgs::object();
            for (const auto& kv : node) out[kv.first.as<std::string>()] = to_json(kv.second);
            return out;
        }
        case YAML::NodeType::Scalar: break;
    }
    const auto text = node.Scalar();
    if (node.Tag() == "!") return text;
    bool b = false;
    if (YAML::convert<bool>::decode(node, b)) return b;
    std::int64_t i = 0;
    if (YAML::convert<std::int64_t>::decode(node, i)) return i;
    double d = 0.0;
    if (YAML::convert<double>::decode(node, d)) return d;
    return text;
}

class Loader {
public:
    Loader(const std::string& path, const LoadOptions& options)
        : options_(options), base_(fs::absolute(path).parent_path()) {
        config_.path = path;
    }

    AppConfig load(const YAML::Node& root) {
        if (!root.IsMap()) {
            problem("the top level must be a map of sections");
            finish();
        }
        std::map<std::size_t, YAML::Node> agents;
        const std::regex agent_re("AGENT_(0|[1-9][0-9]*)");
        for (const auto& kv : root) {
            const auto name = kv.first.as<std::string>();
            std::smatch m;
            if (name == "GENERAL" || name == "DIALOGUE") continue;
            if (std::regex_match(name, m, agent_re)) {
                agents.emplace(std::stoul(m[1].str()), kv.second);
                continue;
            }
            unknown("unknown section " + name);
        }
        const auto general = section(root, "GENERAL");
        const auto dialogue = section(root, "DIALOGUE");
        if (general) read_general(*general, agents.size());
        if (dialogue) read_dialogue(*dialogue);
        read_agents(agents);
        if (general) check_mode(agents.size());
        finish();
        return std::move(config_);
    }

private:
    // --- bookkeeping -------------------------------------------------------

    void problem(std::string text) { problems_.push_back(std::move(text)); }

    void unknown(std::string text) {
        if (options_.strict)
            problem(std::move(text));
        else
            config_.warnings.push_back(std::move(text));
    }

    void finish() {
        if (!problems_.empty()) throw ConfigError(problems_);
    }

    void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.contains(key)) unknown("unknown key " + where + "." + key);
        }
    }

    std::optional<YAML::Node> section(const YAML::Node& root, const std::string& name) {
        const auto node = root[name];
        if (!node) {
            problem(name + " section missing");
            return std::nullopt;
        }
        if (node.IsNull()) return YAML::Node(YAML::NodeType::Map);
        if (!node.IsMap()) {
            problem(name + " must be a map");
            return std::nullopt;
        }
        return node;
    }

    bool needs_domain() const { return options_.command == Command::run || options_.command == Command::serve; }

    // --- typed fields --------------------------------------------------------

    std::optional<std::string> string_field(const YAML::Node& node, const std::string& key, const std::string& where) {
        const auto v = node[key];
        if (!v || v.IsNull()) return std::nullopt;
        if (!v.IsScalar()) {
            problem(where + "." + key + " must be a string");
            return std::nullopt;
        }
        return v.Scalar();
    }

    template <typename T>
    std::optional<T> number_field(const YAML::Node& node, const std::string& key, const std::string& where) {
        const auto v = node[key];
        if (!v || v.IsNull()) return std::nullopt;
        T out{};
        if (!v.IsScalar() || !YAML::convert<T>::decode(v, out)) {
            problem(where + "." + key + " must be a number");
            return std::nullopt;
        }
        return out;
    }

    std::optional<std::size_t> count_field(const YAML::Node& node, const std::string& key, const std::string& where,
                                           std::int64_t min) {
        const auto v = number_field<std::int64_t>(node, key, where);
        if (!v) return std::nullopt;
        if (*v < min) {
            problem(where + "." + key + " must be at least " + std::to_string(min));
            return std::nullopt;
        }
        return static_cast<std::size_t>(*v);
    }

    std::vector<std::string> list_field(const YAML::Node& node, const std::string& key, const std::string& where) {
        std::vector<std::string> out;
        const auto v = node[key];
        if (!v || v.IsNull()) return out;
        if (!v.IsSequence()) {
            problem(where + "." + key + " must be a list");
            return out;
        }
        for (const auto& item : v) {
            if (!item.IsScalar()) {
                problem(where + "." + key + " must hold strings");
                return {};
            }
            out.push_back(item.Scalar());
        }
        return out;
    }

    std::string resolve(const std::string& p) const {
        const fs::path path(p);
        return (path.is_absolute() ? path : base_ / path).lexically_normal().string();
    }

    // Resolved path; with `must_exist` a missing target is a problem.
    std::string path_field(const YAML::Node& node, const std::string& key, const std::string& where, bool required,
                           bool must_exist) {
        const auto v = string_field(node, key, where);
        if (!v || v->empty()) {
            if (required) problem(where + "." + key + " required");
            return {};
        }
        auto resolved = resolve(*v);
        if (must_exist && !fs::exists(resolved)) problem(where + "." + key + " not found: " + resolved);
        return resolved;
    }

    // --- sections --------------------------------------------------------------

    void read_general(const YAML::Node& g, std::size_t agent_sections) {
        check_keys(g, "GENERAL", kGeneralKeys);
        if (const auto mode = string_field(g, "interaction_mode", "GENERAL")) {
            if (*mode == "simulation") config_.mode = InteractionMode::simulation;
            else if (*mode == "text") config_.mode = InteractionMode::text;
            else if (*mode == "multi_agent") config_.mode = InteractionMode::multi_agent;
            else if (*mode == "serve") config_.mode = InteractionMode::serve;
            else problem("GENERAL.interaction_mode must be simulation, text, multi_agent or serve, not " + *mode);
            mode_given_ = *mode == to_string(config_.mode);
        } else if (needs_domain()) {
            problem("GENERAL.interaction_mode required");
        }

        config_.num_agents = agent_sections;
        if (const auto n = count_field(g, "num_agents", "GENERAL", 0)) {
            if (*n != agent_sections)
                problem("GENERAL.num_agents is " + std::to_string(*n) + " but " + std::to_string(agent_sections) +
                        " AGENT sections are defined");
            config_.num_agents = *n;
        }

        if (options_.log_dir)
            config_.experience_log_dir = fs::absolute(*options_.log_dir).lexically_normal().string();
        else
            config_.experience_log_dir = path_field(g, "experience_log_dir", "GENERAL", false, false);

        if (options_.seed) {
            config_.seed = *options_.seed;
        } else if (const auto seed = number_field<std::uint64_t>(g, "seed", "GENERAL")) {
            config_.seed = *seed;
        } else if (!g["seed"] || g["seed"].IsNull()) {
            config_.seed = std::random_device{}();
            config_.seed_was_random = true;
        }

        if (const auto args = g["global_arguments"]; args && !args.IsNull()) {
            if (args.IsMap())
                config_.global_args = to_json(args);
            else
                problem("GENERAL.global_arguments must be a map");
        }

        if (const auto host = string_field(g, "host", "GENERAL")) config_.service.host = *host;
        if (const auto port = number_field<int>(g, "port", "GENERAL")) {
            if (*port < 0 || *port > 65535)
                problem("GENERAL.port must lie in [0, 65535]");
            else
                config_.service.port = *port;
        }
        if (const auto ttl = number_field<double>(g, "session_ttl_minutes", "GENERAL")) {
            if (!(*ttl > 0.0))
                problem("GENERAL.session_ttl_minutes must be positive");
            else
                config_.service.session_ttl_minutes = *ttl;
        }

        if (options_.command == Command::parse && config_.experience_log_dir.empty())
            problem("GENERAL.experience_log_dir required");
    }

    void read_dialogue(const YAML::Node& d) {
        check_keys(d, "DIALOGUE", kDialogueKeys);
        if (const auto n = count_field(d, "num_dialogues", "DIALOGUE", 0)) config_.num_dialogues = *n;
        if (const auto n = count_field(d, "max_turns", "DIALOGUE", 1)) config_.max_turns = *n;
        if (const auto n = count_field(d, "workers", "DIALOGUE", 1)) config_.workers = *n;

        switch (options_.command) {
            case Command::run:
            case Command::serve:
                config_.ontology_path = path_field(d, "ontology_path", "DIALOGUE", true, true);
                config_.db_path = path_field(d, "db_path", "DIALOGUE", true, true);
                break;
            case Command::domain: read_domain_build(d); break;
            case Command::parse:
                config_.dstc2_path = path_field(d, "dstc2_path", "DIALOGUE", true, true);
                config_.ontology_path = path_field(d, "ontology_path", "DIALOGUE", false, true);
                break;
        }

        if (const auto sim = d["user_simulator"]; sim && !sim.IsNull()) {
            if (!sim.IsMap()) {
                problem("DIALOGUE.user_simulator must be a map");
            } else {
                check_keys(sim, "DIALOGUE.user_simulator", kSimulatorKeys);
                if (const auto p = count_field(sim, "patience", "DIALOGUE.user_simulator", 1))
                    config_.user_simulator.patience = *p;
                if (const auto p = number_field<double>(sim, "pop_one", "DIALOGUE.user_simulator")) {
                    config_.user_simulator.pop_one = *p;
                    try {
                        config_.user_simulator.validate();
                    } catch (const ValidationError& e) {
                        problem(std::string("DIALOGUE.user_simulator: ") + e.what());
                    }
                }
            }
        }
    }

    void read_domain_build(const YAML::Node& d) {
        auto& b = config_.domain_build;
        b.csv_path = path_field(d, "csv_path", "DIALOGUE", true, true);
        b.table_name = string_field(d, "table_name", "DIALOGUE").value_or(fs::path(b.csv_path).stem().string());
        b.informable_columns = list_field(d, "informable_slots", "DIALOGUE");
        b.requestable_columns = list_field(d, "requestable_slots", "DIALOGUE");
        b.system_requestable_columns = list_field(d, "system_requestable_slots", "DIALOGUE");
        if (b.informable_columns.empty()) problem("DIALOGUE.informable_slots required");
        b.ontology_path = path_field(d, "ontology_path", "DIALOGUE", false, false);
        b.db_path = path_field(d, "db_path", "DIALOGUE", false, false);
        if (b.ontology_path.empty() && b.db_path.empty())
            problem("DIALOGUE.ontology_path or DIALOGUE.db_path required");
    }

    void read_agents(const std::map<std::size_t, YAML::Node>& agents) {
        std::size_t expected = 0;
        for (const auto& [index, node] : agents) {
            if (index != expected) {
                problem("AGENT_" + std::to_string(expected) + " section missing (AGENT sections are numbered from 0)");
                expected = index;
            }
            ++expected;
            config_.agents.push_back(read_agent(index, node));
        }
    }

    AgentSpec read_agent(std::size_t index, const YAML::Node& node) {
        const auto where = "AGENT_" + std::to_string(index);
        AgentSpec spec;
        if (!node.IsMap()) {
            problem(where + " must be a map");
            return spec;
        }
        check_keys(node, where, kAgentKeys);

        if (const auto role = string_field(node, "role", where)) {
            try {
                spec.role = parse_role(*role);
            } catch (const ValidationError&) {
                problem(where + ".role must be system or user, not " + *role);
            }
        } else {
            problem(where + ".role required");
        }

        const auto modules = node["modules"];
        if (!modules || modules.IsNull() || (modules.IsSequence() && modules.size() == 0)) {
            problem(where + ".modules required");
        } else if (!modules.IsSequence()) {
            problem(where + ".modules must be a list");
        } else {
            for (std::size_t i = 0; i < modules.size(); ++i) {
                const auto at = where + ".modules[" + std::to_string(i) + "]";
                ModuleGroup group;
                if (modules[i].IsSequence()) {
                    for (std::size_t j = 0; j < modules[i].size(); ++j)
                        if (auto d = read_module(modules[i][j], at + "[" + std::to_string(j) + "]")) group.push_back(*d);
                    if (modules[i].size() == 0) problem(at + " is an empty group");
                } else if (auto d = read_module(modules[i], at)) {
                    group.push_back(*d);
                }
                if (!group.empty()) spec.modules.push_back(std::move(group));
            }
        }

        if (const auto sched = node["train_schedule"]; sched && !sched.IsNull()) {
            if (!sched.IsMap()) {
                problem(where + ".train_schedule must be a map");
            } else {
                const auto at = where + ".train_schedule";
                check_keys(sched, at, kScheduleKeys);
                auto& s = spec.train_schedule;
                if (const auto v = count_field(sched, "train_every_n_dialogues", at, 1)) s.train_every_n_dialogues = *v;
                if (const auto v = count_field(sched, "epochs", at, 1)) s.epochs = *v;
                if (const auto v = count_field(sched, "experience_pool_size", at, 1)) s.experience_pool_size = *v;
                if (const auto v = count_field(sched, "minibatch_size", at, 1)) s.minibatch_size = *v;
                try {
                    s.validate();
                } catch (const ValidationError& e) {
                    problem(at + ": " + e.what());
                }
            }
        }

        bool log = true;
        if (const auto v = node["log_experience"]; v && !v.IsNull() && !YAML::convert<bool>::decode(v, log))
            problem(where + ".log_experience must be true or false");
        if (log && !config_.experience_log_dir.empty())
            spec.experience_log_path = (fs::path(config_.experience_log_dir) /
                                        (std::string(to_string(spec.role)) + "_" + std::to_string(index) +
                                         "_experience.csv"))
                                           .string();
        return spec;
    }

    std::optional<ModuleDescriptor> read_module(const YAML::Node& node, const std::string& where) {
        ModuleDescriptor desc;
        if (node.IsScalar()) {
            desc.type = node.Scalar();
        } else if (node.IsMap()) {
            auto args = to_json(node);
            if (!args.contains("type") || !args["type"].is_string()) {
                problem(where + ".type required");
                return std::nullopt;
            }
            desc.type = args["type"].get<std::string>();
            args.erase("type");
            desc.args = std::move(args);
        } else {
            problem(where + " must be a module type or a map with a type");
            return std::nullopt;
        }
        if (!ModuleRegistry::builtin().contains(desc.type)) {
            problem(where + ": unknown module type " + desc.type);
            return std::nullopt;
        }
        for (auto& [key, value] : desc.args.items()) {
            if (!value.is_string() || key.size() < 5 || key.compare(key.size() - 5, 5, "_path") != 0) continue;
            value = resolve(value.get<std::string>());
            if ((key == "model_path" || key == "templates_path") && !fs::exists(value.get<std::string>()))
                problem(where + "." + key + " not found: " + value.get<std::string>());
        }
        desc.args = merge_args(config_.global_args, desc.args);
        return desc;
    }

    void check_mode(std::size_t agent_sections) {
        if (!needs_domain() || !mode_given_) return;
        const auto mode = config_.mode;
        if (options_.command == Command::run && mode == InteractionMode::serve)
            problem("GENERAL.interaction_mode serve belongs to the serve sub-command");
        if (options_.command == Command::serve && mode != InteractionMode::serve && mode != InteractionMode::text)
            problem("GENERAL.interaction_mode must be serve or text for the serve sub-command");
        if (mode == InteractionMode::multi_agent) {
            if (agent_sections != 2) {
                problem("multi_agent mode needs exactly 2 agents, found " + std::to_string(agent_sections));
                return;
            }
            if (config_.agents.size() == 2 && config_.agents[0].role == config_.agents[1].role)
                problem("role mismatch: multi_agent mode needs one user and one system agent");
            return;
        }
        if (agent_sections != 1) {
            problem(std::string(to_string(mode)) + " mode needs exactly 1 agent, found " +
                    std::to_string(agent_sections));
            return;
        }
        if (!config_.agents.empty() && config_.agents[0].role != Role::system && mode != InteractionMode::text)
            problem("role mismatch: " + std::string(to_string(mode)) + " mode needs AGENT_0.role system");
    }

    LoadOptions options_;
    fs::path base_;
    AppConfig config_;
    std::vector<std::string> problems_;
    bool mode_given_ = false;
};

}  // namespace

AppConfig load_config(const std::string& path, const LoadOptions& options) {
    if (!fs::is_regular_file(path)) throw ConfigError({"config file not found: " + path});
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw ConfigError({"cannot parse " + path + ": " + e.what()});
    }
    return Loader(path, options).load(root);
}

}  // namespace dialogos::app
