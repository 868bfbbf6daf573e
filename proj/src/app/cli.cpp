#include "dialogos/app/cli.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "dialogos/app/config.hpp"
#include "dialogos/app/service.hpp"
#include "dialogos/common/errors.hpp"
#include "dialogos/controller/controller.hpp"
#include "dialogos/dstc2/dstc2.hpp"

namespace dialogos::app {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_shutdown{false};
std::atomic<int> g_port{0};

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool lax = false;
};

AppConfig load(const CommonFlags& flags, Command command, std::ostream& out, std::ostream& err) {
    auto options = LoadOptions::from_environment(command);
    options.strict = !flags.lax;
    options.seed = flags.seed;
    auto config = load_config(flags.config, options);
    for (const auto& w : config.warnings) err << "warning: " << w << '\n';
    if (command == Command::run || command == Command::serve)
        out << "seed: " << config.seed << (config.seed_was_random ? " (random)" : "") << '\n';
    return config;
}

SharedDomain load_shared_domain(const AppConfig& config) {
    return SharedDomain::from(load_domain(config.ontology_path, config.db_path));
}

void print_stats(const RunResult& result, std::uint64_t seed, std::ostream& out) {
    auto json = nlohmann::json::object();
    for (const auto& [role, stats] : result.stats) json[std::string(to_string(role))] = stats.summary();
    json["seed"] = seed;
    out << json.dump(2) << '\n';
}

int cmd_run(const CommonFlags& flags, std::istream& in, std::ostream& out, std::ostream& err) {
    const auto config = load(flags, Command::run, out, err);
    const auto domain = load_shared_domain(config);
    RunOptions options;
    options.num_dialogues = config.num_dialogues;
    options.max_turns = config.max_turns;
    options.seed = config.seed;
    options.output_dir = config.experience_log_dir;
    options.workers = config.workers;

    RunResult result;
    switch (config.mode) {
        case InteractionMode::simulation:
            result = run_single_agent(config.agents.at(0), domain, config.global_args, options, config.user_simulator);
            break;
        case InteractionMode::text:
            result = run_human_text(config.agents.at(0), domain, config.global_args, options, in, out);
            break;
        case InteractionMode::multi_agent:
            result = run_multi_agent(config.agents, domain, config.global_args, options);
            break;
        case InteractionMode::serve: throw ConfigError({"use the serve sub-command for interaction_mode serve"});
    }
    print_stats(result, config.seed, out);
    return kExitOk;
}

int cmd_serve(const CommonFlags& flags, std::optional<int> port, std::ostream& out, std::ostream& err) {
    const auto config = load(flags, Command::serve, out, err);
    ServiceOptions options;
    options.seed = config.seed;
    options.max_turns = config.max_turns;
    options.session_ttl = std::chrono::milliseconds(
        static_cast<std::int64_t>(config.service.session_ttl_minutes * 60'000.0));
    ChatService service(config.agents.at(0), load_shared_domain(config), config.global_args, options);
    HttpServer server(service);
    const int bound = server.bind(config.service.host, port.value_or(config.service.port));
    out << "listening on http://" << config.service.host << ":" << bound << std::endl;

    g_shutdown = false;
    std::atomic<bool> done{false};
    std::thread watcher([&server, &done] {
        while (!g_shutdown.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
        // Shutdown may be requested before the listener is up.
        while (!server.running() && !done.load()) std::this_thread::sleep_for(std::chrono::milliseconds(10));
        server.stop();
    });
    g_port = bound;
    server.run();
    g_port = 0;
    done = true;
    g_shutdown = true;
    watcher.join();

    const auto stats = service.stats();
    out << nlohmann::json{{"system", stats.summary()}, {"seed", config.seed}}.dump(2) << '\n';
    return kExitOk;
}

int cmd_domain(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
    const auto config = load(flags, Command::domain, out, err);
    for (const auto& output : {config.domain_build.ontology_path, config.domain_build.db_path})
        if (!output.empty()) fs::create_directories(fs::path(output).parent_path());
    const auto domain = build_domain(config.domain_build);
    out << "items: " << domain.database.size() << '\n';
    out << "informable slots: " << domain.ontology.informable.size() << '\n';
    if (!config.domain_build.ontology_path.empty()) out << "ontology: " << config.domain_build.ontology_path << '\n';
    if (!config.domain_build.db_path.empty()) out << "database: " << config.domain_build.db_path << '\n';
    return kExitOk;
}

int cmd_parse(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
    const auto config = load(flags, Command::parse, out, err);
    std::optional<Ontology> ontology;
    if (!config.ontology_path.empty()) ontology = load_ontology(config.ontology_path);
    const auto corpus = dstc2::parse_dialogue_logs(config.dstc2_path, ontology ? &*ontology : nullptr);
    for (const auto& e : corpus.errors) err << "skipped " << e.path << ": " << e.reason << '\n';

    const fs::path dir(config.experience_log_dir);
    fs::create_directories(dir);
    const auto nlu_path = (dir / "nlu.csv").string();
    const auto log_path = (dir / "dstc2_experience.csv").string();
    const auto ontology_path = (dir / "dstc2_ontology.json").string();

    dstc2::AlignStats align;
    dstc2::emit_nlu_csv(dstc2::nlu_examples(corpus.dialogues, &align), nlu_path);
    fs::remove(log_path);
    DialogueEpisodeRecorder recorder(1, log_path);
    for (const auto& episode : corpus.episodes) recorder.record_episode(episode);
    if (recorder.write_failures() > 0) throw Error("cannot write " + log_path);
    save_ontology(corpus.ontology, ontology_path);

    out << "dialogues: " << corpus.dialogues.size() << '\n';
    out << "skipped: " << corpus.errors.size() << '\n';
    out << "unaligned inform values: " << align.misses << " of " << align.informs << '\n';
    out << "nlu data: " << nlu_path << '\n';
    out << "experience log: " << log_path << '\n';
    out << "ontology: " << ontology_path << '\n';
    return kExitOk;
}

}  // namespace

void request_shutdown() noexcept { g_shutdown = true; }

int serving_port() noexcept { return g_port.load(); }

int cli_main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Modular conversational agent platform", "dialogos"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::optional<int> port;
    auto add_common = [&flags](CLI::App* sub) {
        sub->add_option("--config", flags.config, "YAML configuration file")->required();
        sub->add_option("--seed", flags.seed, "override GENERAL.seed");
        sub->add_flag("--lax", flags.lax, "report unknown keys as warnings");
    };
    auto* run = app.add_subcommand("run", "run dialogues as configured (simulation, text or multi_agent)");
    auto* serve = app.add_subcommand("serve", "serve the chat session API over HTTP");
    auto* domain = app.add_subcommand("domain", "build an ontology and item database from a CSV file");
    auto* parse = app.add_subcommand("parse", "convert DSTC2-style dialogue logs into training data");
    for (auto* sub : {run, serve, domain, parse}) add_common(sub);
    serve->add_option("--port", port, "override GENERAL.port (0 picks a free port)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(flags, in, out, err);
        if (serve->parsed()) return cmd_serve(flags, port, out, err);
        if (domain->parsed()) return cmd_domain(flags, out, err);
        return cmd_parse(flags, out, err);
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace dialogos::app
