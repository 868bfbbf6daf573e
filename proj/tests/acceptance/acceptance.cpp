// Acceptance suite: one line per criterion, exit status 0 iff all pass.
//
//   acceptance [--only N]...

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <yaml-cpp/yaml.h>

#include "dialogos/app/cli.hpp"
#include "dialogos/app/config.hpp"
#include "dialogos/common/errors.hpp"
#include "dialogos/common/text.hpp"
#include "dialogos/controller/controller.hpp"
#include "dialogos/dstc2/dstc2.hpp"
#include "dialogos/learning/learner.hpp"
#include "dialogos/learning/reinforce.hpp"
#include "dialogos/slotfill/modules.hpp"

namespace fs = std::filesystem;
using namespace dialogos;

namespace {

constexpr std::uint64_t kSeed = 1000;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x, int digits = 3) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(digits);
    out << x;
    return out.str();
}

fs::path source_dir() {
    if (const char* env = std::getenv("DIALOGOS_SOURCE_DIR")) return env;
    return DIALOGOS_SOURCE_DIR_DEFAULT;
}

class Scratch {
public:
    Scratch() : path_(fs::temp_directory_path() / ("dialogos-acceptance-" + std::to_string(::getpid()))) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    fs::path dir(const std::string& name) const {
        const auto p = path_ / name;
        fs::create_directories(p);
        return p;
    }

private:
    fs::path path_;
};

const Scratch& scratch() {
    static const Scratch s;
    return s;
}

const SharedDomain& toy() {
    static const SharedDomain d = SharedDomain::from(
        load_domain((source_dir() / "data" / "flowershop.json").string(), (source_dir() / "data" / "flowershop.db").string()));
    return d;
}

AgentSpec system_agent(std::vector<std::string> modules) {
    AgentSpec spec;
    spec.role = Role::system;
    for (const auto& m : modules) spec.modules.push_back({{m, ModuleArgs::object()}});
    return spec;
}

AgentSpec simulated_user(const std::string& learner) {
    AgentSpec spec;
    spec.role = Role::user;
    spec.modules = {{{"agenda_based_us", {{"learner", learner}}}}};
    return spec;
}

RunOptions run_options(std::size_t n, std::uint64_t seed = kSeed) {
    RunOptions o;
    o.num_dialogues = n;
    o.seed = seed;
    return o;
}

double mean_return(const RunStats& s, std::size_t begin, std::size_t end) {
    double total = 0.0;
    for (std::size_t i = begin; i < end; ++i) total += s.records.at(i).total_return;
    return total / static_cast<double>(end - begin);
}

std::vector<std::string> words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

// --- 1 -----------------------------------------------------------------------

Verdict nlu_rows() {
    struct Row {
        std::string transcript;
        ActList acts;
        std::string intents;
        std::string tags;
    };
    // Reference rows: transcript, intents, BIO tags.
    const std::vector<Row> rows = {
        {"expensive restaurant that serves vegetarian food",
         {inform("pricerange", "expensive"), inform("food", "vegetarian")},
         "inform",
         "B-inform-pricerange O O O B-inform-food O"},
        {"asian oriental type of food", {inform("food", "asian oriental")}, "inform", "B-inform-food I-inform-food O O O"},
        {"what is the phone number", {request("phone")}, "request_phone", "O O O O O"},
        {"thank you good bye", {make_act("thankyou"), make_act("bye")}, "bye thankyou", "O O O O"},
        {"how about french food", {make_act("reqalts"), inform("food", "french")}, "reqalts inform", "O O B-inform-food O"},
    };
    auto matches = [](const dstc2::NluExample& ex, const Row& row) {
        const auto intents = words(row.intents);
        return ex.tokens == words(row.transcript) && ex.bio_tags == words(row.tags) &&
               ex.intents == std::set<std::string>(intents.begin(), intents.end());
    };

    // Straight from the annotated acts, through the CSV and back.
    std::vector<dstc2::NluExample> direct;
    for (const auto& row : rows) direct.push_back(dstc2::bio_align(row.transcript, row.acts));
    const auto csv = (scratch().dir("nlu_rows") / "nlu.csv").string();
    dstc2::emit_nlu_csv(direct, csv);
    const auto reread = dstc2::read_nlu_csv(csv);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < rows.size() && i < reread.size(); ++i) ok += matches(reread[i], rows[i]) ? 1 : 0;

    // From logs on disk, through the parser.
    const auto corpus = dstc2::parse_dialogue_logs((source_dir() / "tests" / "fixtures" / "dstc2" / "sample_rows").string());
    const auto parsed = dstc2::nlu_examples(corpus.dialogues);
    const std::vector<std::size_t> order = {0, 1, 2, 4, 3};  // dialogue order of the reference rows
    std::size_t parsed_ok = 0;
    for (std::size_t i = 0; i < order.size() && i < parsed.size(); ++i)
        parsed_ok += matches(parsed[i], rows[order[i]]) ? 1 : 0;

    return {ok == 5 && reread.size() == 5 && parsed_ok == 5 && parsed.size() == 5,
            "csv rows " + std::to_string(ok) + "/5, parsed logs " + std::to_string(parsed_ok) + "/5"};
}

// --- 2 -----------------------------------------------------------------------

Verdict rule_based() {
    const auto r = run_single_agent(
        system_agent({"slot_filling_nlu", "slot_filling_dst", "slot_filling_policy", "slot_filling_nlg"}), toy(),
        ModuleArgs::object(), run_options(500));
    const auto& s = r.stats.at(Role::system);
    return {s.dialogues_run == 500 && s.success_rate() >= 0.95 && s.average_turns() <= 12.0,
            "success " + fmt(s.success_rate()) + " (>= 0.95), mean turns " + fmt(s.average_turns(), 2) + " (<= 12)"};
}

// --- 3, 4 --------------------------------------------------------------------

struct Improvement {
    double learned = 0.0;
    double random = 0.0;
    double max_norm_error = 0.0;
    bool finite = true;
};

Improvement improvement(const std::string& policy) {
    Improvement out;
    auto o = run_options(2000);
    o.after_dialogue = [&](std::size_t, const Agent& agent) {
        out.finite = out.finite && agent.parameters_finite();
        const auto* module = dynamic_cast<const LearnedPolicyModule*>(&agent.module(1));
        if (!module) return;
        if (const auto* r = dynamic_cast<const ReinforceLearner*>(&module->learner()))
            out.max_norm_error = std::max(out.max_norm_error, r->policy().max_normalization_error());
    };
    const auto learned = run_single_agent(system_agent({"slot_filling_dst", policy}), toy(), ModuleArgs::object(), o);
    const auto random =
        run_single_agent(system_agent({"slot_filling_dst", "random_policy"}), toy(), ModuleArgs::object(), run_options(2000));
    out.learned = learned.stats.at(Role::system).success_rate(1500, 2000);
    out.random = random.stats.at(Role::system).success_rate(1500, 2000);
    return out;
}

Verdict q_learning() {
    const auto r = improvement("q_learning_policy");
    const double gain = r.learned - r.random;
    return {r.finite && gain >= 0.30, "final-500 success " + fmt(r.learned) + " vs random " + fmt(r.random) +
                                          ", gain " + fmt(gain) + " (>= 0.30)"};
}

Verdict reinforce() {
    const auto r = improvement("reinforce_policy");
    const double gain = r.learned - r.random;
    return {r.finite && gain >= 0.20 && r.max_norm_error <= 1e-9,
            "final-500 success " + fmt(r.learned) + " vs random " + fmt(r.random) + ", gain " + fmt(gain) +
                " (>= 0.20); max |sum p - 1| " + [&] {
                    std::ostringstream e;
                    e << r.max_norm_error;
                    return e.str();
                }() + " (<= 1e-9)"};
}

// --- 5 -----------------------------------------------------------------------

Verdict rl_oracles() {
    // Q-learning against value iteration on a 3-state MDP.
    // s0: a0 -> s1 (r=-1), a1 -> s2 terminal (r=2)
    // s1: a0 -> s0 (r=0),  a1 -> s2 terminal (r=10)
    struct Edge {
        std::size_t next;
        double reward;
    };
    const Edge edges[2][2] = {{{1, -1.0}, {2, 2.0}}, {{0, 0.0}, {2, 10.0}}};
    const double gamma = 0.9;
    double v[3] = {0, 0, 0};
    for (int it = 0; it < 2000; ++it) {
        double nv[3] = {0, 0, 0};
        for (int s = 0; s < 2; ++s) {
            double best = -1e300;
            for (int a = 0; a < 2; ++a) best = std::max(best, edges[s][a].reward + gamma * v[edges[s][a].next]);
            nv[s] = best;
        }
        std::copy(nv, nv + 3, v);
    }
    QTable q(3, 2);
    std::size_t visits[3][2] = {};
    Rng rng(kSeed);
    std::vector<int> pairs = {0, 1, 2, 3};
    for (int step = 0; step < 10000; ++step) {
        std::shuffle(pairs.begin(), pairs.end(), rng);
        for (const int p : pairs) {
            const std::size_t st = p / 2, a = p % 2;
            const auto& e = edges[st][a];
            q_update(q, st, a, e.reward, e.next, e.next == 2, 1.0 / static_cast<double>(++visits[st][a]), gamma);
        }
    }
    double q_error = 0.0;
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a)
            q_error = std::max(q_error, std::abs(q.at(s, a) - (edges[s][a].reward + gamma * v[edges[s][a].next])));

    // REINFORCE gradient against central finite differences.
    std::mt19937_64 gen(kSeed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double h = 1e-5;
    double grad_error = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t F = 2 + gen() % 4, A = 2 + gen() % 4;
        SoftmaxPolicy p(F, A);
        for (auto& w : p.weights()) w = u(gen);
        Features phi;
        for (std::size_t f = 0; f < F; ++f) phi.push_back({f, u(gen)});
        ActionMask mask(A, false);
        for (auto&& m : mask) m = gen() % 3 != 0;
        mask[gen() % A] = true;
        std::size_t a;
        do a = gen() % A;
        while (!mask[a]);
        const auto grad = p.grad_log_prob(phi, mask, a);
        for (std::size_t i = 0; i < p.weights().size(); ++i) {
            const double w0 = p.weights()[i];
            p.weights()[i] = w0 + h;
            const double up = p.log_prob(phi, mask, a);
            p.weights()[i] = w0 - h;
            const double down = p.log_prob(phi, mask, a);
            p.weights()[i] = w0;
            const double fd = (up - down) / (2 * h);
            const double scale = std::max(std::abs(fd), std::abs(grad[i]));
            // Entries that vanish analytically are compared absolutely.
            grad_error = std::max(grad_error, scale < 1e-6 ? std::abs(fd - grad[i]) : std::abs(fd - grad[i]) / scale);
        }
    }
    std::ostringstream detail;
    detail << "max |Q - Q*| " << q_error << " (< 1e-2), max gradient rel. error " << grad_error << " (< 1e-5)";
    return {q_error < 1e-2 && grad_error < 1e-5, detail.str()};
}

// --- 6 -----------------------------------------------------------------------

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict domain_oracle() {
    std::mt19937_64 rng(kSeed);
    const std::vector<std::string> header = {"id", "a", "b", "c"};
    const std::vector<std::string> vocab = {"x", "y", "z", "X", ""};
    const auto base = scratch().dir("domain");
    std::size_t queries = 0, agree = 0, identical = 0;
    for (int t = 0; t < 100; ++t) {
        const auto n = std::uniform_int_distribution<int>(1, 10)(rng);
        std::vector<std::vector<std::string>> rows;
        for (int r = 0; r < n; ++r) {
            std::vector<std::string> row = {std::to_string(std::uniform_int_distribution<int>(1, 3)(rng) * 100 + r)};
            for (int c = 0; c < 3; ++c) row.push_back(vocab[rng() % vocab.size()]);
            rows.push_back(row);
        }
        for (int c = 1; c <= 3; ++c)
            if (rows[0][c].empty()) rows[0][c] = "y";  // every column keeps a value
        std::string csv = "id,a,b,c\n";
        for (const auto& row : rows) csv += row[0] + "," + row[1] + "," + row[2] + "," + row[3] + "\n";
        const auto dir = base / std::to_string(t);
        fs::create_directories(dir);
        std::ofstream((dir / "t.csv").string()) << csv;

        DomainBuildSpec spec;
        spec.csv_path = (dir / "t.csv").string();
        spec.table_name = "t";
        spec.informable_columns = {"a", "b", "c"};
        spec.requestable_columns = {"a", "b", "c"};
        spec.system_requestable_columns = {"a", "b"};
        spec.ontology_path = (dir / "o1.json").string();
        spec.db_path = (dir / "d1.db").string();
        const auto built = build_domain(spec);
        spec.ontology_path = (dir / "o2.json").string();
        spec.db_path = (dir / "d2.db").string();
        build_domain(spec);
        if (file_bytes((dir / "o1.json").string()) == file_bytes((dir / "o2.json").string()) &&
            file_bytes((dir / "d1.db").string()) == file_bytes((dir / "d2.db").string()))
            ++identical;

        const auto loaded = load_domain((dir / "o1.json").string(), (dir / "d1.db").string());
        for (int k = 0; k < 10; ++k) {
            SlotMap constraints;
            for (const auto& slot : {"a", "b", "c"})
                if (rng() % 2) constraints[slot] = (rng() % 4 == 0) ? "dontcare" : vocab[rng() % 4];
            // Oracle: linear scan of the generated rows, ids in numeric order.
            std::vector<long> expected;
            for (const auto& row : rows) {
                bool keep = true;
                for (const auto& [slot, value] : constraints) {
                    if (value == "dontcare") continue;
                    const auto col = std::find(header.begin(), header.end(), slot) - header.begin();
                    if (text::to_lower(row[col]) != text::to_lower(value)) keep = false;
                }
                if (keep) expected.push_back(std::stol(row[0]));
            }
            std::sort(expected.begin(), expected.end());
            for (const auto* db : {&built.database, &loaded.database}) {
                std::vector<long> got;
                for (const auto& item : query(*db, constraints)) got.push_back(std::stol(item.id()));
                ++queries;
                agree += got == expected ? 1 : 0;
            }
        }
    }
    return {agree == queries && identical == 100, std::to_string(agree) + "/" + std::to_string(queries) +
                                                       " queries match the row filter, " + std::to_string(identical) +
                                                       "/100 rebuilds byte-identical"};
}

// --- 7 -----------------------------------------------------------------------

Verdict determinism() {
    std::vector<std::string> failures;
    auto o = run_options(200);
    o.keep_transcripts = true;

    const auto text_stack =
        system_agent({"slot_filling_nlu", "slot_filling_dst", "slot_filling_policy", "slot_filling_nlg"});
    for (const auto& spec : {system_agent({"slot_filling_dst", "random_policy"}),
                             system_agent({"slot_filling_dst", "q_learning_policy"}), text_stack}) {
        const auto a = run_single_agent(spec, toy(), ModuleArgs::object(), o);
        const auto b = run_single_agent(spec, toy(), ModuleArgs::object(), o);
        if (!(a.stats == b.stats && a.transcripts == b.transcripts && a.goals == b.goals))
            failures.push_back("repeat " + spec.modules.back().front().type);
    }

    for (const auto& policy : {"slot_filling_policy", "random_policy"}) {
        const auto sys = system_agent({"slot_filling_dst", policy});
        const auto single = run_single_agent(sys, toy(), ModuleArgs::object(), o);
        const auto multi = run_multi_agent({simulated_user("none"), sys}, toy(), ModuleArgs::object(), o);
        if (!(single.transcripts == multi.transcripts &&
              single.stats.at(Role::system).records == multi.stats.at(Role::system).records))
            failures.push_back(std::string("harness equivalence ") + policy);
    }

    const std::vector<AgentSpec> joint = {simulated_user("q_learning"),
                                          system_agent({"slot_filling_dst", "q_learning_policy"})};
    const auto a = run_multi_agent(joint, toy(), ModuleArgs::object(), o);
    const auto b = run_multi_agent(joint, toy(), ModuleArgs::object(), o);
    if (!(a.stats == b.stats && a.transcripts == b.transcripts)) failures.push_back("repeat joint training");

    std::string detail = "5 repeated runs identical, single-agent and two-agent transcripts identical";
    if (!failures.empty()) {
        detail = "differs:";
        for (const auto& f : failures) detail += " [" + f + "]";
    }
    return {failures.empty(), detail};
}

// --- 8 -----------------------------------------------------------------------

Verdict concurrent_training() {
    bool finite = true;
    auto o = run_options(2000);
    o.after_dialogue = [&](std::size_t, const Agent& agent) { finite = finite && agent.parameters_finite(); };
    const auto learned = run_multi_agent(
        {simulated_user("q_learning"), system_agent({"slot_filling_dst", "q_learning_policy"})}, toy(),
        ModuleArgs::object(), o);
    const auto baseline = run_multi_agent(
        {simulated_user("random"), system_agent({"slot_filling_dst", "random_policy"})}, toy(), ModuleArgs::object(),
        run_options(2000));

    for (const auto& [role, s] : learned.stats)
        finite = finite && std::isfinite(s.cumulative_reward) && s.dialogues_run == 2000;
    const auto& ls = learned.stats.at(Role::system);
    const auto& bs = baseline.stats.at(Role::system);
    const double success = ls.success_rate(1500, 2000), base_success = bs.success_rate(1500, 2000);
    const double user_ret = mean_return(learned.stats.at(Role::user), 1500, 2000);
    const double base_user_ret = mean_return(baseline.stats.at(Role::user), 1500, 2000);
    const double sys_ret = mean_return(ls, 1500, 2000), base_sys_ret = mean_return(bs, 1500, 2000);
    const bool pass = finite && success > base_success && user_ret > base_user_ret && sys_ret > base_sys_ret;
    return {pass, std::string(finite ? "finite" : "NON-FINITE") + "; final-500 success " + fmt(success) + " vs " +
                      fmt(base_success) + ", user return " + fmt(user_ret, 2) + " vs " + fmt(base_user_ret, 2) +
                      ", system return " + fmt(sys_ret, 2) + " vs " + fmt(base_sys_ret, 2)};
}

// --- 9 -----------------------------------------------------------------------

struct CliOutcome {
    int code = -1;
    std::string out, err;
};

CliOutcome cli(std::vector<std::string> args, const std::string& log_dir = "") {
    args.insert(args.begin(), "dialogos");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (!log_dir.empty()) ::setenv("DIALOGOS_LOG_DIR", log_dir.c_str(), 1);
    std::istringstream in;
    std::ostringstream out, err;
    CliOutcome o;
    o.code = app::cli_main(static_cast<int>(argv.size()), argv.data(), in, out, err);
    ::unsetenv("DIALOGOS_LOG_DIR");
    o.out = out.str();
    o.err = err.str();
    return o;
}

app::Command command_for(const std::string& file) {
    if (file == "flowershop_domain.yaml") return app::Command::domain;
    if (file == "parse_dstc2.yaml") return app::Command::parse;
    if (file == "serve.yaml") return app::Command::serve;
    return app::Command::run;
}

Verdict config_cli() {
    const auto configs = source_dir() / "configs";
    std::size_t shipped = 0, shipped_ok = 0, negative = 0, negative_ok = 0;
    std::string failures;
    for (const auto& entry : fs::directory_iterator(configs)) {
        if (entry.path().extension() != ".yaml") continue;
        ++shipped;
        app::LoadOptions options;
        options.command = command_for(entry.path().filename().string());
        try {
            app::load_config(entry.path().string(), options);
            ++shipped_ok;
        } catch (const ConfigError&) {
            failures += " " + entry.path().filename().string();
        }
    }
    for (const auto& entry : fs::directory_iterator(configs / "invalid")) {
        ++negative;
        std::ifstream in(entry.path());
        std::string first;
        std::getline(in, first);
        const std::string marker = "# expect: ";
        const auto expected = first.rfind(marker, 0) == 0 ? first.substr(marker.size()) : "<no expectation>";
        try {
            app::load_config(entry.path().string());
            failures += " " + entry.path().filename().string();
        } catch (const ConfigError& e) {
            const auto& p = e.problems();
            if (std::any_of(p.begin(), p.end(), [&](const std::string& s) { return s.find(expected) != std::string::npos; }))
                ++negative_ok;
            else
                failures += " " + entry.path().filename().string();
        }
    }

    // The four sub-commands on their happy paths.
    std::vector<std::string> exits;
    const auto logs = scratch().dir("cli");
    exits.push_back("run=" + std::to_string(cli({"run", "--config", (configs / "simulation_rules.yaml").string()},
                                                (logs / "run").string())
                                                .code));

    // The shipped domain config with its outputs redirected.
    auto domain_yaml = YAML::LoadFile((configs / "flowershop_domain.yaml").string());
    domain_yaml["DIALOGUE"]["csv_path"] = (source_dir() / "data" / "flowershop.csv").string();
    domain_yaml["DIALOGUE"]["ontology_path"] = (logs / "domain" / "flowershop.json").string();
    domain_yaml["DIALOGUE"]["db_path"] = (logs / "domain" / "flowershop.db").string();
    const auto domain_config = (logs / "flowershop_domain.yaml").string();
    std::ofstream(domain_config) << domain_yaml;
    exits.push_back("domain=" + std::to_string(cli({"domain", "--config", domain_config}).code));
    const bool domain_same = file_bytes((logs / "domain" / "flowershop.json").string()) ==
                             file_bytes((source_dir() / "data" / "flowershop.json").string());

    exits.push_back("parse=" + std::to_string(cli({"parse", "--config", (configs / "parse_dstc2.yaml").string()},
                                                  (logs / "parse").string())
                                                  .code));

    ::setenv("DIALOGOS_LOG_DIR", (logs / "serve").c_str(), 1);
    auto served = std::async(std::launch::async, [&] {
        std::vector<std::string> args = {"dialogos", "serve", "--config", (configs / "serve.yaml").string(),
                                         "--port", "0"};
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::istringstream in;
        std::ostringstream out, err;
        return app::cli_main(static_cast<int>(argv.size()), argv.data(), in, out, err);
    });
    bool served_reply = false;
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
    while (app::serving_port() == 0 && std::chrono::steady_clock::now() < deadline &&
           served.wait_for(std::chrono::milliseconds(10)) == std::future_status::timeout) {
    }
    if (app::serving_port() != 0) {
        httplib::Client client("127.0.0.1", app::serving_port());
        if (const auto created = client.Post("/api/sessions", "", "application/json"); created && created->status == 201) {
            const auto id = nlohmann::json::parse(created->body)["session_id"].get<std::string>();
            const auto reply = client.Post("/api/sessions/" + id + "/utterances", R"({"text": "bye"})", "application/json");
            served_reply = reply && reply->status == 200;
            client.Delete("/api/sessions/" + id);
        }
    }
    app::request_shutdown();
    exits.push_back("serve=" + std::to_string(served.get()));
    ::unsetenv("DIALOGOS_LOG_DIR");

    const bool all_zero = std::all_of(exits.begin(), exits.end(), [](const std::string& e) { return e.back() == '0' && e[e.size() - 2] == '='; });
    std::string detail = std::to_string(shipped_ok) + "/" + std::to_string(shipped) + " configs load, " +
                         std::to_string(negative_ok) + "/" + std::to_string(negative) + " negative fixtures fail as named;";
    for (const auto& e : exits) detail += " " + e;
    if (!failures.empty()) detail += "; failing:" + failures;
    return {shipped_ok == shipped && shipped >= 9 && negative_ok == negative && negative >= 10 && all_zero &&
                served_reply && domain_same,
            detail};
}

struct Criterion {
    int number;
    const char* name;
    std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i + 1 < argc; i += 2)
        if (std::string(argv[i]) == "--only") only.insert(std::stoi(argv[i + 1]));

    const std::vector<Criterion> criteria = {
        {1, "NLU rows from dialogue logs", nlu_rows},
        {2, "rule-based end-to-end", rule_based},
        {3, "Q-learning improvement", q_learning},
        {4, "REINFORCE improvement", reinforce},
        {5, "RL oracles", rl_oracles},
        {6, "domain/query oracle", domain_oracle},
        {7, "determinism and equivalence", determinism},
        {8, "two-agent concurrent training", concurrent_training},
        {9, "config and CLI", config_cli},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.contains(c.number)) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS" : "FAIL") << "  " << c.number << ". " << c.name << ": " << v.detail << " ["
                  << fmt(secs, 1) << " s]" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
