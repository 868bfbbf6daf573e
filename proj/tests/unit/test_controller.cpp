#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "dialogos/common/errors.hpp"
#include "dialogos/controller/controller.hpp"
#include "dialogos/learning/experience.hpp"
#include "support/fixtures.hpp"

using namespace dialogos;
using dialogos::testing::TempDir;
using dialogos::testing::toy_domain;

namespace {

const SharedDomain& domain() {
    static const SharedDomain d = SharedDomain::from(toy_domain());
    return d;
}

AgentSpec acts_system(const std::string& policy = "slot_filling_policy") {
    AgentSpec spec;
    spec.role = Role::system;
    spec.modules = {{{"slot_filling_dst", ModuleArgs::object()}}, {{policy, ModuleArgs::object()}}};
    return spec;
}

AgentSpec text_system() {
    AgentSpec spec;
    spec.role = Role::system;
    spec.modules = {{{"slot_filling_nlu", ModuleArgs::object()}},
                    {{"slot_filling_dst", ModuleArgs::object()}},
                    {{"slot_filling_policy", ModuleArgs::object()}},
                    {{"slot_filling_nlg", ModuleArgs::object()}}};
    return spec;
}

AgentSpec sim_user(const std::string& learner = "none") {
    AgentSpec spec;
    spec.role = Role::user;
    spec.modules = {{{"agenda_based_us", {{"learner", learner}}}}};
    return spec;
}

RunOptions options(std::size_t n, std::uint64_t seed) {
    RunOptions o;
    o.num_dialogues = n;
    o.seed = seed;
    return o;
}

void check_conservation(const RunStats& stats) {
    CHECK(stats.dialogues_run == stats.records.size());
    CHECK(stats.success_count <= stats.dialogues_run);
    std::size_t turns = 0, successes = 0;
    double reward = 0.0;
    for (const auto& r : stats.records) {
        turns += r.turns;
        successes += r.success ? 1 : 0;
        reward += r.total_return;
    }
    CHECK(stats.total_turns == turns);
    CHECK(stats.success_count == successes);
    CHECK(stats.cumulative_reward == doctest::Approx(reward));
}

}  // namespace

TEST_SUITE("single agent against the simulator") {
    TEST_CASE("no dialogues, empty stats") {
        const auto r = run_single_agent(acts_system(), domain(), ModuleArgs::object(), options(0, 1));
        const auto& s = r.stats.at(Role::system);
        CHECK(s.dialogues_run == 0);
        CHECK(s.records.empty());
        CHECK(s.success_rate() == 0.0);
    }

    TEST_CASE("seeded runs repeat exactly") {
        const auto a = run_single_agent(acts_system("random_policy"), domain(), ModuleArgs::object(), options(10, 5));
        const auto b = run_single_agent(acts_system("random_policy"), domain(), ModuleArgs::object(), options(10, 5));
        CHECK(a.stats == b.stats);
        CHECK(a.goals == b.goals);
    }

    TEST_CASE("one turn is never enough") {
        auto o = options(10, 2);
        o.max_turns = 1;
        const auto r = run_single_agent(acts_system(), domain(), ModuleArgs::object(), o);
        for (const auto& rec : r.stats.at(Role::system).records) {
            CHECK(rec.turns == 1);
            CHECK_FALSE(rec.success);
        }
    }

    TEST_CASE("rule stack succeeds on the toy domain") {
        const auto r = run_single_agent(acts_system(), domain(), ModuleArgs::object(), options(200, 11));
        CHECK(r.stats.at(Role::system).success_rate() == 1.0);
        check_conservation(r.stats.at(Role::system));
    }

    TEST_CASE("text agents are bridged and behave like the acts stack") {
        const auto text = run_single_agent(text_system(), domain(), ModuleArgs::object(), options(50, 4));
        const auto acts = run_single_agent(acts_system(), domain(), ModuleArgs::object(), options(50, 4));
        CHECK(text.stats.at(Role::system).success_rate() == acts.stats.at(Role::system).success_rate());
    }

    TEST_CASE("parallel evaluation matches the sequential loop") {
        auto o = options(40, 8);
        const auto sequential = run_single_agent(acts_system("random_policy"), domain(), ModuleArgs::object(), o);
        o.workers = 4;
        const auto parallel = run_single_agent(acts_system("random_policy"), domain(), ModuleArgs::object(), o);
        CHECK(sequential.stats == parallel.stats);
        CHECK(sequential.goals == parallel.goals);
    }

    TEST_CASE("reward totals match the experience log") {
        TempDir dir;
        auto spec = acts_system("q_learning_policy");
        spec.experience_log_path = dir.file("system_0_experience.csv");
        spec.train_schedule.train_every_n_dialogues = 1;
        const auto r = run_single_agent(spec, domain(), ModuleArgs::object(), options(30, 3));
        const auto episodes = read_experience_log(spec.experience_log_path);
        REQUIRE(episodes.size() == 30);
        double logged = 0.0;
        for (const auto& e : episodes) logged += e.total_return();
        CHECK(logged == doctest::Approx(r.stats.at(Role::system).cumulative_reward));
        check_conservation(r.stats.at(Role::system));
    }

    TEST_CASE("the observer sees every dialogue after training") {
        auto spec = acts_system("q_learning_policy");
        spec.train_schedule.train_every_n_dialogues = 2;
        auto o = options(6, 2);
        std::vector<std::size_t> seen;
        o.after_dialogue = [&](std::size_t i, const Agent& agent) {
            seen.push_back(i);
            CHECK(agent.dialogue_count() == i + 1);
        };
        run_single_agent(spec, domain(), ModuleArgs::object(), o);
        CHECK(seen == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});

        std::vector<Role> roles;
        o.num_dialogues = 2;
        o.after_dialogue = [&](std::size_t, const Agent& agent) { roles.push_back(agent.role()); };
        run_multi_agent({sim_user(), acts_system()}, domain(), ModuleArgs::object(), o);
        CHECK(roles == std::vector<Role>{Role::user, Role::system, Role::user, Role::system});
    }

    TEST_CASE("outputs are written next to the logs") {
        TempDir dir;
        auto o = options(5, 1);
        o.output_dir = dir.path().string();
        run_single_agent(acts_system(), domain(), ModuleArgs::object(), o);
        const auto stats = nlohmann::json::parse(dialogos::testing::read_file(dir.file("stats.json")));
        CHECK(stats["system"]["dialogues"] == 5);
        CHECK(stats["seed"] == 1);
        std::istringstream goals(dialogos::testing::read_file(dir.file("goals.jsonl")));
        std::size_t lines = 0;
        for (std::string line; std::getline(goals, line);) {
            const auto g = nlohmann::json::parse(line);
            CHECK(g.contains("constraints"));
            CHECK(g.contains("success"));
            ++lines;
        }
        CHECK(lines == 5);
    }
}

TEST_SUITE("two agents") {
    TEST_CASE("simulator as an agent reproduces the single-agent run") {
        auto o = options(25, 9);
        o.keep_transcripts = true;
        const auto single = run_single_agent(acts_system(), domain(), ModuleArgs::object(), o);
        const auto multi = run_multi_agent({sim_user(), acts_system()}, domain(), ModuleArgs::object(), o);
        CHECK(single.stats.at(Role::system).success_rate() == multi.stats.at(Role::system).success_rate());
        CHECK(single.stats.at(Role::system).records == multi.stats.at(Role::system).records);
        CHECK(single.transcripts == multi.transcripts);
    }

    TEST_CASE("text between agents") {
        AgentSpec user;
        user.role = Role::user;
        user.modules = {{{"slot_filling_nlu", ModuleArgs::object()}},
                        {{"agenda_based_us", ModuleArgs::object()}},
                        {{"slot_filling_nlg", ModuleArgs::object()}}};
        auto o = options(10, 6);
        o.keep_transcripts = true;
        const auto r = run_multi_agent({user, text_system()}, domain(), ModuleArgs::object(), o);
        REQUIRE(r.transcripts.size() == 10);
        for (const auto& t : r.transcripts)
            for (const auto& entry : t) {
                CHECK_FALSE(entry.text.empty());
                CHECK_THROWS_AS(deserialize_acts(entry.text), ParseError);
            }
        CHECK(r.stats.at(Role::user).success_rate() > 0.5);
    }

    TEST_CASE("exactly two agents") {
        CHECK_THROWS_AS(run_multi_agent({sim_user(), acts_system(), acts_system()}, domain(), ModuleArgs::object(),
                                        options(1, 0)),
                        ConfigError);
        CHECK_THROWS_AS(run_multi_agent({acts_system()}, domain(), ModuleArgs::object(), options(1, 0)), ConfigError);
        CHECK_THROWS_AS(run_multi_agent({acts_system(), acts_system()}, domain(), ModuleArgs::object(), options(1, 0)),
                        ConfigError);
    }

    TEST_CASE("modalities must line up") {
        CHECK_THROWS_AS(run_multi_agent({sim_user(), text_system()}, domain(), ModuleArgs::object(), options(1, 0)),
                        ConfigError);
    }

    TEST_CASE("concurrent learners keep finite parameters and stats") {
        auto sys = acts_system("q_learning_policy");
        sys.train_schedule.train_every_n_dialogues = 1;
        auto user = sim_user("q_learning");
        user.train_schedule.train_every_n_dialogues = 1;
        const auto r = run_multi_agent({user, sys}, domain(), ModuleArgs::object(), options(100, 1000));
        for (const auto& [role, stats] : r.stats) {
            CHECK(stats.dialogues_run == 100);
            CHECK(std::isfinite(stats.cumulative_reward));
            check_conservation(stats);
        }
        CHECK(r.goals.size() == 100);
    }
}

TEST_SUITE("human at a terminal") {
    TEST_CASE("scripted conversation ends with goodbye") {
        std::istringstream in("hi\nred flowers\nwhat is the price\nbye\n");
        std::ostringstream out;
        auto o = options(1, 0);
        o.keep_transcripts = true;
        const auto r = run_human_text(text_system(), domain(), ModuleArgs::object(), o, in, out);
        REQUIRE(r.transcripts.size() == 1);
        const auto& t = r.transcripts.front();
        REQUIRE(t.size() == 8);
        CHECK(t[1].text == "welcome! how may i help you?");
        CHECK(t[3].text == "what price would you like?");
        CHECK(t.back().text == "goodbye!");
        CHECK(r.stats.at(Role::system).dialogues_run == 1);
        CHECK(out.str().find("> ") == 0);
    }

    TEST_CASE("quit fails the dialogue") {
        std::istringstream in("/quit\n");
        std::ostringstream out;
        const auto r = run_human_text(text_system(), domain(), ModuleArgs::object(), options(1, 0), in, out);
        const auto& s = r.stats.at(Role::system);
        CHECK(s.dialogues_run == 1);
        CHECK(s.success_count == 0);
    }

    TEST_CASE("empty line re-asks on the unchanged constraints") {
        std::istringstream in("red flowers\n\n");
        std::ostringstream out;
        auto o = options(1, 0);
        o.keep_transcripts = true;
        const auto r = run_human_text(text_system(), domain(), ModuleArgs::object(), o, in, out);
        const auto& t = r.transcripts.at(0);
        REQUIRE(t.size() == 4);
        CHECK(t[1].text == "what price would you like?");
        CHECK(t[3].text == "what price would you like?");
        REQUIRE(t[3].state);
        CHECK(t[3].state->slots_filled == t[1].state->slots_filled);
    }

    TEST_CASE("closed input ends the run") {
        std::istringstream in("");
        std::ostringstream out;
        const auto r = run_human_text(text_system(), domain(), ModuleArgs::object(), options(3, 0), in, out);
        CHECK(r.stats.at(Role::system).dialogues_run <= 1);
    }

    TEST_CASE("acts typed directly") {
        AgentSpec spec = acts_system();
        std::istringstream in("inform(color=red)\nbye()\n");
        std::ostringstream out;
        const auto r = run_human_text(spec, domain(), ModuleArgs::object(), options(1, 0), in, out);
        CHECK(r.stats.at(Role::system).dialogues_run == 1);
        CHECK(out.str().find("request(price)") != std::string::npos);
    }
}
