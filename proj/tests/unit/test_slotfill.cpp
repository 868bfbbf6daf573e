#include <doctest.h>

#include <algorithm>
#include <random>

#include "dialogos/common/errors.hpp"
#include "dialogos/common/rng.hpp"
#include "dialogos/common/text.hpp"
#include "dialogos/slotfill/dst.hpp"
#include "dialogos/slotfill/nlg.hpp"
#include "dialogos/slotfill/nlu.hpp"
#include "dialogos/slotfill/policy.hpp"
#include "dialogos/usersim/simulator.hpp"
#include "support/fixtures.hpp"

using namespace dialogos;
using dialogos::testing::flower_domain;
using dialogos::testing::TempDir;
using dialogos::testing::toy_domain;

namespace {

const std::string dontcare(kDontCare);

Ontology restaurant_ontology() {
    Ontology o;
    o.informable = {{"area", {"centre", "north", "north west", "south"}},
                    {"food", {"chinese", "indian", "italian", "vegetarian"}},
                    {"pricerange", {"cheap", "expensive", "moderate"}}};
    o.requestable = {"address", "area", "food", "phone", "postcode", "pricerange"};
    o.system_requestable = {"area", "food", "pricerange"};
    o.validate();
    return o;
}

DialogueAct act(std::string intent, std::vector<SlotParam> params = {}) {
    return DialogueAct(std::move(intent), std::move(params));
}

bool has_act(const ActList& acts, const std::string& intent, const std::string& slot,
             const std::optional<std::string>& value = std::nullopt) {
    return std::any_of(acts.begin(), acts.end(), [&](const DialogueAct& a) {
        if (a.intent != intent) return false;
        if (slot.empty()) return true;
        return std::any_of(a.params.begin(), a.params.end(), [&](const SlotParam& p) {
            return p.slot == slot && (!value || (p.value && text::iequals(*p.value, *value)));
        });
    });
}

}  // namespace

TEST_SUITE("nlu_understand") {
    TEST_CASE("request cue") {
        CHECK(nlu_understand("what is the phone number", restaurant_ontology()) == ActList{request("phone")});
    }

    TEST_CASE("closing words") {
        CHECK(nlu_understand("thank you good bye", restaurant_ontology()) ==
              ActList{make_act("bye"), make_act("thankyou")});
    }

    TEST_CASE("two values in one sentence") {
        const ActList expected{act("inform", {{"food", "vegetarian"}, {"pricerange", "expensive"}})};
        CHECK(nlu_understand("expensive restaurant that serves vegetarian food", restaurant_ontology()) == expected);
    }

    TEST_CASE("longest match wins over its prefix") {
        const auto acts = nlu_understand("somewhere in the north west", restaurant_ontology());
        CHECK(acts == ActList{inform("area", "north west")});
    }

    TEST_CASE("unintelligible input yields nothing") {
        CHECK(nlu_understand("zzz qqq", restaurant_ontology()).empty());
        CHECK(nlu_understand("", restaurant_ontology()).empty());
    }

    TEST_CASE("dont care next to a slot cue") {
        CHECK(nlu_understand("i dont care about the area", restaurant_ontology()) ==
              ActList{inform("area", dontcare)});
    }

    TEST_CASE("soundness against the ontology-only lexicon") {
        const auto onto = restaurant_ontology();
        std::vector<std::string> vocab = {"what", "is",    "the",   "phone",    "number", "any",  "dont",
                                          "care", "bye",   "thank", "you",      "how",    "about", "address",
                                          "food", "price", "area",  "anything", "else",   "hello", "cheap"};
        for (const auto& [slot, values] : onto.informable)
            for (const auto& v : values)
                for (const auto& tok : text::tokenize(v)) vocab.push_back(tok);
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 2000; ++trial) {
            std::string utterance;
            const auto n = std::uniform_int_distribution<int>(1, 8)(rng);
            for (int i = 0; i < n; ++i)
                utterance += vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)] + " ";
            for (const auto& a : nlu_understand(utterance, onto)) {
                for (const auto& p : a.params) {
                    if (a.intent == "inform") {
                        REQUIRE(p.value);
                        CHECK_MESSAGE((*p.value == dontcare || onto.has_value(p.slot, *p.value)), utterance);
                    }
                    if (a.intent == "request") CHECK_MESSAGE(onto.is_requestable(p.slot), utterance);
                }
            }
        }
    }
}

TEST_SUITE("dst_update") {
    const auto onto = restaurant_ontology();
    const MatchCounter no_db = [](const SlotMap&) { return std::size_t{0}; };

    TEST_CASE("inform fills a slot") {
        const auto out = dst_update(DialogueState{}, {inform("food", "chinese")}, onto, no_db);
        CHECK(out.state.slots_filled == SlotMap{{"food", "chinese"}});
        CHECK(out.state.turn == 1);
        CHECK(out.warnings == 0);
    }

    TEST_CASE("last write wins") {
        DialogueState s;
        s.slots_filled = {{"food", "chinese"}};
        CHECK(dst_update(s, {inform("food", "indian")}, onto, no_db).state.slots_filled ==
              SlotMap{{"food", "indian"}});
    }

    TEST_CASE("request and bye in one turn") {
        const auto out = dst_update(DialogueState{}, {request("phone"), make_act("bye")}, onto, no_db);
        CHECK(out.state.requested_slot == std::optional<std::string>("phone"));
        CHECK(out.state.is_terminal);
    }

    TEST_CASE("unknown slots are counted, not fatal") {
        const auto out = dst_update(DialogueState{}, {inform("colour", "red"), inform("food", "indian")}, onto, no_db);
        CHECK(out.warnings == 1);
        CHECK(out.state.slots_filled == SlotMap{{"food", "indian"}});
    }

    TEST_CASE("reqalts clears the offer") {
        DialogueState s;
        s.offered_item = "golden wok";
        CHECK_FALSE(dst_update(s, {make_act("reqalts")}, onto, no_db).state.offered_item);
    }

    TEST_CASE("match count comes from the counter") {
        const MatchCounter seven = [](const SlotMap&) { return std::size_t{7}; };
        CHECK(dst_update(DialogueState{}, {inform("area", "north")}, onto, seven).state.db_match_count == 7);
    }

    TEST_CASE("turn counter is monotone and terminal is absorbing") {
        const std::vector<ActList> pool = {{inform("food", "chinese")},
                                           {request("phone")},
                                           {make_act("bye")},
                                           {make_act("reqalts")},
                                           {make_act("hello")},
                                           {},
                                           {inform("area", "north"), request("address")}};
        std::mt19937_64 rng(11);
        for (int run = 0; run < 200; ++run) {
            DialogueState s;
            for (int t = 0; t < 12; ++t) {
                const auto& acts = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
                const auto next = dst_update(s, acts, onto, no_db).state;
                CHECK(next.turn == s.turn + 1);
                if (s.is_terminal) CHECK(next.is_terminal);
                s = next;
            }
        }
    }
}

TEST_SUITE("policy_respond") {
    TEST_CASE("terminal state says bye") {
        const auto d = flower_domain();
        DialogueState s;
        s.is_terminal = true;
        CHECK(policy_respond(s, d.ontology, d.database) == ActList{make_act("bye")});
    }

    TEST_CASE("first unfilled slot in ontology order") {
        const auto d = flower_domain();
        REQUIRE(d.ontology.system_requestable == std::vector<std::string>{"color", "price", "type"});
        CHECK(policy_respond(DialogueState{}, d.ontology, d.database) == ActList{request("color")});
    }

    TEST_CASE("hello on the first turn is welcomed") {
        const auto d = flower_domain();
        DialogueState s;
        s.last_user_acts = {make_act("hello")};
        s.turn = 1;
        CHECK(policy_respond(s, d.ontology, d.database) == ActList{make_act("welcomemsg")});
    }

    TEST_CASE("offers the first match by id") {
        const auto d = flower_domain();
        DialogueState s;
        s.slots_filled = {{"color", "red"}, {"price", dontcare}, {"type", dontcare}};
        CHECK(query(d.database, s.slots_filled).size() == 2);
        CHECK(policy_respond(s, d.ontology, d.database) == ActList{act("offer", {{"name", "rosa"}})});
    }

    TEST_CASE("after reqalts the next match is offered") {
        const auto d = flower_domain();
        DialogueState s;
        s.slots_filled = {{"color", "red"}, {"price", dontcare}, {"type", dontcare}};
        CHECK(policy_respond(s, d.ontology, d.database, std::string("rosa")) ==
              ActList{act("offer", {{"name", "rubra"}})});
        CHECK(policy_respond(s, d.ontology, d.database, std::string("rubra")) ==
              ActList{act("offer", {{"name", "rosa"}})});
    }

    TEST_CASE("no match echoes the constraints") {
        const auto d = flower_domain();
        DialogueState s;
        s.slots_filled = {{"color", "yellow"}, {"price", "cheap"}, {"type", dontcare}};
        CHECK(policy_respond(s, d.ontology, d.database) ==
              ActList{act("canthelp", {{"color", "yellow"}, {"price", "cheap"}})});
    }

    TEST_CASE("a pending request about the offer is answered") {
        const auto d = flower_domain();
        DialogueState s;
        s.slots_filled = {{"color", "red"}, {"price", "expensive"}, {"type", dontcare}};
        s.offered_item = "rubra";
        s.requested_slot = "type";
        CHECK(policy_respond(s, d.ontology, d.database) == ActList{inform("type", "rose")});
    }

    TEST_CASE("total over simulator-driven rollouts") {
        auto domain = toy_domain();
        const auto onto = std::make_shared<const Ontology>(domain.ontology);
        const auto db = std::make_shared<const ItemDatabase>(domain.database);
        const auto counter = database_counter(*db);
        for (std::uint64_t seed = 0; seed < 300; ++seed) {
            AgendaSimulator sim(onto, db);
            sim.start(seed);
            DialogueState state;
            std::optional<std::string> previous_offer;
            for (int turn = 0; turn < 30 && !sim.said_bye(); ++turn) {
                state = dst_update(state, sim.respond(), *onto, counter).state;
                const auto reply = policy_respond(state, *onto, *db, previous_offer);
                REQUIRE_FALSE(reply.empty());
                state = dst_note_own_acts(state, reply);
                for (const auto& a : reply)
                    if (a.intent == "offer" && !a.params.empty()) previous_offer = a.params.front().value;
                if (state.is_terminal) break;
                sim.receive(reply);
            }
        }
    }
}

TEST_SUITE("nlg_generate") {
    TEST_CASE("slot placeholder") {
        TemplateTable t;
        t.set("request", "what {slot} would you like?");
        CHECK(nlg_generate({request("color")}, t) == "what color would you like?");
    }

    TEST_CASE("constant template") { CHECK(nlg_generate({make_act("bye")}, TemplateTable::defaults()) == "goodbye!"); }

    TEST_CASE("slot and value") {
        CHECK(nlg_generate({inform("phone", "123")}, TemplateTable::defaults()) == "the phone is 123");
    }

    TEST_CASE("acts are joined by a space") {
        CHECK(nlg_generate({make_act("thankyou"), make_act("bye")}, TemplateTable::defaults()) ==
              "thank you. goodbye!");
    }

    TEST_CASE("missing template names the intent") {
        TemplateTable t;
        CHECK_THROWS_WITH_AS(nlg_generate({make_act("bye")}, t), doctest::Contains("bye"), GenerationError);
    }

    TEST_CASE("defaults cover every default intent") {
        const auto t = TemplateTable::defaults();
        for (const auto& intent : IntentRegistry::defaults().intents()) CHECK_MESSAGE(t.find(intent), intent);
    }

    TEST_CASE("template files override single entries") {
        TempDir dir;
        const auto path = dir.write("templates.yaml", "bye: \"see you.\"\n");
        const auto t = load_templates(path);
        CHECK(nlg_generate({make_act("bye")}, t) == "see you.");
        CHECK(nlg_generate({make_act("thankyou")}, t) == "thank you.");
        CHECK_THROWS_AS(load_templates(dir.file("missing.yaml")), LoadError);
    }
}

TEST_SUITE("nlu and nlg round trip") {
    // nlu(nlg([act])) recovers the intent and slot (and the value of
    // informs) for every act the rule-based stack emits on the toy domain.
    void check_round_trip(const DialogueAct& a, const TemplateTable& templates, const SlotFillingNlu& nlu) {
        const auto utterance = nlg_generate({a}, templates);
        const auto parsed = nlu.understand(utterance);
        const std::string slot = a.params.empty() ? "" : a.params.front().slot;
        const std::optional<std::string> value =
            a.intent == "inform" && !a.params.empty() ? a.params.front().value : std::nullopt;
        const auto trace = serialize_act(a) + " -> \"" + utterance + "\" -> " + serialize_acts(parsed);
        CHECK_MESSAGE(has_act(parsed, a.intent, slot, value), trace);
    }

    TEST_CASE("system side") {
        const auto d = toy_domain();
        const SlotFillingNlu nlu(d.ontology, &d.database);
        const auto templates = TemplateTable::defaults();
        for (const auto& slot : d.ontology.requestable) check_round_trip(request(slot), templates, nlu);
        for (const auto& slot : d.ontology.requestable)
            for (const auto& row : d.database.rows()) {
                const auto value = row[*d.database.column_index(slot)];
                if (!value.empty()) check_round_trip(inform(slot, value), templates, nlu);
            }
        for (const auto& row : d.database.rows())
            check_round_trip(act("offer", {{"name", row[*d.database.column_index("name")]}}), templates, nlu);
        for (const auto& [slot, values] : d.ontology.informable)
            for (const auto& v : values) check_round_trip(act("canthelp", {{slot, v}}), templates, nlu);
        check_round_trip(make_act("bye"), templates, nlu);
        check_round_trip(make_act("welcomemsg"), templates, nlu);
    }

    TEST_CASE("user side") {
        const auto d = toy_domain();
        const SlotFillingNlu nlu(d.ontology, &d.database);
        const auto templates = TemplateTable::user_defaults();
        for (const auto& [slot, values] : d.ontology.informable) {
            for (const auto& v : values) check_round_trip(inform(slot, v), templates, nlu);
            check_round_trip(inform(slot, dontcare), templates, nlu);
        }
        for (const auto& slot : d.ontology.requestable) check_round_trip(request(slot), templates, nlu);
        for (const auto* intent : {"bye", "hello", "thankyou", "reqalts"})
            check_round_trip(make_act(intent), templates, nlu);
    }
}
