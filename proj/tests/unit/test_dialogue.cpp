#include <doctest.h>

#include <random>

#include "dialogos/common/errors.hpp"
#include "dialogos/dialogue/act.hpp"
#include "dialogos/dialogue/frame.hpp"
#include "dialogos/dialogue/state.hpp"

using namespace dialogos;

namespace {

DialogueAct act(std::string intent, std::vector<SlotParam> params = {}) {
    return DialogueAct(std::move(intent), std::move(params));
}

SlotParam sv(std::string slot, std::string value) { return {std::move(slot), std::move(value)}; }
SlotParam s(std::string slot) { return {std::move(slot), std::nullopt}; }

// Random valid act drawn from a small restaurant-style vocabulary.
DialogueAct random_act(std::mt19937_64& rng) {
    static const std::vector<std::string> intents = {"hello", "inform",  "request", "offer",  "bye",       "thankyou",
                                                     "reqalts", "canthelp", "affirm", "negate", "welcomemsg"};
    static const std::vector<std::string> slots = {"food", "area", "pricerange", "phone", "name", "postcode"};
    static const std::vector<std::string> values = {"chinese", "north", "asian oriental", "dontcare", "cheap",
                                                    "01223 350688", "the golden wok"};
    auto pick = [&](const auto& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };

    DialogueAct a(pick(intents));
    const auto n = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int i = 0; i < n; ++i) {
        if (a.intent == "request") {
            a.params.push_back(s(pick(slots)));
        } else if (a.intent == "inform" || std::uniform_int_distribution<int>(0, 1)(rng) == 1) {
            a.params.push_back(sv(pick(slots), pick(values)));
        } else {
            a.params.push_back(s(pick(slots)));
        }
    }
    return a;
}

}  // namespace

TEST_SUITE("canonicalize_act") {
    TEST_CASE("sorts params by slot name") {
        const auto out = canonicalize_act(act("inform", {sv("food", "chinese"), sv("area", "north")}));
        CHECK(out == act("inform", {sv("area", "north"), sv("food", "chinese")}));
    }

    TEST_CASE("identity on parameterless acts") { CHECK(canonicalize_act(act("bye")) == act("bye")); }

    TEST_CASE("lowercases the intent") {
        const auto out = canonicalize_act(act("INFORM", {sv("pricerange", "expensive"), sv("food", "vegetarian")}));
        CHECK(out == act("inform", {sv("food", "vegetarian"), sv("pricerange", "expensive")}));
    }

    TEST_CASE("malformed acts name the offending field") {
        CHECK_THROWS_WITH_AS(canonicalize_act(act("")), doctest::Contains("intent"), ValidationError);
        CHECK_THROWS_WITH_AS(canonicalize_act(act("inform", {sv("food", "x"), sv("", "y")})),
                             doctest::Contains("params[1].slot"), ValidationError);
    }

    TEST_CASE("idempotent on random acts") {
        std::mt19937_64 rng(7);
        for (int i = 0; i < 500; ++i) {
            const auto a = random_act(rng);
            const auto once = canonicalize_act(a);
            CHECK(canonicalize_act(once) == once);
        }
    }
}

TEST_SUITE("validate_act") {
    TEST_CASE("request params carry no value, inform params need one") {
        CHECK_NOTHROW(validate_act(request("phone")));
        CHECK_NOTHROW(validate_act(inform("food", "dontcare")));
        CHECK_THROWS_AS(validate_act(act("request", {sv("phone", "123")})), ValidationError);
        CHECK_THROWS_AS(validate_act(act("inform", {s("food")})), ValidationError);
    }

    TEST_CASE("unregistered intents are rejected until registered") {
        CHECK_THROWS_WITH_AS(validate_act(act("confirm")), doctest::Contains("not registered"), ValidationError);
        IntentRegistry registry;
        registry.add("confirm");
        CHECK_NOTHROW(validate_act(act("confirm"), registry));
    }

    TEST_CASE("reserved characters are rejected") {
        CHECK_THROWS_AS(validate_act(act("inform", {sv("food", "a,b")})), ValidationError);
        CHECK_THROWS_AS(validate_act(act("inform", {sv("fo od", "x")})), ValidationError);
    }
}

TEST_SUITE("serialize_acts") {
    TEST_CASE("single request") { CHECK(serialize_acts({request("phone")}) == "request(phone)"); }
    TEST_CASE("empty list") { CHECK(serialize_acts({}) == ""); }
    TEST_CASE("two acts") { CHECK(serialize_acts({act("bye"), act("thankyou")}) == "bye(); thankyou()"); }
    TEST_CASE("mixed params") {
        CHECK(serialize_acts({act("canthelp", {sv("food", "asian oriental"), s("area")})}) ==
              "canthelp(food=asian oriental, area)");
    }
}

TEST_SUITE("deserialize_acts") {
    TEST_CASE("single act") {
        CHECK(deserialize_acts("inform(food=chinese)") == ActList{inform("food", "chinese")});
    }

    TEST_CASE("two acts") {
        CHECK(deserialize_acts("request(phone); bye()") == ActList{request("phone"), act("bye")});
    }

    TEST_CASE("whitespace tolerant") {
        CHECK(deserialize_acts("  inform ( food = asian oriental ,area=north ) ;bye( )  ") ==
              ActList{act("inform", {sv("food", "asian oriental"), sv("area", "north")}), act("bye")});
        CHECK(deserialize_acts("   ").empty());
    }

    TEST_CASE("unbalanced form reports the offset") {
        try {
            deserialize_acts("inform(food=");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.offset() == 12);
        }
    }

    TEST_CASE("other malformed inputs") {
        const auto offset_of = [](std::string_view text) -> std::size_t {
            try {
                deserialize_acts(text);
            } catch (const ParseError& e) {
                return e.offset();
            }
            return std::string_view::npos;
        };
        CHECK(offset_of("bye();") == 6);        // dangling separator
        CHECK(offset_of("(food=x)") == 0);      // empty intent
        CHECK(offset_of("inform(food=x") == 13);  // missing ')'
        CHECK(offset_of("bye() thankyou()") == 6);
        CHECK(offset_of("inform(=x)") == 7);    // empty slot
    }

    TEST_CASE("round trip over random acts") {
        std::mt19937_64 rng(20240611);
        for (int i = 0; i < 500; ++i) {
            ActList acts;
            const auto n = std::uniform_int_distribution<int>(0, 4)(rng);
            for (int k = 0; k < n; ++k) acts.push_back(random_act(rng));
            for (const auto& a : acts) REQUIRE_NOTHROW(validate_act(a));
            const auto parsed = deserialize_acts(serialize_acts(acts));
            CHECK(canonicalize_acts(parsed) == canonicalize_acts(acts));
        }
    }
}

TEST_SUITE("ConversationalFrame") {
    TEST_CASE("exactly the modality payload is present") {
        const auto a = ConversationalFrame::from_acts({act("bye")}, Role::user);
        const auto t = ConversationalFrame::from_text("hello", Role::system);
        const auto c = ConversationalFrame::from_custom({{"k", "v"}}, Role::system);
        for (const auto* f : {&a, &t, &c}) {
            const int present = int(f->has_acts()) + int(f->has_text()) + int(f->has_custom());
            CHECK(present == 1);
        }
        CHECK(a.modality() == Modality::acts);
        CHECK(t.modality() == Modality::text);
        CHECK(c.modality() == Modality::custom);
        CHECK_THROWS_AS(a.text(), ValidationError);
        CHECK_THROWS_AS(t.custom(), ValidationError);
        CHECK_THROWS_AS(c.acts(), ValidationError);
    }

    TEST_CASE("custom frames need a key") {
        CHECK_THROWS_AS(ConversationalFrame::from_custom({}, Role::user), ValidationError);
    }

    TEST_CASE("state frames carry a dialogue state") {
        DialogueState st;
        st.slots_filled = {{"food", "chinese"}};
        st.turn = 3;
        const auto f = make_state_frame(st, Role::system);
        REQUIRE(state_from_frame(f).has_value());
        CHECK(*state_from_frame(f) == st);
        CHECK_FALSE(state_from_frame(ConversationalFrame::from_text("x", Role::user)).has_value());
    }
}

TEST_CASE("dialogue state text form round trips") {
    DialogueState st;
    st.slots_filled = {{"area", "north"}, {"food", "dontcare"}};
    st.requested_slot = "phone";
    st.last_user_acts = {request("phone"), act("thankyou")};
    st.last_system_acts = {act("offer", {sv("name", "the golden wok")})};
    st.offered_item = "the golden wok";
    st.db_match_count = 4;
    st.turn = 7;
    st.is_terminal = true;
    CHECK(deserialize_state(serialize_state(st)) == st);
    CHECK(deserialize_state(serialize_state(DialogueState{})) == DialogueState{});
    CHECK_THROWS_AS(deserialize_state("{nope"), ParseError);
}
