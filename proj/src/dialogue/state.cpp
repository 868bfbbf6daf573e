#include "dialogos/dialogue/state.hpp"

#include <json.hpp>

#include "dialogos/common/errors.hpp"

namespace dialogos {

using nlohmann::json;

std::string_view to_string(Role role) { return role == Role::system ? "system" : "user"; }

Role parse_role(std::string_view s) {
    if (s == "system") return Role::system;
    if (s == "user") return Role::user;
    throw ValidationError("unknown role '" + std::string(s) + "' (expected system or user)");
}

std::string serialize_state(const DialogueState& s) {
    json j;
    j["slots_filled"] = s.slots_filled;
    j["requested_slot"] = s.requested_slot ? json(*s.requested_slot) : json(nullptr);
    j["last_user_acts"] = serialize_acts(s.last_user_acts);
    j["last_system_acts"] = serialize_acts(s.last_system_acts);
    j["offered_item"] = s.offered_item ? json(*s.offered_item) : json(nullptr);
    j["db_match_count"] = s.db_match_count;
    j["turn"] = s.turn;
    j["is_terminal"] = s.is_terminal;
    return j.dump();
}

DialogueState deserialize_state(std::string_view text) {
    try {
        const auto j = json::parse(text);
        DialogueState s;
        s.slots_filled = j.at("slots_filled").get<SlotMap>();
        if (!j.at("requested_slot").is_null()) s.requested_slot = j.at("requested_slot").get<std::string>();
        s.last_user_acts = deserialize_acts(j.at("last_user_acts").get<std::string>());
        s.last_system_acts = deserialize_acts(j.at("last_system_acts").get<std::string>());
        if (!j.at("offered_item").is_null()) s.offered_item = j.at("offered_item").get<std::string>();
        s.db_match_count = j.at("db_match_count").get<std::size_t>();
        s.turn = j.at("turn").get<std::size_t>();
        s.is_terminal = j.at("is_terminal").get<bool>();
        return s;
    } catch (const json::parse_error& e) {
        throw ParseError(e.byte, std::string("dialogue state: ") + e.what());
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("dialogue state: ") + e.what());
    }
}

}  // namespace dialogos
