#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "dialogos/dialogue/act.hpp"

namespace dialogos {

using SlotMap = std::map<std::string, std::string>;

enum class Role { system, user };

std::string_view to_string(Role role);
Role parse_role(std::string_view s);  // throws ValidationError

struct DialogueState {
    SlotMap slots_filled;
    std::optional<std::string> requested_slot;
    ActList last_user_acts;
    ActList last_system_acts;
    std::optional<std::string> offered_item;
    std::size_t db_match_count = 0;
    std::size_t turn = 0;
    bool is_terminal = false;

    friend bool operator==(const DialogueState&, const DialogueState&) = default;
};

// Compact single-line JSON; stable key order.
std::string serialize_state(const DialogueState& state);
DialogueState deserialize_state(std::string_view text);  // throws ParseError

}  // namespace dialogos
