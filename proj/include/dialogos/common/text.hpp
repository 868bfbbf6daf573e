#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dialogos::text {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

// Lowercases, turns every character that is not alphanumeric into a
// separator (apostrophes are dropped so "don't" becomes "dont") and splits
// on whitespace.
std::vector<std::string> tokenize(std::string_view utterance);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool iequals(std::string_view a, std::string_view b);

}  // namespace dialogos::text
