#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pipegen::text {

std::string to_lower(std::string_view s);

// Whitespace-separated lowercase tokens.
std::vector<std::string> tokenize(std::string_view s);

bool contains_ci(std::string_view haystack, std::string_view needle);

std::string trim(std::string_view s);

// Truncates to at most max_bytes without splitting a UTF-8 sequence.
std::string truncate_utf8(std::string_view s, std::size_t max_bytes);

bool is_valid_utf8(std::string_view s);

}  // namespace pipegen::text
