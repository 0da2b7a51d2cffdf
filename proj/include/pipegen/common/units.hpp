#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace pipegen {

// Accepts "250ms", "10s", "5m", "2h" and bare integers (seconds).
// Throws std::invalid_argument on malformed or non-positive input.
std::chrono::milliseconds parse_duration(std::string_view text);

// Accepts "2000", "512B", "64KiB", "1MiB", "1GiB" and the decimal forms "1KB", "1MB", "1GB".
std::uint64_t parse_size(std::string_view text);

std::string format_duration(std::chrono::milliseconds d);

}  // namespace pipegen
