#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace pipegen {

// Sorted keys, two-space indent, UTF-8 (invalid sequences replaced), trailing newline.
// Dumping the same value twice always yields the same bytes.
std::string canonical_dump(const nlohmann::json& value);

// Single-line variant used for JSON-lines stores and event logs.
std::string canonical_line(const nlohmann::json& value);

// Writes canonical_dump(value) to path; throws std::runtime_error on I/O failure.
void write_canonical_json(const std::filesystem::path& path, const nlohmann::json& value);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace pipegen
