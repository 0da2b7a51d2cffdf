#pragma once

#include <array>
#include <string>
#include <string_view>

namespace pipegen {

/// Stream processing engines that code can be generated for.
enum class TargetSystem { flink, storm, spark };

inline constexpr std::array<TargetSystem, 3> all_systems{TargetSystem::flink, TargetSystem::storm,
                                                         TargetSystem::spark};

std::string to_string(TargetSystem s);
TargetSystem system_from_string(std::string_view s);  // case-insensitive; throws std::invalid_argument

}  // namespace pipegen
