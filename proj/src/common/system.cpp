#include "pipegen/common/system.hpp"

#include <stdexcept>

#include "pipegen/common/text.hpp"

namespace pipegen {

std::string to_string(TargetSystem s) {
    switch (s) {
    case TargetSystem::flink: return "flink";
    case TargetSystem::storm: return "storm";
    case TargetSystem::spark: return "spark";
    }
    return "flink";
}

TargetSystem system_from_string(std::string_view s) {
    auto v = text::to_lower(text::trim(s));
    if (v == "flink") return TargetSystem::flink;
    if (v == "storm") return TargetSystem::storm;
    if (v == "spark") return TargetSystem::spark;
    throw std::invalid_argument("unknown stream processing system: " + std::string(s));
}

}  // namespace pipegen
