#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pipegen/common/system.hpp"
#include "pipegen/executor/retry.hpp"
#include "pipegen/query/intent_types.hpp"

namespace pipegen::query {

/// Everything is optional: a field is only set when the query (or a provider reply) states it.
struct PipelineParameters {
    std::optional<std::string> source_type;  // "kafka", "file", ...
    std::optional<std::string> source_topic;
    std::optional<std::string> sink_type;
    std::optional<std::string> sink_path;
    std::optional<std::string> pipeline_type;  // "streaming" or "batch"
    std::vector<std::string> operations;
    std::optional<std::chrono::milliseconds> windowing;
    std::optional<std::map<std::string, int>> parallelism;  // stage -> degree, each >= 1
    std::optional<std::chrono::milliseconds> checkpoint_interval;
    std::optional<std::string> error_handling;
    std::optional<TargetSystem> target_system;

    bool empty() const;
    bool operator==(const PipelineParameters&) const = default;
};

nlohmann::json to_json(const PipelineParameters& p);
/// Values that fail the invariants (non-positive durations, parallelism < 1, unknown system)
/// are dropped rather than rejected.
PipelineParameters parameters_from_json(const nlohmann::json& j);

/// Human-readable listing, naming the unspecified fields so prompts can mention the gaps.
std::string describe(const PipelineParameters& p);

/// Deterministic extraction from the query text alone.
PipelineParameters extract_parameters_regex(std::string_view query);

providers::ChatRequest parameters_request(std::string_view query, const QueryIntent& intent,
                                          const PipelineParameters& known);

/// Regex extraction, then the provider fills fields the text left open. Provider values never
/// override what the query states. On exhaustion the regex result is returned as is.
PipelineParameters extract_parameters(std::string_view query, const QueryIntent& intent,
                                      exec::RetryHandler& handler);

}  // namespace pipegen::query
