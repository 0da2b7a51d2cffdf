#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pipegen/artifacts/bundle.hpp"
#include "pipegen/query/intent_types.hpp"

namespace pipegen::artifacts {

/// Markdown narrative: the request, an architecture section built from the graph's
/// design and plan thoughts, then one section per step in plan order. Fallback steps carry
/// a "Degraded result" marker. Byte-identical for identical inputs.
std::string synthesize_response(const query::ExecutionPlan& plan, const hgot::ThoughtHypergraph& graph,
                                const std::vector<exec::StepResult>& results);

struct SessionSummary {
    std::string query;
    query::QueryIntent intent;
    TargetSystem system = TargetSystem::flink;
    std::map<std::string, std::string> artifacts;  // bundle-relative path -> purpose
    exec::TimePoint started_at;
    exec::TimePoint finished_at;
};

/// Catalogues every file in the bundle with its purpose.
SessionSummary create_session_summary(const std::string& query, const query::QueryIntent& intent,
                                      TargetSystem system, const ArtifactBundle& bundle, exec::TimePoint started_at,
                                      exec::TimePoint finished_at);

nlohmann::json to_json(const SessionSummary& s);

/// summary.md: session facts, the artifact catalogue, then the synthesized response.
std::string render_summary(const SessionSummary& s, const std::string& response);

}  // namespace pipegen::artifacts
