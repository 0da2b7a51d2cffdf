#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pipegen/common/system.hpp"
#include "pipegen/query/intent_types.hpp"

namespace pipegen::query {

enum class StepAction {
    analyze_complexity,
    gather_requirements,
    design,
    generate_pipeline,
    deploy_instructions,
    synthesize_response,
};

enum class StepStatus { pending, running, completed, failed_with_fallback };

std::string to_string(StepAction a);
StepAction action_from_string(std::string_view s);
std::string to_string(StepStatus s);

class PlanError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct PlanStep {
    int id = 0;
    StepAction action = StepAction::synthesize_response;
    std::set<int> deps;
    StepStatus status = StepStatus::pending;

    // pending -> running -> completed | failed_with_fallback; anything else throws PlanError.
    void transition(StepStatus next);
    bool terminal() const noexcept {
        return status == StepStatus::completed || status == StepStatus::failed_with_fallback;
    }
};

struct ExecutionPlan {
    std::string query;
    std::vector<PlanStep> steps;
    TargetSystem system = TargetSystem::flink;
    bool use_rag = false;

    const PlanStep& step(int id) const;
    PlanStep& step(int id);

    // Throws PlanError on duplicate ids, dangling deps, cycles, or no terminal
    // synthesize_response step.
    void validate() const;

    // Kahn's algorithm; among ready steps the earliest in plan order goes first.
    // Throws PlanError on a cycle.
    std::vector<int> topological_order() const;
};

/// Full six-step chain for design, optimization and unclassified requests; explanations get
/// {gather_requirements, synthesize_response}; deployments get gather_requirements ->
/// deploy_instructions -> synthesize_response. Steps are numbered from 1 and linearly chained.
ExecutionPlan create_execution_plan(std::string_view query, const QueryIntent& intent, TargetSystem system,
                                    bool use_rag);

nlohmann::json to_json(const ExecutionPlan& plan);

}  // namespace pipegen::query
