#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pipegen/artifacts/code_extract.hpp"
#include "pipegen/executor/retry.hpp"
#include "pipegen/query/plan.hpp"

namespace pipegen::exec {

struct StepResult {
    int step_id = 0;
    query::StepAction action = query::StepAction::synthesize_response;
    std::string content;
    std::vector<artifacts::CodeFile> produced_code;
    std::string model_used;
    int attempts = 0;
    bool fallback = false;
    std::string failure;  // last error seen when fallback is set
};

nlohmann::json to_json(const StepResult& r);
StepResult step_result_from_json(const nlohmann::json& j);

/// Builds the provider request for a step. `deps` holds the results of the step's
/// dependencies in plan order.
using PromptBuilder =
    std::function<providers::ChatRequest(const query::PlanStep& step, const std::vector<const StepResult*>& deps)>;

/// Called once per finished step, from the worker that ran it.
using ResultSink = std::function<void(const StepResult&)>;

/// Which model tag a step should prefer; nullopt means "keep the active model".
std::optional<providers::Capability> capability_for(query::StepAction action);

/// Deterministic placeholder text; never carries code.
StepResult generate_fallback_result(const query::PlanStep& step, const std::string& failure = "retries exhausted");

/// One step under the retry loop. Always returns; exhaustion yields the fallback result.
/// Code fences in a successful reply (matching `code_language` when given) are extracted
/// into produced_code.
StepResult execute_step_with_retry(RetryHandler& handler, const query::PlanStep& step,
                                   const providers::ChatRequest& request,
                                   const std::optional<std::string>& code_language = std::nullopt);

struct RunPlanOptions {
    int workers = 1;
    std::optional<std::string> code_language;  // fence filter for extraction; nullopt keeps all
};

/// Ready-set scheduler: a step is started only after all of its dependencies are terminal.
/// With one worker, steps run in topological order breaking ties by plan position.
/// Updates step statuses in `plan` and returns one result per step, in plan order.
std::vector<StepResult> run_plan(RetryHandler& handler, query::ExecutionPlan& plan, const PromptBuilder& prompt,
                                 const ResultSink& sink = {}, const RunPlanOptions& options = {});

}  // namespace pipegen::exec
