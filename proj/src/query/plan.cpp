#include "pipegen/query/plan.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include <fmt/format.h>

namespace pipegen::query {

std::string to_string(IntentCategory c) {
    switch (c) {
    case IntentCategory::pipeline_design: return "pipeline_design";
    case IntentCategory::optimization: return "optimization";
    case IntentCategory::explanation: return "explanation";
    case IntentCategory::deployment: return "deployment";
    case IntentCategory::other: return "other";
    }
    return "other";
}

IntentCategory category_from_string(std::string_view s) {
    for (auto c : {IntentCategory::pipeline_design, IntentCategory::optimization, IntentCategory::explanation,
                   IntentCategory::deployment, IntentCategory::other}) {
        if (to_string(c) == s) return c;
    }
    throw std::invalid_argument(fmt::format("unknown intent category '{}'", s));
}

nlohmann::json to_json(const QueryIntent& intent) {
    return {{"category", to_string(intent.category)}, {"confidence", intent.confidence}, {"params", intent.params}};
}

namespace {
constexpr StepAction kActions[] = {StepAction::analyze_complexity, StepAction::gather_requirements,
                                   StepAction::design,             StepAction::generate_pipeline,
                                   StepAction::deploy_instructions, StepAction::synthesize_response};
}

std::string to_string(StepAction a) {
    switch (a) {
    case StepAction::analyze_complexity: return "analyze_complexity";
    case StepAction::gather_requirements: return "gather_requirements";
    case StepAction::design: return "design";
    case StepAction::generate_pipeline: return "generate_pipeline";
    case StepAction::deploy_instructions: return "deploy_instructions";
    case StepAction::synthesize_response: return "synthesize_response";
    }
    return "synthesize_response";
}

StepAction action_from_string(std::string_view s) {
    for (auto a : kActions) {
        if (to_string(a) == s) return a;
    }
    throw std::invalid_argument(fmt::format("unknown step action '{}'", s));
}

std::string to_string(StepStatus s) {
    switch (s) {
    case StepStatus::pending: return "pending";
    case StepStatus::running: return "running";
    case StepStatus::completed: return "completed";
    case StepStatus::failed_with_fallback: return "failed-with-fallback";
    }
    return "pending";
}

void PlanStep::transition(StepStatus next) {
    bool ok = (status == StepStatus::pending && next == StepStatus::running) ||
              (status == StepStatus::running &&
               (next == StepStatus::completed || next == StepStatus::failed_with_fallback));
    if (!ok) {
        throw PlanError(fmt::format("step {}: illegal status change {} -> {}", id, to_string(status),
                                    to_string(next)));
    }
    status = next;
}

const PlanStep& ExecutionPlan::step(int id) const {
    for (const auto& s : steps) {
        if (s.id == id) return s;
    }
    throw PlanError(fmt::format("no step with id {}", id));
}

PlanStep& ExecutionPlan::step(int id) {
    return const_cast<PlanStep&>(std::as_const(*this).step(id));
}

std::vector<int> ExecutionPlan::topological_order() const {
    std::map<int, std::size_t> indegree;
    std::map<int, std::vector<int>> dependents;
    for (const auto& s : steps) {
        if (!indegree.emplace(s.id, s.deps.size()).second) throw PlanError(fmt::format("duplicate step id {}", s.id));
    }
    for (const auto& s : steps) {
        for (int d : s.deps) {
            if (!indegree.count(d)) throw PlanError(fmt::format("step {} depends on unknown step {}", s.id, d));
            dependents[d].push_back(s.id);
        }
    }
    std::vector<int> order;
    std::vector<bool> done(steps.size(), false);
    while (order.size() < steps.size()) {
        bool progressed = false;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            if (done[i] || indegree[steps[i].id] != 0) continue;
            done[i] = true;
            order.push_back(steps[i].id);
            for (int t : dependents[steps[i].id]) --indegree[t];
            progressed = true;
            break;
        }
        if (!progressed) throw PlanError("execution plan contains a dependency cycle");
    }
    return order;
}

void ExecutionPlan::validate() const {
    auto order = topological_order();
    std::set<int> depended_on;
    for (const auto& s : steps) depended_on.insert(s.deps.begin(), s.deps.end());
    bool terminal_synth = std::any_of(steps.begin(), steps.end(), [&](const PlanStep& s) {
        return s.action == StepAction::synthesize_response && depended_on.count(s.id) == 0;
    });
    if (!terminal_synth) throw PlanError("execution plan has no terminal synthesize_response step");
}

ExecutionPlan create_execution_plan(std::string_view query, const QueryIntent& intent, TargetSystem system,
                                    bool use_rag) {
    std::vector<StepAction> chain;
    switch (intent.category) {
    case IntentCategory::explanation:
        chain = {StepAction::gather_requirements, StepAction::synthesize_response};
        break;
    case IntentCategory::deployment:
        chain = {StepAction::gather_requirements, StepAction::deploy_instructions, StepAction::synthesize_response};
        break;
    default:
        chain.assign(std::begin(kActions), std::end(kActions));
        break;
    }
    ExecutionPlan plan;
    plan.query = std::string(query);
    plan.system = system;
    plan.use_rag = use_rag;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        PlanStep s;
        s.id = static_cast<int>(i) + 1;
        s.action = chain[i];
        if (i > 0) s.deps.insert(s.id - 1);
        plan.steps.push_back(std::move(s));
    }
    plan.validate();
    return plan;
}

nlohmann::json to_json(const ExecutionPlan& plan) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : plan.steps) {
        steps.push_back({{"id", s.id}, {"action", to_string(s.action)}, {"deps", s.deps}, {"status", to_string(s.status)}});
    }
    return {{"query", plan.query}, {"system", to_string(plan.system)}, {"use_rag", plan.use_rag}, {"steps", steps}};
}

}  // namespace pipegen::query
