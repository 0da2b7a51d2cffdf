#include "pipegen/executor/step_runner.hpp"

#include <algorithm>
#include <condition_variable>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "pipegen/executor/event_log.hpp"

namespace pipegen::exec {

using nlohmann::json;
using query::PlanStep;
using query::StepAction;
using query::StepStatus;

json to_json(const StepResult& r) {
    json code = json::array();
    for (const auto& f : r.produced_code) {
        code.push_back({{"filename", f.filename}, {"language", f.language}, {"content", f.content}});
    }
    return {{"step_id", r.step_id},       {"action", query::to_string(r.action)}, {"content", r.content},
            {"produced_code", code},      {"model_used", r.model_used},           {"attempts", r.attempts},
            {"fallback", r.fallback},     {"failure", r.failure}};
}

StepResult step_result_from_json(const json& j) {
    StepResult r;
    r.step_id = j.at("step_id").get<int>();
    r.action = query::action_from_string(j.at("action").get<std::string>());
    r.content = j.at("content").get<std::string>();
    for (const auto& f : j.value("produced_code", json::array())) {
        r.produced_code.push_back({f.at("filename").get<std::string>(), f.value("language", ""),
                                   f.at("content").get<std::string>()});
    }
    r.model_used = j.value("model_used", "");
    r.attempts = j.value("attempts", 0);
    r.fallback = j.at("fallback").get<bool>();
    r.failure = j.value("failure", "");
    return r;
}

std::optional<providers::Capability> capability_for(StepAction action) {
    switch (action) {
    case StepAction::generate_pipeline: return providers::Capability::codegen;
    case StepAction::analyze_complexity:
    case StepAction::gather_requirements:
    case StepAction::design: return providers::Capability::planning;
    default: return std::nullopt;
    }
}

StepResult generate_fallback_result(const PlanStep& step, const std::string& failure) {
    StepResult r;
    r.step_id = step.id;
    r.action = step.action;
    r.fallback = true;
    r.failure = failure;
    r.content = fmt::format(
        "[fallback] Step {} ({}) could not be completed: {}.\n"
        "No model produced a usable answer for this step. Re-run once the providers are reachable, "
        "or complete the {} step by hand.\n",
        step.id, query::to_string(step.action), failure, query::to_string(step.action));
    return r;
}

StepResult execute_step_with_retry(RetryHandler& handler, const PlanStep& step,
                                   const providers::ChatRequest& request,
                                   const std::optional<std::string>& code_language) {
    if (auto cap = capability_for(step.action)) handler.pool().prefer(*cap);
    auto scope = fmt::format("step:{}", step.id);
    auto outcome = handler.call(request, {}, scope);
    if (!outcome.response) {
        std::string failure = outcome.last_error
                                  ? fmt::format("{} after {} attempts ({})", providers::to_string(*outcome.last_error),
                                                outcome.attempts, outcome.last_detail)
                                  : "retries exhausted";
        auto r = generate_fallback_result(step, failure);
        r.attempts = outcome.attempts;
        r.model_used = outcome.model_used;
        return r;
    }
    StepResult r;
    r.step_id = step.id;
    r.action = step.action;
    r.content = outcome.response->content;
    r.model_used = outcome.model_used;
    r.attempts = outcome.attempts;
    std::optional<std::string_view> hint;
    if (code_language) hint = *code_language;
    r.produced_code = artifacts::extract_code_blocks(r.content, hint, step.id);
    return r;
}

namespace {

class Scheduler {
public:
    Scheduler(RetryHandler& handler, query::ExecutionPlan& plan, const PromptBuilder& prompt, const ResultSink& sink,
              const RunPlanOptions& options)
        : handler_(handler), plan_(plan), prompt_(prompt), sink_(sink), options_(options) {
        for (std::size_t i = 0; i < plan_.steps.size(); ++i) index_[plan_.steps[i].id] = i;
        results_.resize(plan_.steps.size());
    }

    std::vector<StepResult> run() {
        int n = std::max(1, options_.workers);
        if (n == 1) {
            work();
        } else {
            std::vector<std::jthread> threads;
            for (int i = 0; i < n; ++i) threads.emplace_back([this] { work(); });
        }
        if (error_) std::rethrow_exception(error_);
        std::vector<StepResult> out;
        for (auto& r : results_) out.push_back(std::move(*r));
        return out;
    }

private:
    // Caller holds mu_.
    std::optional<std::size_t> next_ready() const {
        for (std::size_t i = 0; i < plan_.steps.size(); ++i) {
            const auto& s = plan_.steps[i];
            if (s.status != StepStatus::pending) continue;
            bool ready = std::all_of(s.deps.begin(), s.deps.end(),
                                     [&](int d) { return plan_.steps[index_.at(d)].terminal(); });
            if (ready) return i;
        }
        return std::nullopt;
    }

    void work() {
        std::unique_lock lock(mu_);
        while (true) {
            cv_.wait(lock, [&] { return error_ || finished_ == plan_.steps.size() || next_ready().has_value(); });
            if (error_ || finished_ == plan_.steps.size()) return;
            auto i = *next_ready();
            auto& step = plan_.steps[i];
            step.transition(StepStatus::running);
            std::vector<const StepResult*> deps;
            for (const auto& s : plan_.steps) {
                if (step.deps.count(s.id)) deps.push_back(&*results_[index_.at(s.id)]);
            }
            if (auto* log = handler_.log()) log->step_start(step.id, query::to_string(step.action));
            const PlanStep snapshot = step;
            lock.unlock();

            StepResult r = execute(snapshot, deps);
            std::exception_ptr sink_error;
            if (sink_) {
                try {
                    sink_(r);
                } catch (...) {
                    sink_error = std::current_exception();
                }
            }

            lock.lock();
            if (sink_error) {
                // Persistence failures are not degradable: stop handing out work.
                if (!error_) error_ = sink_error;
                cv_.notify_all();
                return;
            }
            step.transition(r.fallback ? StepStatus::failed_with_fallback : StepStatus::completed);
            if (auto* log = handler_.log()) log->step_complete(step.id, query::to_string(step.action), r.fallback, r.attempts);
            results_[i] = std::move(r);
            ++finished_;
            cv_.notify_all();
        }
    }

    StepResult execute(const PlanStep& step, const std::vector<const StepResult*>& deps) {
        StepResult r;
        try {
            r = execute_step_with_retry(handler_, step, prompt_(step, deps), options_.code_language);
        } catch (const std::exception& e) {
            spdlog::warn("step {} ({}) failed outside the provider call: {}", step.id, query::to_string(step.action),
                         e.what());
            r = generate_fallback_result(step, std::string("internal error: ") + e.what());
        }
        return r;
    }

    RetryHandler& handler_;
    query::ExecutionPlan& plan_;
    const PromptBuilder& prompt_;
    const ResultSink& sink_;
    const RunPlanOptions& options_;
    std::map<int, std::size_t> index_;
    std::vector<std::optional<StepResult>> results_;
    std::size_t finished_ = 0;
    std::exception_ptr error_;
    std::mutex mu_;
    std::condition_variable cv_;
};

}  // namespace

std::vector<StepResult> run_plan(RetryHandler& handler, query::ExecutionPlan& plan, const PromptBuilder& prompt,
                                 const ResultSink& sink, const RunPlanOptions& options) {
    plan.validate();
    for (const auto& s : plan.steps) {
        if (s.status != StepStatus::pending) throw query::PlanError(fmt::format("step {} is not pending", s.id));
    }
    return Scheduler(handler, plan, prompt, sink, options).run();
}

}  // namespace pipegen::exec
