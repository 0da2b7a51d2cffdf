#include "pipegen/pipeline/run.hpp"

#include <algorithm>
#include <mutex>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "pipegen/common/text.hpp"

namespace pipegen::pipeline {

namespace fs = std::filesystem;
using query::StepAction;

void RunConfig::validate() const {
    if (text::trim(query).empty()) throw std::invalid_argument("the query is empty");
    if (models.empty()) throw std::invalid_argument("at least one primary model is required");
    if (output_dir.empty()) throw std::invalid_argument("an output directory is required");
    if (workers < 1) throw std::invalid_argument("workers must be at least 1");
    if (rag_k < 1) throw std::invalid_argument("rag_k must be at least 1");
    if (max_retries < 1) throw std::invalid_argument("max_retries must be at least 1");
    if (!(base_delay.count() >= 0.0)) throw std::invalid_argument("base_delay must be non-negative");
    hgot.validate();
}

namespace {

std::string engine_name(TargetSystem s) {
    switch (s) {
    case TargetSystem::flink: return "Apache Flink (DataStream API, Java)";
    case TargetSystem::storm: return "Apache Storm (topologies of spouts and bolts, Java)";
    case TargetSystem::spark: return "Apache Spark Structured Streaming (Java)";
    }
    return "Apache Flink";
}

std::string instruction(StepAction a) {
    switch (a) {
    case StepAction::analyze_complexity:
        return "Assess the complexity of the requested pipeline: stateful or stateless operators, windowing, "
               "fault tolerance needs and expected scale.";
    case StepAction::gather_requirements:
        return "List the functional and non-functional requirements the pipeline must meet. Call out anything the "
               "request leaves unspecified instead of inventing values.";
    case StepAction::design:
        return "Describe the pipeline architecture: sources, operators, sinks, parallelism, state and checkpointing.";
    case StepAction::generate_pipeline:
        return "Write the complete pipeline for the target system in one fenced java code block, then add brief "
               "notes.";
    case StepAction::deploy_instructions:
        return "Explain how to build, configure and deploy the pipeline.";
    case StepAction::synthesize_response:
        return "Summarize the outcome for the user: what was built, how it meets the request, and open issues.";
    }
    return {};
}

std::string one_line(std::string_view s) {
    std::string out(s);
    std::replace(out.begin(), out.end(), '\n', ' ');
    std::replace(out.begin(), out.end(), '\r', ' ');
    return out;
}

constexpr std::size_t kMaxDepChars = 4000;

}  // namespace

std::string system_constraints(TargetSystem system, const query::PipelineParameters& params) {
    return fmt::format("Target system: {}\nEngine: {}\nStated parameters:\n{}", to_string(system), engine_name(system),
                       query::describe(params));
}

providers::ChatRequest step_prompt(const StepContext& ctx, const query::PlanStep& step,
                                   const std::vector<const exec::StepResult*>& deps) {
    providers::ChatRequest req;
    req.task = "step:" + query::to_string(step.action);
    req.system_text = fmt::format("You are a stream processing engineer.\nTarget system: {}\n{}\n",
                                  to_string(ctx.plan.system), instruction(step.action));
    std::string user = fmt::format("Query: {}\nIntent: {}\nParameters:\n{}", one_line(ctx.plan.query),
                                   query::to_string(ctx.intent.category), query::describe(ctx.params));
    if (!ctx.design.summary.empty()) user += "Design:\n" + ctx.design.summary;
    if (!ctx.rag_docs.empty()) {
        user += "Reference material:\n";
        for (const auto& d : ctx.rag_docs) user += fmt::format("- {} ({})\n", d.source_path, knowledge::to_string(d.component_tag));
    }
    for (const auto* d : deps) {
        user += fmt::format("Result of step {} ({}):\n{}\n", d->step_id, query::to_string(d->action),
                            text::truncate_utf8(d->content, kMaxDepChars));
    }
    req.user_text = std::move(user);
    req.max_tokens = step.action == StepAction::generate_pipeline ? 4096 : 2048;
    return req;
}

RunOutcome run_pipeline(const RunConfig& config, const RunServices& services) {
    config.validate();
    if (!services.encoder) throw std::invalid_argument("run needs an encoder");
    if (config.use_rag && !services.index) throw std::invalid_argument("retrieval requested without a knowledge index");

    auto& clock = services.clock;
    const auto started = clock.now();
    auto bundle = artifacts::ArtifactBundle::create(config.output_dir);

    auto pool = providers::initialize_models(config.models, config.backup_models);
    exec::RetryPolicy policy{config.base_delay, config.max_retries, std::make_shared<exec::SeededRandom>(config.seed)};
    exec::RetryHandler handler(pool, services.registry, policy, clock, services.log);
    const auto& patterns = services.patterns ? *services.patterns : query::IntentPatterns::builtin();

    auto intent = query::detect_intent(config.query, handler, patterns);
    auto params = query::extract_parameters(config.query, intent, handler);
    auto plan = query::create_execution_plan(config.query, intent, config.system, config.use_rag);
    if (services.log) services.log->note("plan", query::to_json(plan));

    std::vector<knowledge::DocumentChunk> rag_docs;
    if (config.use_rag) {
        rag_docs = knowledge::retrieve_relevant_docs(*services.index, config.query, config.system, config.rag_k,
                                                     *services.encoder);
    }
    std::vector<std::string> docs;
    for (const auto& d : rag_docs) docs.push_back(d.content);

    hgot::Completion complete = [&handler](const providers::ChatRequest& req) {
        auto r = handler.call(req, {}, req.task);
        if (r.response) return r.response->content;
        return fmt::format("[fallback] no model answered {}", req.task);
    };
    auto construction = hgot::construct(config.query, system_constraints(config.system, params), docs, config.hgot,
                                        services.encoder, complete);

    RunOutcome out{std::move(bundle), std::move(intent), std::move(params), std::move(plan),
                   std::move(rag_docs), std::move(construction), {}, {}, {}, {}};

    auto memory_path = config.memory_file.empty() ? out.bundle.memory_file : config.memory_file;
    artifacts::MemoryStore memory(memory_path, services.encoder);
    out.prior_memory = memory.load(config.query);

    StepContext ctx{out.plan, out.intent, out.params, out.hgot.design, out.rag_docs};
    exec::PromptBuilder prompt = [&ctx](const query::PlanStep& s, const std::vector<const exec::StepResult*>& deps) {
        return step_prompt(ctx, s, deps);
    };
    std::mutex sink_mu;
    exec::ResultSink sink = [&](const exec::StepResult& r) {
        std::lock_guard lock(sink_mu);
        artifacts::save_step_result(out.bundle, r);
        artifacts::save_code_files(out.bundle, r);
    };
    exec::RunPlanOptions opts;
    opts.workers = config.workers;
    out.results = exec::run_plan(handler, out.plan, prompt, sink, opts);
    std::sort(out.bundle.step_files.begin(), out.bundle.step_files.end());

    out.response = artifacts::synthesize_response(out.plan, out.hgot.graph, out.results);
    artifacts::save_graph(out.bundle, out.hgot.graph);
    memory.save(config.query, out.response, "graph.json", clock.now());
    out.bundle.memory_file = memory_path;

    out.summary = artifacts::create_session_summary(config.query, out.intent, config.system, out.bundle, started,
                                                    clock.now());
    if (fs::path(memory_path).parent_path() == out.bundle.root_dir) {
        out.summary.artifacts[fs::path(memory_path).filename().generic_string()] = "interaction memory";
    }
    artifacts::write_text_file(out.bundle.summary_file, artifacts::render_summary(out.summary, out.response));
    return out;
}

}  // namespace pipegen::pipeline
