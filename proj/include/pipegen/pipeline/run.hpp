#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pipegen/artifacts/bundle.hpp"
#include "pipegen/artifacts/memory.hpp"
#include "pipegen/artifacts/report.hpp"
#include "pipegen/executor/event_log.hpp"
#include "pipegen/executor/step_runner.hpp"
#include "pipegen/hgot/construction.hpp"
#include "pipegen/knowledge/index.hpp"
#include "pipegen/query/intent.hpp"
#include "pipegen/query/parameters.hpp"

namespace pipegen::pipeline {

struct RunConfig {
    std::string query;
    TargetSystem system = TargetSystem::flink;
    bool use_rag = false;
    std::size_t rag_k = 3;
    std::vector<providers::ModelHandle> models;
    std::vector<providers::ModelHandle> backup_models;
    std::uint64_t seed = 0;
    exec::Millis base_delay{1000.0};
    int max_retries = 5;
    int workers = 1;
    std::filesystem::path output_dir;
    std::filesystem::path memory_file;  // <output_dir>/memory.jsonl when empty
    hgot::ConstructionConfig hgot;

    void validate() const;  // throws std::invalid_argument
};

struct RunServices {
    const providers::BackendRegistry& registry;
    std::shared_ptr<const embed::Encoder> encoder;
    exec::Clock& clock;
    exec::EventLog* log = nullptr;
    const knowledge::KnowledgeIndex* index = nullptr;  // required when use_rag is set
    const query::IntentPatterns* patterns = nullptr;   // builtin table when null
};

struct RunOutcome {
    artifacts::ArtifactBundle bundle;
    query::QueryIntent intent;
    query::PipelineParameters params;
    query::ExecutionPlan plan;
    std::vector<knowledge::DocumentChunk> rag_docs;
    hgot::ConstructionResult hgot;
    std::vector<exec::StepResult> results;
    std::optional<artifacts::MemoryRecord> prior_memory;
    std::string response;
    artifacts::SessionSummary summary;
};

/// Constraint text for the system seed vertex; its first line is "Target system: <name>".
std::string system_constraints(TargetSystem system, const query::PipelineParameters& params);

struct StepContext {
    const query::ExecutionPlan& plan;
    const query::QueryIntent& intent;
    const query::PipelineParameters& params;
    const hgot::PipelineDesign& design;
    const std::vector<knowledge::DocumentChunk>& rag_docs;
};

providers::ChatRequest step_prompt(const StepContext& ctx, const query::PlanStep& step,
                                   const std::vector<const exec::StepResult*>& deps);

/// The whole flow: intent, parameters, plan, optional retrieval, hypergraph construction,
/// dependency-ordered step execution, then response synthesis, graph, memory and summary
/// written to the bundle. Provider failures degrade to fallback content; only configuration
/// and filesystem errors throw.
RunOutcome run_pipeline(const RunConfig& config, const RunServices& services);

}  // namespace pipegen::pipeline
