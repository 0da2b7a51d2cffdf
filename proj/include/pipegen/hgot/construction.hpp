#pragma once

#include <functional>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pipegen/hgot/clustering.hpp"
#include "pipegen/hgot/confidence.hpp"
#include "pipegen/hgot/hypergraph.hpp"
#include "pipegen/hgot/weights.hpp"
#include "pipegen/providers/backend.hpp"

namespace pipegen::hgot {

/// Produces the text of a thought. Throws providers::ProviderError on failure; callers
/// decide whether to wrap it with retries.
using Completion = std::function<std::string(const providers::ChatRequest&)>;

providers::ChatRequest generate_request(std::string_view context, const ThoughtHypergraph& g,
                                        std::span<const VertexId> priors, VertexType type, std::string_view aspect);
providers::ChatRequest refine_request(const ThoughtVertex& v, std::string_view context);

/// Creates a vertex from the context and up to k prior thoughts; its confidence is scored
/// immediately. Priors are only quoted in the prompt, not connected.
VertexId generate(ThoughtHypergraph& g, std::string_view context, std::span<const VertexId> priors,
                  const Completion& complete, VertexType type, std::string_view aspect,
                  const ConfidenceModel& model);

/// Adds an improved copy of v (same type) and a directed refinement edge {v} -> {refined}.
/// The original vertex is left untouched.
VertexId refine(ThoughtHypergraph& g, VertexId v, std::string_view context, const Completion& complete,
                const ConfidenceModel& model, const RelevanceFn& relevance);

/// One rag vertex per document, each joined to the system and user seeds by a directed
/// knowledge hyperedge {doc} -> S u U.
std::vector<VertexId> attach_knowledge(ThoughtHypergraph& g, std::span<const std::string> documents,
                                       std::span<const VertexId> system, std::span<const VertexId> user,
                                       const RelevanceFn& relevance);

struct SeedVertices {
    std::vector<VertexId> system;
    std::vector<VertexId> user;
    std::vector<VertexId> rag;
};

/// Seeds S, U (joined by an undirected context hyperedge) and optional R.
SeedVertices seed_graph(ThoughtHypergraph& g, std::string_view system_constraints, std::string_view user_request,
                        std::span<const std::string> documents, const RelevanceFn& relevance);

struct ConstructionConfig {
    int max_iterations = 3;
    ConfidenceModel confidence = ConfidenceModel::standard();
    ClusterConfig clustering;
    RelevanceTable relevance = RelevanceTable::standard();
    std::vector<std::string> analysis_aspects{"data source and ingestion", "processing logic and windowing",
                                              "state, checkpointing and fault tolerance"};
    std::vector<std::string> plan_components{"source and sink configuration", "operator chain and parallelism",
                                             "recovery and error handling"};
    std::size_t max_priors = 3;
    // Converged when no confidence moves by this much in one iteration.
    double convergence_epsilon = 1e-3;

    void validate() const;
};

struct PipelineDesign {
    VertexId root;
    std::vector<VertexId> selected;  // root first, then ascending ids
    std::string summary;
    std::string rationale;
};

class EmptyDesignError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Highest-confidence design/plan vertex (ties: smallest id) plus everything reachable from
/// it through hyperedges labelled with one of `via`.
PipelineDesign extract_optimal_design(const ThoughtHypergraph& g,
                                      const std::set<Relation>& via = {Relation::Kind::dependency,
                                                                       Relation::Kind::data_flow});

struct ConstructionResult {
    ThoughtHypergraph graph;
    PipelineDesign design;
    SeedVertices seeds;
    int iterations = 0;
    bool converged = false;
};

/// Iterative hypergraph construction: seed, then per iteration generate analysis and plan
/// thoughts, link each plan thought to the iteration's analyses by a dependency edge,
/// re-cluster, traverse (confidence-guided on odd iterations, dependency-guided on even
/// ones), refine the selected vertices, and stop on convergence or max_iterations.
ConstructionResult construct(std::string_view user_request, std::string_view system_constraints,
                             std::span<const std::string> knowledge_docs, const ConstructionConfig& config,
                             std::shared_ptr<const embed::Encoder> encoder, const Completion& complete);

}  // namespace pipegen::hgot
