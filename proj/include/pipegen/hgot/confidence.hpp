#pragma once

#include <functional>
#include <string_view>

#include "pipegen/hgot/hypergraph.hpp"

namespace pipegen::hgot {

using ComponentFn = std::function<double(const ThoughtVertex&, std::string_view context, const ThoughtHypergraph&)>;

/// sigma = alpha*rel + beta*cons + gamma*spec, with alpha + beta + gamma == 1.
/// Component outputs are clamped to [0, 1] before mixing.
struct ConfidenceModel {
    double alpha = 0.5;
    double beta = 0.3;
    double gamma = 0.2;
    ComponentFn rel_fn;
    ComponentFn cons_fn;
    ComponentFn spec_fn;

    // Throws std::invalid_argument unless the weights are non-negative, sum to 1 within 1e-12,
    // and every component function is set.
    void validate() const;

    static ConfidenceModel standard(double alpha = 0.5, double beta = 0.3, double gamma = 0.2);
};

// cosine(x_v, encode(context)) clamped to [0, 1].
double context_relevance(const ThoughtVertex& v, std::string_view context, const ThoughtHypergraph& g);
// Mean weight of hyperedges incident to v (0 when isolated), clamped to [0, 1].
double graph_consistency(const ThoughtVertex& v, std::string_view context, const ThoughtHypergraph& g);
// min(1, distinct tokens / 32).
double specificity(const ThoughtVertex& v, std::string_view context, const ThoughtHypergraph& g);

/// Computes the confidence without writing it.
double score_confidence(const ThoughtVertex& v, std::string_view context, const ThoughtHypergraph& g,
                        const ConfidenceModel& model);

/// Computes the confidence and stores it on the vertex.
double evaluate(ThoughtHypergraph& g, VertexId v, std::string_view context, const ConfidenceModel& model);

}  // namespace pipegen::hgot
