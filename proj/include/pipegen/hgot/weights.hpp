#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <tuple>

#include "pipegen/hgot/hypergraph.hpp"

namespace pipegen::hgot {

using RelevanceFn = std::function<double(const Relation&, VertexType source, VertexType target)>;

/// Static relevance(r, tau_i, tau_k) lookup in [0, 1]; unknown keys score 1.
class RelevanceTable {
public:
    void set(const Relation& r, VertexType source, VertexType target, double value);  // throws outside [0, 1]
    double operator()(const Relation& r, VertexType source, VertexType target) const;

    static RelevanceTable standard();

private:
    std::map<std::tuple<std::string, VertexType, VertexType>, double> table_;
};

struct WeightedMember {
    const embed::EmbeddingVector* embedding;
    VertexType type;
};

/// w = 1/(|S||T|) * sum_{i in S} sum_{k in T} cos(x_i, x_k) * relevance(r, tau_i, tau_k).
/// Throws std::invalid_argument when S or T is empty.
double hyperedge_weight(std::span<const WeightedMember> sources, std::span<const WeightedMember> targets,
                        const Relation& relation, const RelevanceFn& relevance);

double hyperedge_weight(const ThoughtHypergraph& g, std::span<const VertexId> sources,
                        std::span<const VertexId> targets, const Relation& relation, const RelevanceFn& relevance);

/// Mean cosine over unordered member pairs; 1 for a single member.
double mean_pairwise_similarity(const ThoughtHypergraph& g, std::span<const VertexId> members);

}  // namespace pipegen::hgot
