#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pipegen/hgot/hypergraph.hpp"

namespace pipegen::hgot {

/// Average-linkage agglomerative clustering on distance (1 - similarity). Clusters merge
/// while the closest pair is within (1 - threshold). Ties merge the lowest-indexed pair.
/// Returned clusters list member indices ascending, ordered by their smallest member.
std::vector<std::vector<std::size_t>> average_linkage_clusters(const embed::SimilarityMatrix& similarity,
                                                               double threshold);

/// Keyword theme of a cluster mapped to a relation; custom("cluster-<ordinal>") when no
/// keyword group matches.
Relation theme_relation(std::span<const std::string> contents, std::size_t ordinal);

/// Optional provider-backed theme namer; returning nullopt falls back to the keyword table.
using ThemeNamer = std::function<std::optional<Relation>(std::span<const std::string> contents)>;

struct ClusterConfig {
    double threshold = 0.7;
    // Skip clusters already present as an undirected hyperedge with the same members and relation.
    bool skip_existing = true;
    ThemeNamer theme_namer;
};

/// Clusters the given vertices and connects one undirected hyperedge per cluster of size >= 2,
/// weighted by the mean pairwise similarity of its members. Returns the inserted hyperedges.
std::vector<Hyperedge> build_hyperedges(ThoughtHypergraph& g, std::span<const VertexId> vertices,
                                        const ClusterConfig& config = {});

}  // namespace pipegen::hgot
