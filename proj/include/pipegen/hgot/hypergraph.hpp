#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pipegen/embeddings/embedding.hpp"
#include "pipegen/hgot/types.hpp"

namespace pipegen::hgot {

struct MultiObjectiveWeights {
    double alpha = 1.0;  // confidence
    double beta = 0.0;   // novelty
    double gamma = 0.0;  // relevance to the context
};

/// Hypergraph of thoughts. Vertices are stored once; each hyperedge keeps only member-id
/// lists, and the incidence index mirrors that membership, so storage is O(|V| + sum |e|).
///
/// Mutation is single-writer. The type is a regular value: copying it yields an immutable
/// snapshot that read-only traversals may share across threads.
class ThoughtHypergraph {
public:
    explicit ThoughtHypergraph(std::shared_ptr<const embed::Encoder> encoder);

    /// Adds a vertex whose embedding is encode(content).
    VertexId add_vertex(std::string content, VertexType type, double confidence = 0.0);

    /// Adds a vertex with a caller-supplied embedding (fixtures and deserialization).
    /// The embedding must match the encoder dimension.
    VertexId insert_vertex_raw(std::string content, VertexType type, double confidence,
                               embed::EmbeddingVector embedding);

    /// Inserts a hyperedge. The edge is directed iff targets is non-empty and differs from
    /// sources. Throws std::invalid_argument on unknown ids or empty sources.
    const Hyperedge& connect(std::vector<VertexId> sources, std::vector<VertexId> targets, Relation relation,
                             double weight);

    bool contains(VertexId id) const { return vertices_.count(id) != 0; }
    const ThoughtVertex& vertex(VertexId id) const;  // throws std::invalid_argument
    const Hyperedge& edge(EdgeId id) const;          // throws std::invalid_argument
    void set_confidence(VertexId id, double confidence);  // throws outside [0, 1]

    const std::map<VertexId, ThoughtVertex>& vertices() const noexcept { return vertices_; }
    const std::map<EdgeId, Hyperedge>& hyperedges() const noexcept { return edges_; }
    std::vector<VertexId> vertices_of_type(VertexType type) const;
    std::vector<VertexId> vertex_ids() const;
    const std::vector<EdgeId>& incident_edges(VertexId id) const;

    std::size_t vertex_count() const noexcept { return vertices_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::size_t membership_count() const noexcept { return membership_count_; }
    std::uint64_t clock() const noexcept { return clock_; }

    const embed::Encoder& encoder() const noexcept { return *encoder_; }
    std::shared_ptr<const embed::Encoder> encoder_ptr() const noexcept { return encoder_; }

    /// Co-members of v across all hyperedges, excluding v.
    std::set<VertexId> neighborhood(VertexId v) const;

    /// Highest-confidence neighbor; ties go to the smallest id. Empty neighborhood -> nullopt.
    std::optional<VertexId> traverse_confidence(VertexId v) const;

    /// Vertices sharing a hyperedge labelled `relation` with v.
    std::set<VertexId> traverse_relation(VertexId v, const Relation& relation) const;

    /// argmax over neighbors of alpha*sigma + beta*novelty + gamma*relevance(context).
    std::optional<VertexId> traverse_multi(VertexId v, std::string_view context,
                                           const MultiObjectiveWeights& weights) const;

    /// 1 - max cosine to any other vertex; 1 when v is the only vertex.
    double novelty(VertexId v) const;

    /// Hyperedge embedding: mean of member-vertex embeddings.
    embed::EmbeddingVector edge_embedding(EdgeId id) const;

    nlohmann::json to_json() const;
    static ThoughtHypergraph from_json(const nlohmann::json& doc, std::shared_ptr<const embed::Encoder> encoder);

private:
    std::vector<VertexId> checked_ids(std::vector<VertexId> ids) const;

    std::shared_ptr<const embed::Encoder> encoder_;
    std::map<VertexId, ThoughtVertex> vertices_;
    std::map<EdgeId, Hyperedge> edges_;
    std::map<VertexId, std::vector<EdgeId>> incidence_;
    std::uint64_t next_vertex_ = 0;
    std::uint64_t next_edge_ = 0;
    std::uint64_t clock_ = 0;
    std::size_t membership_count_ = 0;
};

}  // namespace pipegen::hgot
