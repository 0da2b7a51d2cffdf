#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pipegen/embeddings/embedding.hpp"

namespace pipegen::hgot {

enum class VertexType { system, user, rag, analysis, plan, design, execution, premise, hypothesis };

std::string to_string(VertexType t);
VertexType vertex_type_from_string(std::string_view s);  // throws std::invalid_argument

struct VertexId {
    std::uint64_t value = 0;
    auto operator<=>(const VertexId&) const = default;
};

struct EdgeId {
    std::uint64_t value = 0;
    auto operator<=>(const EdgeId&) const = default;
};

/// Hyperedge relation label: one of the built-in kinds or a named custom relation.
class Relation {
public:
    enum class Kind {
        context,
        knowledge,
        causation,
        refinement,
        dependency,
        data_flow,
        performance_optimization,
        fault_tolerance,
        operational_concern,
        perf_reliability_tradeoff,
        system_integration,
        custom,
    };

    Relation(Kind kind);  // NOLINT(google-explicit-constructor); kind must not be custom
    static Relation custom(std::string name);  // throws on empty name
    // Built-in names match case-insensitively; anything else becomes a custom relation.
    static Relation parse(std::string_view name);

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

    friend bool operator==(const Relation& a, const Relation& b) { return a.name_ == b.name_; }
    friend auto operator<=>(const Relation& a, const Relation& b) { return a.name_ <=> b.name_; }

private:
    Relation(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}
    Kind kind_;
    std::string name_;
};

struct ThoughtVertex {
    VertexId id;
    std::string content;
    VertexType type = VertexType::analysis;
    double confidence = 0.0;
    embed::EmbeddingVector embedding;
};

struct Hyperedge {
    EdgeId id;
    std::vector<VertexId> sources;  // sorted, unique, non-empty
    std::vector<VertexId> targets;  // sorted, unique, possibly empty
    Relation relation = Relation::Kind::context;
    double weight = 0.0;
    bool directed = false;
    std::uint64_t timestamp = 0;

    // sources ∪ targets, sorted.
    std::vector<VertexId> members() const;
    bool contains(VertexId v) const;
};

}  // namespace pipegen::hgot
