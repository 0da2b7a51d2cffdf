#include "pipegen/hgot/types.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

#include "pipegen/common/text.hpp"

namespace pipegen::hgot {
namespace {

constexpr std::array<std::pair<VertexType, std::string_view>, 9> kVertexNames{{
    {VertexType::system, "system"},
    {VertexType::user, "user"},
    {VertexType::rag, "rag"},
    {VertexType::analysis, "analysis"},
    {VertexType::plan, "plan"},
    {VertexType::design, "design"},
    {VertexType::execution, "execution"},
    {VertexType::premise, "premise"},
    {VertexType::hypothesis, "hypothesis"},
}};

constexpr std::array<std::pair<Relation::Kind, std::string_view>, 11> kRelationNames{{
    {Relation::Kind::context, "context"},
    {Relation::Kind::knowledge, "knowledge"},
    {Relation::Kind::causation, "causation"},
    {Relation::Kind::refinement, "refinement"},
    {Relation::Kind::dependency, "dependency"},
    {Relation::Kind::data_flow, "data_flow"},
    {Relation::Kind::performance_optimization, "performance_optimization"},
    {Relation::Kind::fault_tolerance, "fault_tolerance"},
    {Relation::Kind::operational_concern, "operational_concern"},
    {Relation::Kind::perf_reliability_tradeoff, "perf_reliability_tradeoff"},
    {Relation::Kind::system_integration, "system_integration"},
}};

}  // namespace

std::string to_string(VertexType t) {
    for (auto [k, name] : kVertexNames) {
        if (k == t) return std::string(name);
    }
    return "analysis";
}

VertexType vertex_type_from_string(std::string_view s) {
    auto v = text::to_lower(s);
    for (auto [k, name] : kVertexNames) {
        if (name == v) return k;
    }
    throw std::invalid_argument(fmt::format("unknown vertex type '{}'", s));
}

Relation::Relation(Kind kind) : kind_(kind) {
    for (auto [k, name] : kRelationNames) {
        if (k == kind) {
            name_ = std::string(name);
            return;
        }
    }
    throw std::invalid_argument("custom relations need a name; use Relation::custom");
}

Relation Relation::custom(std::string name) {
    if (name.empty()) {
        throw std::invalid_argument("custom relation names must be non-empty");
    }
    return Relation(Kind::custom, std::move(name));
}

Relation Relation::parse(std::string_view name) {
    auto lower = text::to_lower(name);
    for (auto [k, n] : kRelationNames) {
        if (n == lower) return Relation(k);
    }
    return custom(std::string(name));
}

std::vector<VertexId> Hyperedge::members() const {
    std::vector<VertexId> out;
    out.reserve(sources.size() + targets.size());
    std::set_union(sources.begin(), sources.end(), targets.begin(), targets.end(), std::back_inserter(out));
    return out;
}

bool Hyperedge::contains(VertexId v) const {
    return std::binary_search(sources.begin(), sources.end(), v) ||
           std::binary_search(targets.begin(), targets.end(), v);
}

}  // namespace pipegen::hgot
