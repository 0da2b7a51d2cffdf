#include "pipegen/hgot/weights.hpp"

#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace pipegen::hgot {

void RelevanceTable::set(const Relation& r, VertexType source, VertexType target, double value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument(fmt::format("relevance {} outside [0, 1]", value));
    }
    table_[{r.name(), source, target}] = value;
}

double RelevanceTable::operator()(const Relation& r, VertexType source, VertexType target) const {
    auto it = table_.find({r.name(), source, target});
    return it == table_.end() ? 1.0 : it->second;
}

RelevanceTable RelevanceTable::standard() {
    RelevanceTable t;
    t.set(Relation::Kind::knowledge, VertexType::rag, VertexType::user, 0.9);
    t.set(Relation::Kind::knowledge, VertexType::rag, VertexType::system, 0.8);
    t.set(Relation::Kind::dependency, VertexType::analysis, VertexType::plan, 1.0);
    t.set(Relation::Kind::dependency, VertexType::plan, VertexType::design, 1.0);
    t.set(Relation::Kind::refinement, VertexType::analysis, VertexType::analysis, 0.9);
    t.set(Relation::Kind::refinement, VertexType::plan, VertexType::plan, 0.9);
    return t;
}

double hyperedge_weight(std::span<const WeightedMember> sources, std::span<const WeightedMember> targets,
                        const Relation& relation, const RelevanceFn& relevance) {
    if (sources.empty() || targets.empty()) {
        throw std::invalid_argument("hyperedge_weight needs non-empty source and target sets");
    }
    double sum = 0.0;
    for (const auto& s : sources) {
        for (const auto& t : targets) {
            sum += embed::cosine(*s.embedding, *t.embedding) * relevance(relation, s.type, t.type);
        }
    }
    return sum / (static_cast<double>(sources.size()) * static_cast<double>(targets.size()));
}

double hyperedge_weight(const ThoughtHypergraph& g, std::span<const VertexId> sources,
                        std::span<const VertexId> targets, const Relation& relation, const RelevanceFn& relevance) {
    auto members = [&g](std::span<const VertexId> ids) {
        std::vector<WeightedMember> out;
        out.reserve(ids.size());
        for (auto id : ids) {
            const auto& v = g.vertex(id);
            out.push_back({&v.embedding, v.type});
        }
        return out;
    };
    auto s = members(sources);
    auto t = members(targets);
    return hyperedge_weight(s, t, relation, relevance);
}

double mean_pairwise_similarity(const ThoughtHypergraph& g, std::span<const VertexId> members) {
    if (members.size() < 2) return 1.0;
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            sum += embed::cosine(g.vertex(members[i]).embedding, g.vertex(members[j]).embedding);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

}  // namespace pipegen::hgot
