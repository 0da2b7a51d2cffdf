#include "pipegen/hgot/hypergraph.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace pipegen::hgot {

ThoughtHypergraph::ThoughtHypergraph(std::shared_ptr<const embed::Encoder> encoder) : encoder_(std::move(encoder)) {
    if (!encoder_) {
        throw std::invalid_argument("hypergraph requires an encoder");
    }
}

VertexId ThoughtHypergraph::add_vertex(std::string content, VertexType type, double confidence) {
    auto embedding = encoder_->encode(content);
    return insert_vertex_raw(std::move(content), type, confidence, std::move(embedding));
}

VertexId ThoughtHypergraph::insert_vertex_raw(std::string content, VertexType type, double confidence,
                                              embed::EmbeddingVector embedding) {
    if (confidence < 0.0 || confidence > 1.0) {
        throw std::invalid_argument(fmt::format("confidence {} outside [0, 1]", confidence));
    }
    if (embedding.dim() != encoder_->dim()) {
        throw std::invalid_argument(
            fmt::format("embedding dimension {} does not match encoder dimension {}", embedding.dim(), encoder_->dim()));
    }
    VertexId id{next_vertex_++};
    vertices_.emplace(id, ThoughtVertex{id, std::move(content), type, confidence, std::move(embedding)});
    incidence_[id];
    return id;
}

std::vector<VertexId> ThoughtHypergraph::checked_ids(std::vector<VertexId> ids) const {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (auto id : ids) {
        if (!contains(id)) {
            throw std::invalid_argument(fmt::format("unknown vertex id {}", id.value));
        }
    }
    return ids;
}

const Hyperedge& ThoughtHypergraph::connect(std::vector<VertexId> sources, std::vector<VertexId> targets,
                                            Relation relation, double weight) {
    auto src = checked_ids(std::move(sources));
    auto tgt = checked_ids(std::move(targets));
    if (src.empty()) {
        throw std::invalid_argument("hyperedge sources must be non-empty");
    }
    Hyperedge e;
    e.id = EdgeId{next_edge_++};
    e.directed = !tgt.empty() && src != tgt;
    e.sources = std::move(src);
    e.targets = std::move(tgt);
    e.relation = std::move(relation);
    e.weight = weight;
    e.timestamp = ++clock_;
    for (auto v : e.members()) {
        incidence_[v].push_back(e.id);
        ++membership_count_;
    }
    return edges_.emplace(e.id, std::move(e)).first->second;
}

const ThoughtVertex& ThoughtHypergraph::vertex(VertexId id) const {
    auto it = vertices_.find(id);
    if (it == vertices_.end()) {
        throw std::invalid_argument(fmt::format("unknown vertex id {}", id.value));
    }
    return it->second;
}

const Hyperedge& ThoughtHypergraph::edge(EdgeId id) const {
    auto it = edges_.find(id);
    if (it == edges_.end()) {
        throw std::invalid_argument(fmt::format("unknown hyperedge id {}", id.value));
    }
    return it->second;
}

void ThoughtHypergraph::set_confidence(VertexId id, double confidence) {
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
        throw std::invalid_argument(fmt::format("confidence {} outside [0, 1]", confidence));
    }
    auto it = vertices_.find(id);
    if (it == vertices_.end()) {
        throw std::invalid_argument(fmt::format("unknown vertex id {}", id.value));
    }
    it->second.confidence = confidence;
}

std::vector<VertexId> ThoughtHypergraph::vertices_of_type(VertexType type) const {
    std::vector<VertexId> out;
    for (const auto& [id, v] : vertices_) {
        if (v.type == type) out.push_back(id);
    }
    return out;
}

std::vector<VertexId> ThoughtHypergraph::vertex_ids() const {
    std::vector<VertexId> out;
    out.reserve(vertices_.size());
    for (const auto& [id, v] : vertices_) out.push_back(id);
    return out;
}

const std::vector<EdgeId>& ThoughtHypergraph::incident_edges(VertexId id) const {
    auto it = incidence_.find(id);
    if (it == incidence_.end()) {
        throw std::invalid_argument(fmt::format("unknown vertex id {}", id.value));
    }
    return it->second;
}

std::set<VertexId> ThoughtHypergraph::neighborhood(VertexId v) const {
    std::set<VertexId> out;
    for (auto eid : incident_edges(v)) {
        for (auto m : edges_.at(eid).members()) {
            if (m != v) out.insert(m);
        }
    }
    return out;
}

std::optional<VertexId> ThoughtHypergraph::traverse_confidence(VertexId v) const {
    std::optional<VertexId> best;
    double best_sigma = -1.0;
    for (auto n : neighborhood(v)) {  // ascending ids: strict > keeps the smallest on ties
        double s = vertices_.at(n).confidence;
        if (!best || s > best_sigma) {
            best = n;
            best_sigma = s;
        }
    }
    return best;
}

std::set<VertexId> ThoughtHypergraph::traverse_relation(VertexId v, const Relation& relation) const {
    std::set<VertexId> out;
    for (auto eid : incident_edges(v)) {
        const auto& e = edges_.at(eid);
        if (!(e.relation == relation)) continue;
        for (auto m : e.members()) {
            if (m != v) out.insert(m);
        }
    }
    return out;
}

double ThoughtHypergraph::novelty(VertexId v) const {
    const auto& x = vertex(v).embedding;
    bool any = false;
    double max_sim = 0.0;
    for (const auto& [id, other] : vertices_) {
        if (id == v) continue;
        double s = embed::cosine(x, other.embedding);
        if (!any || s > max_sim) {
            max_sim = s;
            any = true;
        }
    }
    return any ? 1.0 - max_sim : 1.0;
}

std::optional<VertexId> ThoughtHypergraph::traverse_multi(VertexId v, std::string_view context,
                                                          const MultiObjectiveWeights& w) const {
    if (w.alpha < 0.0 || w.beta < 0.0 || w.gamma < 0.0) {
        throw std::invalid_argument("multi-objective weights must be non-negative");
    }
    auto neighbors = neighborhood(v);
    if (neighbors.empty()) return std::nullopt;
    embed::EmbeddingVector ctx;
    if (w.gamma != 0.0) ctx = encoder_->encode(context);

    std::optional<VertexId> best;
    double best_score = 0.0;
    for (auto n : neighbors) {
        const auto& vn = vertices_.at(n);
        double score = w.alpha * vn.confidence;
        if (w.beta != 0.0) score += w.beta * novelty(n);
        if (w.gamma != 0.0) score += w.gamma * embed::cosine(vn.embedding, ctx);
        if (!best || score > best_score) {
            best = n;
            best_score = score;
        }
    }
    return best;
}

embed::EmbeddingVector ThoughtHypergraph::edge_embedding(EdgeId id) const {
    std::vector<embed::EmbeddingVector> xs;
    for (auto m : edge(id).members()) xs.push_back(vertices_.at(m).embedding);
    return embed::mean_vector(xs);
}

nlohmann::json ThoughtHypergraph::to_json() const {
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& [id, v] : vertices_) {
        std::vector<double> x(v.embedding.values().begin(), v.embedding.values().end());
        vs.push_back({{"id", id.value},
                      {"content", v.content},
                      {"vtype", to_string(v.type)},
                      {"confidence", v.confidence},
                      {"embedding", std::move(x)}});
    }
    nlohmann::json es = nlohmann::json::array();
    for (const auto& [id, e] : edges_) {
        nlohmann::json src = nlohmann::json::array();
        nlohmann::json tgt = nlohmann::json::array();
        for (auto s : e.sources) src.push_back(s.value);
        for (auto t : e.targets) tgt.push_back(t.value);
        es.push_back({{"id", id.value},
                      {"sources", std::move(src)},
                      {"targets", std::move(tgt)},
                      {"relation", e.relation.name()},
                      {"weight", e.weight},
                      {"directed", e.directed},
                      {"timestamp", e.timestamp}});
    }
    return {{"vertices", std::move(vs)}, {"hyperedges", std::move(es)}};
}

ThoughtHypergraph ThoughtHypergraph::from_json(const nlohmann::json& doc,
                                               std::shared_ptr<const embed::Encoder> encoder) {
    ThoughtHypergraph g(std::move(encoder));
    for (const auto& jv : doc.at("vertices")) {
        VertexId id{jv.at("id").get<std::uint64_t>()};
        double conf = jv.at("confidence").get<double>();
        if (conf < 0.0 || conf > 1.0) {
            throw std::invalid_argument(fmt::format("vertex {} confidence {} outside [0, 1]", id.value, conf));
        }
        embed::EmbeddingVector x(jv.at("embedding").get<std::vector<double>>());
        if (x.dim() != g.encoder_->dim()) {
            throw std::invalid_argument(fmt::format("vertex {} embedding has dimension {}", id.value, x.dim()));
        }
        g.vertices_.emplace(id, ThoughtVertex{id, jv.at("content").get<std::string>(),
                                              vertex_type_from_string(jv.at("vtype").get<std::string>()), conf,
                                              std::move(x)});
        g.incidence_[id];
        g.next_vertex_ = std::max(g.next_vertex_, id.value + 1);
    }
    for (const auto& je : doc.at("hyperedges")) {
        Hyperedge e;
        e.id = EdgeId{je.at("id").get<std::uint64_t>()};
        for (auto s : je.at("sources")) e.sources.push_back(VertexId{s.get<std::uint64_t>()});
        for (auto t : je.at("targets")) e.targets.push_back(VertexId{t.get<std::uint64_t>()});
        e.sources = g.checked_ids(std::move(e.sources));
        e.targets = g.checked_ids(std::move(e.targets));
        if (e.sources.empty()) throw std::invalid_argument("hyperedge with empty sources");
        e.relation = Relation::parse(je.at("relation").get<std::string>());
        e.weight = je.at("weight").get<double>();
        e.directed = je.at("directed").get<bool>();
        e.timestamp = je.at("timestamp").get<std::uint64_t>();
        for (auto v : e.members()) {
            g.incidence_[v].push_back(e.id);
            ++g.membership_count_;
        }
        g.clock_ = std::max(g.clock_, e.timestamp);
        g.next_edge_ = std::max(g.next_edge_, e.id.value + 1);
        g.edges_.emplace(e.id, std::move(e));
    }
    return g;
}

}  // namespace pipegen::hgot
