#include "pipegen/hgot/construction.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include <fmt/format.h>

namespace pipegen::hgot {
namespace {

std::string single_line(std::string_view s) {
    std::string out(s);
    std::replace(out.begin(), out.end(), '\n', ' ');
    std::replace(out.begin(), out.end(), '\r', ' ');
    return out;
}

std::vector<VertexId> top_by_confidence(const ThoughtHypergraph& g, std::span<const VertexId> pool, std::size_t k) {
    std::vector<VertexId> ids(pool.begin(), pool.end());
    std::stable_sort(ids.begin(), ids.end(), [&g](VertexId a, VertexId b) {
        double ca = g.vertex(a).confidence;
        double cb = g.vertex(b).confidence;
        if (ca != cb) return ca > cb;
        return a < b;
    });
    if (ids.size() > k) ids.resize(k);
    return ids;
}

std::vector<VertexId> concat(std::span<const VertexId> a, std::span<const VertexId> b) {
    std::vector<VertexId> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

providers::ChatRequest generate_request(std::string_view context, const ThoughtHypergraph& g,
                                        std::span<const VertexId> priors, VertexType type, std::string_view aspect) {
    providers::ChatRequest req;
    req.task = "hgot:generate:" + to_string(type);
    req.system_text = fmt::format(
        "You are the {} agent in a hypergraph-of-thoughts design session for stream-processing pipelines.\n"
        "Reply with one concise, concrete thought. No preamble.",
        to_string(type));
    std::string prior_text;
    for (auto p : priors) prior_text += fmt::format("- [{}] {}\n", to_string(g.vertex(p).type), g.vertex(p).content);
    req.user_text = fmt::format("Aspect: {}\nContext: {}\nPrior thoughts:\n{}", aspect, single_line(context),
                                prior_text.empty() ? "- none\n" : prior_text);
    return req;
}

providers::ChatRequest refine_request(const ThoughtVertex& v, std::string_view context) {
    providers::ChatRequest req;
    req.task = "hgot:refine";
    req.system_text =
        "You refine a single design thought for a stream-processing pipeline. Keep it consistent with the "
        "request and make it more specific. Reply with the improved thought only.";
    req.user_text = fmt::format("Thought: {}\nType: {}\nContext: {}\n", single_line(v.content), to_string(v.type),
                                single_line(context));
    return req;
}

VertexId generate(ThoughtHypergraph& g, std::string_view context, std::span<const VertexId> priors,
                  const Completion& complete, VertexType type, std::string_view aspect, const ConfidenceModel& model) {
    for (auto p : priors) {
        if (!g.contains(p)) throw std::invalid_argument(fmt::format("prior vertex {} not in graph", p.value));
    }
    auto content = complete(generate_request(context, g, priors, type, aspect));
    auto id = g.add_vertex(std::move(content), type);
    evaluate(g, id, context, model);
    return id;
}

VertexId refine(ThoughtHypergraph& g, VertexId v, std::string_view context, const Completion& complete,
                const ConfidenceModel& model, const RelevanceFn& relevance) {
    const auto original = g.vertex(v);
    auto content = complete(refine_request(original, context));
    auto refined = g.add_vertex(std::move(content), original.type);
    std::array<VertexId, 1> src{v};
    std::array<VertexId, 1> dst{refined};
    double w = hyperedge_weight(g, src, dst, Relation::Kind::refinement, relevance);
    g.connect({v}, {refined}, Relation::Kind::refinement, w);
    evaluate(g, refined, context, model);
    return refined;
}

std::vector<VertexId> attach_knowledge(ThoughtHypergraph& g, std::span<const std::string> documents,
                                       std::span<const VertexId> system, std::span<const VertexId> user,
                                       const RelevanceFn& relevance) {
    auto anchors = concat(system, user);
    std::vector<VertexId> added;
    for (const auto& doc : documents) {
        auto id = g.add_vertex(doc, VertexType::rag);
        added.push_back(id);
        if (anchors.empty()) continue;
        std::array<VertexId, 1> src{id};
        double w = hyperedge_weight(g, src, anchors, Relation::Kind::knowledge, relevance);
        g.connect({id}, anchors, Relation::Kind::knowledge, w);
    }
    return added;
}

SeedVertices seed_graph(ThoughtHypergraph& g, std::string_view system_constraints, std::string_view user_request,
                        std::span<const std::string> documents, const RelevanceFn& relevance) {
    SeedVertices seeds;
    seeds.system.push_back(g.add_vertex(std::string(system_constraints), VertexType::system));
    seeds.user.push_back(g.add_vertex(std::string(user_request), VertexType::user));
    auto su = concat(seeds.system, seeds.user);
    g.connect(su, {}, Relation::Kind::context, mean_pairwise_similarity(g, su));
    seeds.rag = attach_knowledge(g, documents, seeds.system, seeds.user, relevance);
    return seeds;
}

void ConstructionConfig::validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
    if (max_priors < 1) throw std::invalid_argument("max_priors must be at least 1");
    if (analysis_aspects.empty()) throw std::invalid_argument("at least one analysis aspect is required");
    if (plan_components.empty()) throw std::invalid_argument("at least one plan component is required");
    if (!(clustering.threshold >= -1.0 && clustering.threshold <= 1.0)) {
        throw std::invalid_argument("cluster threshold must lie in [-1, 1]");
    }
    confidence.validate();
}

PipelineDesign extract_optimal_design(const ThoughtHypergraph& g, const std::set<Relation>& via) {
    std::optional<VertexId> root;
    for (const auto& [id, v] : g.vertices()) {
        if (v.type != VertexType::design && v.type != VertexType::plan) continue;
        if (!root || v.confidence > g.vertex(*root).confidence) root = id;
    }
    if (!root) {
        throw EmptyDesignError("hypergraph has no plan or design vertex to extract a design from");
    }

    std::set<VertexId> seen{*root};
    std::deque<VertexId> queue{*root};
    while (!queue.empty()) {
        auto u = queue.front();
        queue.pop_front();
        for (auto eid : g.incident_edges(u)) {
            const auto& e = g.edge(eid);
            if (via.count(e.relation) == 0) continue;
            for (auto m : e.members()) {
                if (seen.insert(m).second) queue.push_back(m);
            }
        }
    }

    PipelineDesign d;
    d.root = *root;
    d.selected.push_back(*root);
    for (auto id : seen) {
        if (id != *root) d.selected.push_back(id);
    }
    d.summary = fmt::format("Design rooted at [{}] {}\n", to_string(g.vertex(*root).type), g.vertex(*root).content);
    for (std::size_t i = 1; i < d.selected.size(); ++i) {
        const auto& v = g.vertex(d.selected[i]);
        d.summary += fmt::format("- [{}] {}\n", to_string(v.type), v.content);
    }
    std::string rels;
    for (const auto& r : via) rels += (rels.empty() ? "" : ", ") + r.name();
    d.rationale = fmt::format("root has the highest confidence ({:.3f}) among plan/design thoughts; {} thoughts "
                              "reachable through {} hyperedges",
                              g.vertex(*root).confidence, d.selected.size() - 1, rels);
    return d;
}

ConstructionResult construct(std::string_view user_request, std::string_view system_constraints,
                             std::span<const std::string> knowledge_docs, const ConstructionConfig& config,
                             std::shared_ptr<const embed::Encoder> encoder, const Completion& complete) {
    config.validate();
    const RelevanceFn relevance = [&config](const Relation& r, VertexType a, VertexType b) {
        return config.relevance(r, a, b);
    };
    const std::string context(user_request);

    ThoughtHypergraph g(std::move(encoder));
    auto seeds = seed_graph(g, system_constraints, user_request, knowledge_docs, relevance);
    for (auto id : g.vertex_ids()) evaluate(g, id, context, config.confidence);

    VertexId current = seeds.user.front();
    int iterations = 0;
    bool converged = false;
    for (int t = 1; t <= config.max_iterations; ++t) {
        iterations = t;
        const auto before = g.vertex_ids();
        std::map<VertexId, double> sigma_before;
        for (auto id : before) sigma_before[id] = g.vertex(id).confidence;

        auto priors = top_by_confidence(g, before, config.max_priors);
        std::vector<VertexId> analyses;
        for (const auto& aspect : config.analysis_aspects) {
            analyses.push_back(generate(g, context, priors, complete, VertexType::analysis, aspect, config.confidence));
        }

        std::string plan_context = context;
        for (auto a : analyses) plan_context += "\n" + g.vertex(a).content;
        auto all_now = g.vertex_ids();
        auto plan_priors = top_by_confidence(g, all_now, config.max_priors);
        std::vector<VertexId> plans;
        for (const auto& component : config.plan_components) {
            plans.push_back(
                generate(g, plan_context, plan_priors, complete, VertexType::plan, component, config.confidence));
        }
        if (!analyses.empty()) {
            for (auto p : plans) {
                std::array<VertexId, 1> dst{p};
                double w = hyperedge_weight(g, analyses, dst, Relation::Kind::dependency, relevance);
                g.connect(analyses, {p}, Relation::Kind::dependency, w);
            }
        }

        auto ids = g.vertex_ids();
        build_hyperedges(g, ids, config.clustering);

        std::vector<VertexId> next;
        if (t % 2 == 1) {
            if (auto v = g.traverse_confidence(current)) next.push_back(*v);
        } else {
            auto rel = g.traverse_relation(current, Relation::Kind::dependency);
            next.assign(rel.begin(), rel.end());
        }

        for (auto v : next) refine(g, v, context, complete, config.confidence, relevance);
        if (!next.empty()) current = top_by_confidence(g, next, 1).front();

        for (auto id : g.vertex_ids()) evaluate(g, id, context, config.confidence);
        double delta = 0.0;
        for (const auto& [id, s] : sigma_before) delta = std::max(delta, std::abs(g.vertex(id).confidence - s));

        if (delta < config.convergence_epsilon || g.vertex_count() == before.size()) {
            converged = true;
            break;
        }
    }

    auto design = extract_optimal_design(g);
    return ConstructionResult{std::move(g), std::move(design), std::move(seeds), iterations, converged};
}

}  // namespace pipegen::hgot
