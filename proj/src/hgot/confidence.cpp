#include "pipegen/hgot/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "pipegen/common/text.hpp"

namespace pipegen::hgot {

void ConfidenceModel::validate() const {
    if (alpha < 0.0 || beta < 0.0 || gamma < 0.0) {
        throw std::invalid_argument("confidence weights must be non-negative");
    }
    if (std::abs(alpha + beta + gamma - 1.0) > 1e-12) {
        throw std::invalid_argument(fmt::format("confidence weights sum to {}, expected 1", alpha + beta + gamma));
    }
    if (!rel_fn || !cons_fn || !spec_fn) {
        throw std::invalid_argument("confidence model needs rel, cons and spec functions");
    }
}

ConfidenceModel ConfidenceModel::standard(double alpha, double beta, double gamma) {
    ConfidenceModel m{alpha, beta, gamma, context_relevance, graph_consistency, specificity};
    m.validate();
    return m;
}

double context_relevance(const ThoughtVertex& v, std::string_view context, const ThoughtHypergraph& g) {
    return std::clamp(embed::cosine(v.embedding, g.encoder().encode(context)), 0.0, 1.0);
}

double graph_consistency(const ThoughtVertex& v, std::string_view, const ThoughtHypergraph& g) {
    const auto& incident = g.incident_edges(v.id);
    if (incident.empty()) return 0.0;
    double sum = 0.0;
    for (auto e : incident) sum += g.edge(e).weight;
    return std::clamp(sum / static_cast<double>(incident.size()), 0.0, 1.0);
}

double specificity(const ThoughtVertex& v, std::string_view, const ThoughtHypergraph&) {
    auto tokens = text::tokenize(v.content);
    std::set<std::string> distinct(tokens.begin(), tokens.end());
    return std::min(1.0, static_cast<double>(distinct.size()) / 32.0);
}

double score_confidence(const ThoughtVertex& v, std::string_view context, const ThoughtHypergraph& g,
                        const ConfidenceModel& model) {
    auto clamp01 = [](double x) { return std::isfinite(x) ? std::clamp(x, 0.0, 1.0) : 0.0; };
    double rel = clamp01(model.rel_fn(v, context, g));
    double cons = clamp01(model.cons_fn(v, context, g));
    double spec = clamp01(model.spec_fn(v, context, g));
    return std::clamp(model.alpha * rel + model.beta * cons + model.gamma * spec, 0.0, 1.0);
}

double evaluate(ThoughtHypergraph& g, VertexId v, std::string_view context, const ConfidenceModel& model) {
    double sigma = score_confidence(g.vertex(v), context, g, model);
    g.set_confidence(v, sigma);
    return sigma;
}

}  // namespace pipegen::hgot
