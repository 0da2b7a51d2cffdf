#include "pipegen/hgot/clustering.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <set>
#include <string_view>

#include <fmt/format.h>

#include "pipegen/common/text.hpp"

namespace pipegen::hgot {
namespace {

struct ThemeKeywords {
    Relation::Kind kind;
    std::array<std::string_view, 10> words;
};

// Order matters: earlier groups win ties.
const std::array<ThemeKeywords, 6> kThemes{{
    {Relation::Kind::fault_tolerance,
     {"checkpoint", "checkpointing", "recovery", "dlq", "fault", "restart", "snapshot", "exactly-once", "retry", "dead"}},
    {Relation::Kind::performance_optimization,
     {"parallelism", "throughput", "latency", "memory", "scaling", "scale", "bottleneck", "performance", "slots", ""}},
    {Relation::Kind::data_flow,
     {"source", "sink", "kafka", "ingest", "ingestion", "output", "flow", "topic", "stream", "input"}},
    {Relation::Kind::operational_concern,
     {"monitoring", "metrics", "deployment", "deploy", "logging", "alerting", "config", "configuration", "ops", ""}},
    {Relation::Kind::dependency,
     {"depends", "dependency", "requires", "prerequisite", "before", "after", "order", "upstream", "downstream", ""}},
    {Relation::Kind::causation, {"causes", "because", "leads", "results", "triggers", "impact", "effect", "", "", ""}},
}};

std::string strip_punct(std::string_view token) {
    std::size_t b = 0;
    std::size_t e = token.size();
    auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'; };
    while (b < e && !is_word(token[b])) ++b;
    while (e > b && !is_word(token[e - 1])) --e;
    return std::string(token.substr(b, e - b));
}

}  // namespace

std::vector<std::vector<std::size_t>> average_linkage_clusters(const embed::SimilarityMatrix& sim, double threshold) {
    const std::size_t n = sim.size();
    const double cut = 1.0 - threshold;
    std::vector<std::vector<std::size_t>> clusters;
    clusters.reserve(n);
    for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});

    // dist[a][b]: average linkage distance between live clusters a and b.
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) dist[i][j] = 1.0 - sim(i, j);
    }
    std::vector<bool> alive(n, true);

    while (true) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t ba = 0;
        std::size_t bb = 0;
        for (std::size_t a = 0; a < n; ++a) {
            if (!alive[a]) continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!alive[b]) continue;
                if (dist[a][b] < best) {
                    best = dist[a][b];
                    ba = a;
                    bb = b;
                }
            }
        }
        if (!(best <= cut)) break;

        // Lance-Williams update for average linkage.
        double na = static_cast<double>(clusters[ba].size());
        double nb = static_cast<double>(clusters[bb].size());
        for (std::size_t c = 0; c < n; ++c) {
            if (!alive[c] || c == ba || c == bb) continue;
            double d = (na * dist[ba][c] + nb * dist[bb][c]) / (na + nb);
            dist[ba][c] = d;
            dist[c][ba] = d;
        }
        clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
        std::sort(clusters[ba].begin(), clusters[ba].end());
        clusters[bb].clear();
        alive[bb] = false;
    }

    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (alive[i]) out.push_back(std::move(clusters[i]));
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return out;
}

Relation theme_relation(std::span<const std::string> contents, std::size_t ordinal) {
    std::array<int, kThemes.size()> hits{};
    for (const auto& c : contents) {
        for (const auto& raw : text::tokenize(c)) {
            auto tok = strip_punct(raw);
            if (tok.empty()) continue;
            for (std::size_t t = 0; t < kThemes.size(); ++t) {
                for (auto w : kThemes[t].words) {
                    if (!w.empty() && tok == w) ++hits[t];
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t t = 1; t < kThemes.size(); ++t) {
        if (hits[t] > hits[best]) best = t;
    }
    if (hits[best] == 0) {
        return Relation::custom(fmt::format("cluster-{}", ordinal));
    }
    return Relation(kThemes[best].kind);
}

std::vector<Hyperedge> build_hyperedges(ThoughtHypergraph& g, std::span<const VertexId> vertices,
                                        const ClusterConfig& config) {
    std::vector<embed::EmbeddingVector> xs;
    xs.reserve(vertices.size());
    for (auto v : vertices) xs.push_back(g.vertex(v).embedding);
    auto sim = embed::similarity_matrix(xs);
    auto clusters = average_linkage_clusters(sim, config.threshold);

    std::vector<Hyperedge> created;
    std::size_t ordinal = 0;
    for (const auto& cluster : clusters) {
        if (cluster.size() < 2) continue;
        ++ordinal;
        std::vector<VertexId> members;
        std::vector<std::string> contents;
        double sum = 0.0;
        std::size_t pairs = 0;
        for (std::size_t a = 0; a < cluster.size(); ++a) {
            members.push_back(vertices[cluster[a]]);
            contents.push_back(g.vertex(vertices[cluster[a]]).content);
            for (std::size_t b = a + 1; b < cluster.size(); ++b) {
                sum += sim(cluster[a], cluster[b]);
                ++pairs;
            }
        }
        double weight = sum / static_cast<double>(pairs);

        std::optional<Relation> relation;
        if (config.theme_namer) relation = config.theme_namer(contents);
        if (!relation) relation = theme_relation(contents, ordinal);

        std::sort(members.begin(), members.end());
        if (config.skip_existing) {
            bool exists = false;
            for (auto eid : g.incident_edges(members.front())) {
                const auto& e = g.edge(eid);
                if (!e.directed && e.targets.empty() && e.sources == members && e.relation == *relation) {
                    exists = true;
                    break;
                }
            }
            if (exists) continue;
        }
        created.push_back(g.connect(members, {}, *relation, weight));
    }
    return created;
}

}  // namespace pipegen::hgot
