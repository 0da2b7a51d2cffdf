#pragma once

// Shared graph and query fixtures for the unit and acceptance binaries.

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "pipegen/embeddings/embedding.hpp"
#include "pipegen/executor/event_log.hpp"
#include "pipegen/hgot/hypergraph.hpp"
#include "pipegen/query/plan.hpp"

namespace fixture {

using pipegen::hgot::Relation;
using pipegen::hgot::ThoughtHypergraph;
using pipegen::hgot::VertexId;
using pipegen::hgot::VertexType;

/// The six-edge word-count topology: components of a streaming job grouped by concern,
/// with two directed edges feeding the integration vertex EC.
struct ConcernGraph {
    ThoughtHypergraph graph;
    std::map<std::string, VertexId> v;
    std::map<std::string, pipegen::hgot::EdgeId> e;
};

inline ConcernGraph concern_graph() {
    ConcernGraph f{ThoughtHypergraph(pipegen::embed::make_hashing_encoder(5, 64)), {}, {}};
    const std::vector<std::pair<std::string, std::string>> names{
        {"KS", "Kafka source"},        {"TP", "text parsing"},         {"FO", "file output"},
        {"P", "parallelism"},          {"W", "windowing"},             {"MM", "memory management"},
        {"CP", "checkpointing"},       {"DM", "delivery mode"},        {"SB", "state backend"},
        {"CM", "cluster monitoring"},  {"DS", "deployment scaling"},   {"EO", "exactly-once semantics"},
        {"EC", "end-to-end consistency"}, {"SS", "schema serialization"},
    };
    for (const auto& [key, text] : names) {
        VertexType t = key == "EC" ? VertexType::design : VertexType::analysis;
        double conf = key == "EC" ? 0.9 : 0.5;
        f.v[key] = f.graph.add_vertex(text, t, conf);
    }
    auto ids = [&](std::initializer_list<const char*> ks) {
        std::vector<VertexId> out;
        for (auto k : ks) out.push_back(f.v.at(k));
        return out;
    };
    f.e["e1"] = f.graph.connect(ids({"KS", "TP", "FO"}), {}, Relation::parse("data_flow"), 0.8).id;
    f.e["e2"] = f.graph.connect(ids({"P", "W", "MM"}), {}, Relation::parse("performance_optimization"), 0.7).id;
    f.e["e3"] = f.graph.connect(ids({"CP", "DM", "SB"}), {}, Relation::parse("fault_tolerance"), 0.9).id;
    f.e["e4"] = f.graph.connect(ids({"MM", "CM", "DS"}), {}, Relation::parse("operational_Concern"), 0.6).id;
    f.e["e5"] = f.graph.connect(ids({"P", "CP", "W"}), ids({"EO"}), Relation::parse("perf_reliability_tradeoff"), 0.75).id;
    f.e["e6"] = f.graph.connect(ids({"KS", "CP", "SB", "DM", "EO", "SS"}), ids({"EC"}),
                                Relation::parse("system_integration"), 0.85).id;
    return f;
}

/// Random graph whose hyperedges all have exactly two members, mirrored into a plain
/// adjacency oracle. Embeddings are random 4-vectors, confidences random in [0, 1].
struct PairFixture {
    ThoughtHypergraph graph;
    std::vector<VertexId> ids;
    oracle::PairGraph adj;
    std::vector<double> confidence;
};

inline PairFixture random_pair_graph(oracle::Rng& rng) {
    PairFixture f{ThoughtHypergraph(pipegen::embed::make_hashing_encoder(0, 4)), {}, {}, {}};
    int n = 1 + static_cast<int>(rng.below(8));
    for (int i = 0; i < n; ++i) {
        std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.1, 1)};
        // Coarse confidences so ties actually happen.
        double c = static_cast<double>(rng.below(5)) / 4.0;
        f.ids.push_back(f.graph.insert_vertex_raw("v" + std::to_string(i), VertexType::analysis, c,
                                                  pipegen::embed::EmbeddingVector(x)));
        f.confidence.push_back(c);
        f.adj.adj[i];
    }
    int m = static_cast<int>(rng.below(static_cast<std::size_t>(2 * n)));
    for (int k = 0; k < m && n >= 2; ++k) {
        int a = static_cast<int>(rng.below(static_cast<std::size_t>(n)));
        int b = static_cast<int>(rng.below(static_cast<std::size_t>(n)));
        if (a == b) continue;
        f.graph.connect({f.ids[a], f.ids[b]}, {}, Relation::Kind::context, 0.5);
        f.adj.add(a, b);
    }
    return f;
}

/// Random acyclic plan of 1..max_steps steps. Dependencies only point at smaller ids, the
/// largest id is the terminal synthesize_response step, and the steps are listed in a
/// shuffled order so plan position and topological order disagree.
inline pipegen::query::ExecutionPlan random_plan(oracle::Rng& rng, int max_steps = 20) {
    using pipegen::query::StepAction;
    const StepAction actions[] = {StepAction::analyze_complexity, StepAction::gather_requirements,
                                  StepAction::design,             StepAction::generate_pipeline,
                                  StepAction::deploy_instructions};
    pipegen::query::ExecutionPlan plan;
    plan.query = "random";
    int n = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(max_steps)));
    for (int id = 1; id <= n; ++id) {
        pipegen::query::PlanStep s;
        s.id = id;
        s.action = id == n ? StepAction::synthesize_response : actions[rng.below(5)];
        for (int d = 1; d < id; ++d) {
            if (rng.coin(0.3)) s.deps.insert(d);
        }
        plan.steps.push_back(s);
    }
    for (std::size_t i = plan.steps.size(); i > 1; --i) std::swap(plan.steps[i - 1], plan.steps[rng.below(i)]);
    return plan;
}

/// Checks that the step events form a valid schedule: every step starts once and completes
/// once, after it starts, and only after all of its dependencies completed.
inline std::string schedule_violation(const pipegen::query::ExecutionPlan& plan,
                                      const std::vector<nlohmann::json>& events) {
    std::map<int, long> started, completed;
    for (const auto& ev : events) {
        auto type = ev.at("event").get<std::string>();
        if (type != "step_start" && type != "step_complete") continue;
        int id = ev.at("step").get<int>();
        long seq = ev.at("seq").get<long>();
        auto& slot = type == "step_start" ? started : completed;
        if (slot.count(id)) return type + " twice for step " + std::to_string(id);
        slot[id] = seq;
    }
    for (const auto& s : plan.steps) {
        if (!started.count(s.id) || !completed.count(s.id)) return "step " + std::to_string(s.id) + " missing events";
        if (completed[s.id] < started[s.id]) return "step " + std::to_string(s.id) + " completed before start";
        for (int d : s.deps) {
            if (!completed.count(d) || completed[d] > started[s.id]) {
                return "step " + std::to_string(s.id) + " started before dependency " + std::to_string(d);
            }
        }
    }
    if (started.size() != plan.steps.size()) return "events for unknown steps";
    return {};
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("pipegen-test-" + std::to_string(::getpid()) + "-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixture
