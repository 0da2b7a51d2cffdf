#include "pipegen/artifacts/report.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "pipegen/common/text.hpp"

namespace pipegen::artifacts {

namespace fs = std::filesystem;

namespace {

std::string fence_for(const std::string& body) {
    std::string fence = "```";
    while (body.find(fence) != std::string::npos) fence += '`';
    return fence;
}

std::string ensure_newline(std::string s) {
    if (!s.empty() && s.back() != '\n') s.push_back('\n');
    return s;
}

}  // namespace

std::string synthesize_response(const query::ExecutionPlan& plan, const hgot::ThoughtHypergraph& graph,
                                const std::vector<exec::StepResult>& results) {
    std::string out = fmt::format("# Generated {} pipeline\n\n## Request\n\n", to_string(plan.system));
    auto q = ensure_newline(plan.query);
    auto fence = fence_for(q);
    out += fmt::format("{}text\n{}{}\n\n", fence, q, fence);

    out += "## Architecture\n\n";
    std::vector<const hgot::ThoughtVertex*> design;
    for (const auto& [id, v] : graph.vertices()) {
        if (v.type == hgot::VertexType::design || v.type == hgot::VertexType::plan) design.push_back(&v);
    }
    std::stable_sort(design.begin(), design.end(), [](const auto* a, const auto* b) {
        if (a->confidence != b->confidence) return a->confidence > b->confidence;
        return a->id < b->id;
    });
    if (design.empty()) out += "_No design thoughts were recorded._\n";
    for (const auto* v : design) {
        out += fmt::format("- [{} #{}, confidence {:.3f}] {}\n", hgot::to_string(v->type), v->id.value, v->confidence,
                           text::trim(v->content));
    }
    out += "\n";

    std::map<int, const exec::StepResult*> by_id;
    for (const auto& r : results) by_id[r.step_id] = &r;
    for (const auto& step : plan.steps) {
        out += fmt::format("## Step {}: {}\n\n", step.id, query::to_string(step.action));
        auto it = by_id.find(step.id);
        if (it == by_id.end()) {
            out += "_No result was recorded for this step._\n\n";
            continue;
        }
        const auto& r = *it->second;
        if (r.fallback) {
            out += fmt::format("> **Degraded result:** fallback after {} attempts ({}).\n\n", r.attempts, r.failure);
        }
        out += ensure_newline(r.content);
        if (!r.produced_code.empty()) {
            out += "\nFiles:\n";
            for (const auto& f : r.produced_code) out += fmt::format("- `code/{}`\n", f.filename);
        }
        out += "\n";
    }
    return out;
}

SessionSummary create_session_summary(const std::string& query, const query::QueryIntent& intent,
                                      TargetSystem system, const ArtifactBundle& bundle, exec::TimePoint started_at,
                                      exec::TimePoint finished_at) {
    SessionSummary s;
    s.query = query;
    s.intent = intent;
    s.system = system;
    s.started_at = started_at;
    s.finished_at = finished_at;
    auto rel = [&bundle](const fs::path& p) { return fs::path(p).lexically_relative(bundle.root_dir).generic_string(); };
    for (const auto& p : bundle.step_files) s.artifacts[rel(p)] = "step result";
    for (const auto& p : bundle.code_files) s.artifacts[rel(p)] = "generated source";
    if (!bundle.graph_file.empty()) s.artifacts[rel(bundle.graph_file)] = "thought hypergraph";
    if (!bundle.summary_file.empty()) s.artifacts[rel(bundle.summary_file)] = "session summary and response";
    return s;
}

nlohmann::json to_json(const SessionSummary& s) {
    return {{"query", s.query},
            {"intent", query::to_json(s.intent)},
            {"system", to_string(s.system)},
            {"artifacts", s.artifacts},
            {"started_at", exec::format_utc(s.started_at)},
            {"finished_at", exec::format_utc(s.finished_at)}};
}

std::string render_summary(const SessionSummary& s, const std::string& response) {
    std::string out = "# Session summary\n\n";
    out += fmt::format("- Intent: {} (confidence {:.2f})\n", query::to_string(s.intent.category), s.intent.confidence);
    out += fmt::format("- System: {}\n", to_string(s.system));
    out += fmt::format("- Started: {}\n", exec::format_utc(s.started_at));
    out += fmt::format("- Finished: {}\n\n", exec::format_utc(s.finished_at));
    out += "## Artifacts\n\n| Path | Purpose |\n| --- | --- |\n";
    for (const auto& [path, purpose] : s.artifacts) out += fmt::format("| `{}` | {} |\n", path, purpose);
    out += "\n---\n\n";
    out += response;
    return out;
}

}  // namespace pipegen::artifacts
