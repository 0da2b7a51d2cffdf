#include "pipegen/efs/efs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace pipegen::efs {

using nlohmann::json;

double efs(const ErrorCounts& c) {
    if (c.syntax < 0 || c.logic < 0 || c.runtime < 0) throw std::invalid_argument("error counts must be non-negative");
    return (1.0 / (1.0 + c.syntax) + 1.0 / (1.0 + c.logic) + 1.0 / (1.0 + c.runtime)) / 3.0;
}

double round2(double x) { return std::round(x * 100.0) / 100.0; }

std::string format_score(double x) { return fmt::format("{:.2f}", round2(x)); }

std::optional<double> mean_score(std::span<const double> scores) {
    if (scores.empty()) return std::nullopt;
    return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

std::optional<ErrorCounts> ScoreEntry::counts() const {
    if (!complete()) return std::nullopt;
    return ErrorCounts{*syntax, *logic, *runtime};
}

std::optional<double> ScoreEntry::score() const {
    auto c = counts();
    if (!c) return std::nullopt;
    return efs(*c);
}

std::map<GroupKey, double> aggregate(std::span<const ScoreEntry> entries) {
    std::map<GroupKey, std::vector<double>> buckets;
    for (const auto& e : entries) {
        if (auto s = e.score()) buckets[{e.complexity, e.approach}].push_back(*s);
    }
    std::map<GroupKey, double> out;
    for (const auto& [k, v] : buckets) out[k] = *mean_score(v);
    return out;
}

EFSReport EFSReport::build(std::vector<ScoreEntry> entries) {
    EFSReport r;
    r.entries = std::move(entries);
    r.groups = aggregate(r.entries);
    return r;
}

bool EFSReport::complete() const {
    return std::all_of(entries.begin(), entries.end(), [](const ScoreEntry& e) { return e.complete(); });
}

json to_json(const EFSReport& r) {
    json entries = json::array();
    for (const auto& e : r.entries) {
        json j{{"label", e.label},          {"system", e.system},         {"complexity", e.complexity},
               {"approach", e.approach},    {"complete", e.complete()},   {"diagnostics", e.diagnostics}};
        auto opt = [](const std::optional<int>& v) { return v ? json(*v) : json(nullptr); };
        j["syntax"] = opt(e.syntax);
        j["logic"] = opt(e.logic);
        j["runtime"] = opt(e.runtime);
        if (auto s = e.score()) {
            j["score"] = *s;
            j["score_display"] = format_score(*s);
        } else {
            j["score"] = nullptr;
        }
        entries.push_back(std::move(j));
    }
    json groups = json::array();
    for (const auto& [k, v] : r.groups) {
        groups.push_back({{"complexity", k.first}, {"approach", k.second}, {"mean", v}, {"mean_display", format_score(v)}});
    }
    return {{"entries", entries}, {"groups", groups}, {"complete", r.complete()}};
}

std::string render_table(const EFSReport& r) {
    std::vector<std::vector<std::string>> rows{{"Complexity", "System", "Approach", "Pipeline", "S", "L", "R", "EFS"}};
    auto cell = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("-"); };
    for (const auto& e : r.entries) {
        auto s = e.score();
        rows.push_back({e.complexity, e.system, e.approach, e.label, cell(e.syntax), cell(e.logic), cell(e.runtime),
                        s ? format_score(*s) : std::string("incomplete")});
    }
    for (const auto& [k, v] : r.groups) rows.push_back({k.first, "", k.second, "Average", "", "", "", format_score(v)});

    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::string out;
    for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        std::string line;
        for (std::size_t i = 0; i < rows[ri].size(); ++i) {
            bool numeric = i >= 4;
            line += numeric ? fmt::format("{:>{}}", rows[ri][i], width[i]) : fmt::format("{:<{}}", rows[ri][i], width[i]);
            if (i + 1 < rows[ri].size()) line += "  ";
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
        if (ri == 0) {
            std::size_t total = 0;
            for (auto w : width) total += w + 2;
            out += std::string(total - 2, '-') + "\n";
        }
    }
    if (!r.complete()) out += "note: incomplete adapter set; scores withheld for rows marked incomplete\n";
    return out;
}

}  // namespace pipegen::efs
