#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace pipegen::efs {

struct ErrorCounts {
    int syntax = 0;   // S
    int logic = 0;    // L
    int runtime = 0;  // R

    bool operator==(const ErrorCounts&) const = default;
};

/// (1/(1+S) + 1/(1+L) + 1/(1+R)) / 3, in (0, 1]. Throws std::invalid_argument on a negative count.
double efs(const ErrorCounts& c);

/// Rounded to two decimals, the precision scores are reported at.
double round2(double x);
std::string format_score(double x);  // "0.98"

/// Arithmetic mean; nullopt for an empty list.
std::optional<double> mean_score(std::span<const double> scores);

/// One scored pipeline. Counts that no adapter produced stay empty and the score is then
/// withheld.
struct ScoreEntry {
    std::string label;
    std::string system;
    std::string complexity;
    std::string approach;
    std::optional<int> syntax;
    std::optional<int> logic;
    std::optional<int> runtime;
    std::vector<std::string> diagnostics;

    bool complete() const { return syntax && logic && runtime; }
    std::optional<ErrorCounts> counts() const;
    std::optional<double> score() const;
};

using GroupKey = std::pair<std::string, std::string>;  // (complexity, approach)

/// Mean score per (complexity, approach) over complete entries. Groups with no complete
/// entry are absent.
std::map<GroupKey, double> aggregate(std::span<const ScoreEntry> entries);

struct EFSReport {
    std::vector<ScoreEntry> entries;
    std::map<GroupKey, double> groups;

    static EFSReport build(std::vector<ScoreEntry> entries);
    bool complete() const;
};

nlohmann::json to_json(const EFSReport& r);

/// Aligned text table: one row per pipeline, then one "Average" row per group.
std::string render_table(const EFSReport& r);

}  // namespace pipegen::efs
