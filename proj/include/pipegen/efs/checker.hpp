#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pipegen/efs/efs.hpp"

namespace pipegen::efs {

enum class CheckKind { syntax, logic, runtime };

std::string to_string(CheckKind k);
CheckKind check_kind_from_string(std::string_view s);

struct AdapterResult {
    int count = 0;
    std::vector<std::string> diagnostics;
};

class CheckerAdapter {
public:
    virtual ~CheckerAdapter() = default;
    virtual CheckKind kind() const = 0;
    virtual AdapterResult run(const std::filesystem::path& bundle_dir) = 0;
};

/// Returns a fixed count. Used in tests and for manually triaged pipelines.
class StubAdapter final : public CheckerAdapter {
public:
    StubAdapter(CheckKind kind, int count, std::vector<std::string> diagnostics = {});
    CheckKind kind() const override { return kind_; }
    AdapterResult run(const std::filesystem::path&) override { return {count_, diagnostics_}; }

private:
    CheckKind kind_;
    int count_;
    std::vector<std::string> diagnostics_;
};

/// Runs a shell command with "{bundle}" and "{code}" replaced by the quoted bundle and
/// code directories, capturing stdout and stderr.
///   syntax:  count = output lines matching `pattern` (default: the word "error")
///   logic:   count = output lines matching `pattern` (default: FAIL / FAILED)
///   runtime: count = 1 when the command exits nonzero, else 0
/// Throws std::runtime_error when the shell reports the command missing or not executable.
class CommandAdapter final : public CheckerAdapter {
public:
    CommandAdapter(CheckKind kind, std::string command, std::optional<std::string> pattern = std::nullopt);
    CheckKind kind() const override { return kind_; }
    AdapterResult run(const std::filesystem::path& bundle_dir) override;

private:
    CheckKind kind_;
    std::string command_;
    std::string pattern_;
};

struct ScoreConfig {
    std::string label = "pipeline";
    std::string system = "flink";
    std::string complexity = "unspecified";
    std::string approach = "generated";
    std::vector<std::shared_ptr<CheckerAdapter>> adapters;
};

/// {"label", "system", "complexity", "approach",
///  "adapters": [{"kind": "syntax", "stub": 0} | {"kind": ..., "command": "...", "pattern": "..."}]}
/// Throws std::invalid_argument on a malformed document.
ScoreConfig score_config_from_json(const nlohmann::json& doc);
ScoreConfig load_score_config(const std::filesystem::path& path);

/// Runs every adapter against the bundle and sums counts per kind. Kinds with no adapter
/// stay empty. Throws std::invalid_argument when the bundle has no code/ files.
ScoreEntry check(const std::filesystem::path& bundle_dir, const ScoreConfig& config);

}  // namespace pipegen::efs
