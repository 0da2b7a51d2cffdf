#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pipegen/executor/clock.hpp"
#include "pipegen/executor/step_runner.hpp"
#include "pipegen/hgot/hypergraph.hpp"
#include "pipegen/query/plan.hpp"

namespace pipegen::artifacts {

/// Filesystem failures while writing a bundle. Unlike provider failures these abort the run.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Layout under root_dir: steps/<id>.json, code/<file>, graph.json, summary.md, memory.jsonl.
struct ArtifactBundle {
    std::filesystem::path root_dir;
    std::vector<std::filesystem::path> step_files;
    std::vector<std::filesystem::path> code_files;
    std::filesystem::path graph_file;
    std::filesystem::path summary_file;
    std::filesystem::path memory_file;

    /// Creates root_dir, steps/ and code/. Throws IoError when that fails.
    static ArtifactBundle create(const std::filesystem::path& root_dir);

    std::filesystem::path steps_dir() const { return root_dir / "steps"; }
    std::filesystem::path code_dir() const { return root_dir / "code"; }
};

/// Canonical JSON under steps/<step_id>.json. Throws IoError.
std::filesystem::path save_step_result(ArtifactBundle& bundle, const exec::StepResult& result);
exec::StepResult load_step_result(const std::filesystem::path& path);

/// Writes each produced file under code/. A name already taken in this bundle gets the
/// step-indexed fallback name instead. Returns the written paths. Throws IoError.
std::vector<std::filesystem::path> save_code_files(ArtifactBundle& bundle, const exec::StepResult& result);

std::filesystem::path save_graph(ArtifactBundle& bundle, const hgot::ThoughtHypergraph& graph);

/// Writes `text` to a bundle-relative path atomically (temp file + rename). Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace pipegen::artifacts
