#include "pipegen/artifacts/bundle.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "pipegen/common/canonical_json.hpp"

namespace pipegen::artifacts {

namespace fs = std::filesystem;

ArtifactBundle ArtifactBundle::create(const fs::path& root_dir) {
    ArtifactBundle b;
    b.root_dir = root_dir;
    std::error_code ec;
    for (const auto& dir : {b.root_dir, b.steps_dir(), b.code_dir()}) {
        fs::create_directories(dir, ec);
        if (ec || !fs::is_directory(dir)) {
            throw IoError(fmt::format("cannot create directory {}: {}", dir.string(),
                                      ec ? ec.message() : "not a directory"));
        }
    }
    b.graph_file = b.root_dir / "graph.json";
    b.summary_file = b.root_dir / "summary.md";
    b.memory_file = b.root_dir / "memory.jsonl";
    return b;
}

void write_text_file(const fs::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
        out << text;
        out.flush();
        if (!out) throw IoError(fmt::format("write to {} failed", path.string()));
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError(fmt::format("cannot move {} into place", path.string()));
    }
}

fs::path save_step_result(ArtifactBundle& bundle, const exec::StepResult& result) {
    auto path = bundle.steps_dir() / fmt::format("{}.json", result.step_id);
    write_text_file(path, canonical_dump(exec::to_json(result)));
    if (std::find(bundle.step_files.begin(), bundle.step_files.end(), path) == bundle.step_files.end()) {
        bundle.step_files.push_back(path);
    }
    return path;
}

exec::StepResult load_step_result(const fs::path& path) { return exec::step_result_from_json(read_json_file(path)); }

std::vector<fs::path> save_code_files(ArtifactBundle& bundle, const exec::StepResult& result) {
    std::vector<fs::path> written;
    int n = 0;
    for (const auto& f : result.produced_code) {
        ++n;
        auto path = bundle.code_dir() / f.filename;
        if (std::find(bundle.code_files.begin(), bundle.code_files.end(), path) != bundle.code_files.end()) {
            path = bundle.code_dir() / fmt::format("step-{}-{}{}", result.step_id, n, fs::path(f.filename).extension().string());
        }
        write_text_file(path, f.content);
        bundle.code_files.push_back(path);
        written.push_back(path);
    }
    return written;
}

fs::path save_graph(ArtifactBundle& bundle, const hgot::ThoughtHypergraph& graph) {
    write_text_file(bundle.graph_file, canonical_dump(graph.to_json()));
    return bundle.graph_file;
}

}  // namespace pipegen::artifacts
