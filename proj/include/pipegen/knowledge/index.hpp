#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pipegen/common/system.hpp"
#include "pipegen/embeddings/embedding.hpp"
#include "pipegen/executor/clock.hpp"
#include "pipegen/executor/retry.hpp"
#include "pipegen/hgot/hypergraph.hpp"

namespace pipegen::knowledge {

enum class ComponentTag { source, op, sink, doc, other };

std::string to_string(ComponentTag t);  // "SO", "OP", "SI", "doc", "other"
ComponentTag tag_from_string(std::string_view s);

/// Path words first (source/connector -> SO, sink -> SI, operator/process/transform -> OP),
/// then markdown files are docs, then code keywords, else other.
ComponentTag tag_component(const std::filesystem::path& path, std::string_view content);

/// Systems named in the path or the text, restricted to `allowed`.
std::set<TargetSystem> detect_systems(const std::filesystem::path& path, std::string_view content,
                                      const std::set<TargetSystem>& allowed);

/// A version string next to a system name ("flink.version>1.17.1", "storm-core 2.5.0").
std::optional<std::string> detect_spe_version(std::string_view content);

struct IngestConfig {
    std::uint64_t max_file_size = 1024 * 1024;
    std::size_t chunk_size = 2000;
    std::set<std::string> allowed_extensions{".java", ".scala", ".py", ".md", ".xml", ".yaml"};
    std::set<TargetSystem> target_systems{TargetSystem::flink, TargetSystem::storm, TargetSystem::spark};
    bool offline = false;
    std::filesystem::path clone_dir;  // where git sources are cloned; a temp dir when empty

    void validate() const;  // throws std::invalid_argument
};

struct DocumentChunk {
    std::size_t id = 0;
    std::string content;
    std::string source_path;  // relative to the ingested root, '/'-separated
    ComponentTag component_tag = ComponentTag::other;
    std::optional<std::string> spe_version;
    std::string checksum;  // SHA-256 of the whole originating file
    std::set<TargetSystem> systems;
    embed::EmbeddingVector embedding;
};

struct SkipEntry {
    std::string path;
    std::string reason;
};

struct KnowledgeIndex {
    std::vector<DocumentChunk> chunks;
    std::map<TargetSystem, std::vector<std::size_t>> by_system;
    std::vector<SkipEntry> skipped;

    bool empty() const noexcept { return chunks.empty(); }
    /// SHA-256 over the chunk checksums in id order.
    std::string fingerprint() const;
    void validate() const;  // every by_system id exists
};

nlohmann::json to_json(const KnowledgeIndex& index);
KnowledgeIndex index_from_json(const nlohmann::json& doc);
void save_index(const KnowledgeIndex& index, const std::filesystem::path& path);
KnowledgeIndex load_index(const std::filesystem::path& path);

bool is_remote_source(std::string_view source);

/// Fetches a git URL into `dest`. Returns false on failure.
using GitFetcher = std::function<bool(const std::string& url, const std::filesystem::path& dest)>;
/// Runs `git clone --depth 1 <url> <dest>` without a shell.
bool git_clone(const std::string& url, const std::filesystem::path& dest);

struct IngestEnv {
    std::shared_ptr<const embed::Encoder> encoder;
    exec::RetryPolicy policy;      // backoff for remote fetches
    exec::Clock* clock = nullptr;  // sleeps between fetch attempts; none when null
    GitFetcher fetch = git_clone;
};

/// Walks every source, skipping (and recording) anything it cannot use. Never throws for
/// bad inputs; an unusable source list yields an empty index plus skip entries.
KnowledgeIndex ingest(const std::vector<std::string>& sources, const IngestConfig& cfg, const IngestEnv& env);

/// Top-k chunks indexed under `system`, by cosine to the encoded query, descending; ties
/// by chunk id. Throws std::invalid_argument when k < 1.
std::vector<DocumentChunk> retrieve_relevant_docs(const KnowledgeIndex& index, std::string_view query,
                                                  TargetSystem system, std::size_t k, const embed::Encoder& encoder);

/// One rag vertex per chunk, joined to the graph's system and user vertices by a knowledge
/// hyperedge. Throws std::invalid_argument when the graph has no system or user vertex.
std::vector<hgot::VertexId> attach_rag_nodes(hgot::ThoughtHypergraph& graph, const std::vector<DocumentChunk>& docs);

}  // namespace pipegen::knowledge
