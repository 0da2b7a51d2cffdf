#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pipegen/embeddings/embedding.hpp"
#include "pipegen/executor/clock.hpp"

namespace pipegen::artifacts {

struct MemoryRecord {
    std::uint64_t seq = 0;  // position in the store, from 0
    std::string query;
    std::string response_digest;  // SHA-256 of the final response
    std::string graph_ref;        // path of the saved graph
    std::string created_at;

    bool operator==(const MemoryRecord&) const = default;
};

nlohmann::json to_json(const MemoryRecord& r);
MemoryRecord memory_record_from_json(const nlohmann::json& j);

/// Append-only JSON-lines store. A file that fails to parse is moved aside to
/// "<file>.corrupt" and the store starts empty. Appends are serialized.
class MemoryStore {
public:
    static constexpr double kMatchThreshold = 0.9;

    MemoryStore(std::filesystem::path path, std::shared_ptr<const embed::Encoder> encoder);

    MemoryRecord save(const std::string& query, const std::string& response, const std::string& graph_ref,
                      exec::TimePoint now);
    /// Most recent record whose query embedding has cosine >= 0.9 with `query`.
    std::optional<MemoryRecord> load(const std::string& query) const;

    std::vector<MemoryRecord> records() const;
    bool recovered_from_corruption() const noexcept { return recovered_; }
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::shared_ptr<const embed::Encoder> encoder_;
    mutable std::mutex mu_;
    std::vector<MemoryRecord> records_;
    bool recovered_ = false;
};

}  // namespace pipegen::artifacts
