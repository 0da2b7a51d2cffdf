#include "pipegen/artifacts/memory.hpp"

#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "pipegen/artifacts/bundle.hpp"
#include "pipegen/common/canonical_json.hpp"
#include "pipegen/knowledge/checksum.hpp"

namespace pipegen::artifacts {

using nlohmann::json;
namespace fs = std::filesystem;

json to_json(const MemoryRecord& r) {
    return {{"seq", r.seq},
            {"query", r.query},
            {"response_digest", r.response_digest},
            {"graph_ref", r.graph_ref},
            {"created_at", r.created_at}};
}

MemoryRecord memory_record_from_json(const json& j) {
    MemoryRecord r;
    r.seq = j.at("seq").get<std::uint64_t>();
    r.query = j.at("query").get<std::string>();
    r.response_digest = j.at("response_digest").get<std::string>();
    r.graph_ref = j.at("graph_ref").get<std::string>();
    r.created_at = j.at("created_at").get<std::string>();
    return r;
}

MemoryStore::MemoryStore(fs::path path, std::shared_ptr<const embed::Encoder> encoder)
    : path_(std::move(path)), encoder_(std::move(encoder)) {
    if (!encoder_) throw std::invalid_argument("memory store needs an encoder");
    std::error_code ec;
    if (!fs::exists(path_, ec)) return;
    std::ifstream in(path_, std::ios::binary);
    std::string line;
    std::size_t lineno = 0;
    try {
        if (!in) throw std::runtime_error("cannot open");
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto rec = memory_record_from_json(json::parse(line));
            if (rec.seq != records_.size()) throw std::runtime_error("records out of sequence");
            records_.push_back(std::move(rec));
        }
    } catch (const std::exception& e) {
        auto aside = path_;
        aside += ".corrupt";
        spdlog::warn("memory store {} is corrupt at line {} ({}); moved to {} and starting empty", path_.string(),
                     lineno, e.what(), aside.string());
        in.close();
        fs::rename(path_, aside, ec);
        if (ec) fs::remove(path_, ec);
        records_.clear();
        recovered_ = true;
    }
}

MemoryRecord MemoryStore::save(const std::string& query, const std::string& response, const std::string& graph_ref,
                               exec::TimePoint now) {
    std::lock_guard lock(mu_);
    MemoryRecord r{records_.size(), query, knowledge::sha256_hex(response), graph_ref, exec::format_utc(now)};
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw IoError(fmt::format("cannot append to memory store {}", path_.string()));
    out << canonical_line(to_json(r)) << '\n';
    out.flush();
    if (!out) throw IoError(fmt::format("append to memory store {} failed", path_.string()));
    records_.push_back(r);
    return r;
}

std::optional<MemoryRecord> MemoryStore::load(const std::string& query) const {
    std::lock_guard lock(mu_);
    if (records_.empty()) return std::nullopt;
    auto q = encoder_->encode(query);
    for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
        if (embed::cosine(q, encoder_->encode(it->query)) >= kMatchThreshold) return *it;
    }
    return std::nullopt;
}

std::vector<MemoryRecord> MemoryStore::records() const {
    std::lock_guard lock(mu_);
    return records_;
}

}  // namespace pipegen::artifacts
