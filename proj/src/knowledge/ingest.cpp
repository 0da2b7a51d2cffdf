#include <spawn.h>
#include <sys/wait.h>

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "pipegen/common/text.hpp"
#include "pipegen/knowledge/checksum.hpp"
#include "pipegen/knowledge/chunker.hpp"
#include "pipegen/knowledge/index.hpp"

extern char** environ;

namespace pipegen::knowledge {

namespace fs = std::filesystem;

bool is_remote_source(std::string_view s) {
    for (std::string_view prefix : {"http://", "https://", "git://", "ssh://", "git@"}) {
        if (s.substr(0, prefix.size()) == prefix) return true;
    }
    return s.size() > 4 && s.substr(s.size() - 4) == ".git" && !fs::exists(fs::path(s));
}

bool git_clone(const std::string& url, const fs::path& dest) {
    std::error_code ec;
    fs::remove_all(dest, ec);
    std::string dest_s = dest.string();
    std::vector<std::string> args{"git", "clone", "--quiet", "--depth", "1", "--", url, dest_s};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    pid_t pid = 0;
    if (posix_spawnp(&pid, "git", nullptr, nullptr, argv.data(), environ) != 0) return false;
    int status = 0;
    if (waitpid(pid, &status, 0) < 0) return false;
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

namespace {

class Ingestor {
public:
    Ingestor(const IngestConfig& cfg, const IngestEnv& env) : cfg_(cfg), env_(env) {}

    void source(const std::string& src) {
        if (is_remote_source(src)) {
            remote(src);
            return;
        }
        fs::path p(src);
        std::error_code ec;
        auto st = fs::status(p, ec);
        if (ec || !fs::exists(st)) {
            skip(src, "no such file or directory");
        } else if (fs::is_directory(st)) {
            walk(p);
        } else {
            file(p, p.filename().generic_string());
        }
    }

    KnowledgeIndex finish() {
        for (const auto& c : index_.chunks) {
            for (auto s : c.systems) index_.by_system[s].push_back(c.id);
        }
        return std::move(index_);
    }

private:
    void skip(std::string path, std::string reason) {
        spdlog::warn("skipping {}: {}", path, reason);
        index_.skipped.push_back({std::move(path), std::move(reason)});
    }

    void remote(const std::string& url) {
        if (cfg_.offline) {
            skip(url, "remote source ignored in offline mode");
            return;
        }
        fs::path base = cfg_.clone_dir.empty() ? fs::temp_directory_path() / "pipegen-clones" : cfg_.clone_dir;
        auto dest = base / sha256_hex(url).substr(0, 16);
        std::error_code ec;
        fs::create_directories(base, ec);
        for (int retries = 0; retries < env_.policy.max_retries; ++retries) {
            if (env_.fetch(url, dest)) {
                walk(dest);
                return;
            }
            auto delay = exec::backoff_delay(retries, env_.policy);
            spdlog::warn("fetching {} failed (attempt {}); retrying in {:.0f} ms", url, retries + 1, delay.count());
            if (env_.clock) env_.clock->sleep_for(delay);
        }
        skip(url, fmt::format("fetch failed after {} attempts", env_.policy.max_retries));
    }

    void walk(const fs::path& root) {
        std::error_code ec;
        std::vector<fs::path> files;
        fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
        if (ec) {
            skip(root.generic_string(), fmt::format("cannot list directory: {}", ec.message()));
            return;
        }
        for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
            if (ec) {
                skip(root.generic_string(), fmt::format("directory walk interrupted: {}", ec.message()));
                break;
            }
            const auto& p = it->path();
            if (p.filename() == ".git") {
                it.disable_recursion_pending();
                continue;
            }
            if (cfg_.allowed_extensions.count(text::to_lower(p.extension().string()))) files.push_back(p);
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) file(f, fs::relative(f, root, ec).generic_string());
    }

    void file(const fs::path& path, const std::string& rel) {
        std::error_code ec;
        auto st = fs::status(path, ec);
        if (ec || !fs::exists(st)) {
            skip(rel, "unreadable: missing target or broken link");
            return;
        }
        if (!fs::is_regular_file(st)) {
            skip(rel, "not a regular file");
            return;
        }
        auto size = fs::file_size(path, ec);
        if (ec) {
            skip(rel, fmt::format("unreadable: {}", ec.message()));
            return;
        }
        if (size > cfg_.max_file_size) {
            skip(rel, fmt::format("exceeds max_file_size ({} > {} bytes)", size, cfg_.max_file_size));
            return;
        }
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buf;
        if (!in || !(buf << in.rdbuf())) {
            if (size != 0) {
                skip(rel, "unreadable: open or read failed");
                return;
            }
        }
        std::string bytes = buf.str();
        if (bytes.find('\0') != std::string::npos) {
            skip(rel, "corrupt: contains NUL bytes");
            return;
        }
        if (!text::is_valid_utf8(bytes)) {
            skip(rel, "corrupt: invalid UTF-8");
            return;
        }

        auto checksum = sha256_hex(bytes);
        auto tag = tag_component(rel, bytes);
        auto systems = detect_systems(rel, bytes, cfg_.target_systems);
        if (systems.empty()) systems = cfg_.target_systems;
        auto version = detect_spe_version(bytes);
        for (auto& piece : chunk_text(bytes, cfg_.chunk_size)) {
            DocumentChunk c;
            c.id = index_.chunks.size();
            c.embedding = env_.encoder->encode(piece);
            c.content = std::move(piece);
            c.source_path = rel;
            c.component_tag = tag;
            c.spe_version = version;
            c.checksum = checksum;
            c.systems = systems;
            index_.chunks.push_back(std::move(c));
        }
    }

    const IngestConfig& cfg_;
    const IngestEnv& env_;
    KnowledgeIndex index_;
};

}  // namespace

KnowledgeIndex ingest(const std::vector<std::string>& sources, const IngestConfig& cfg, const IngestEnv& env) {
    cfg.validate();
    if (!env.encoder) throw std::invalid_argument("ingest needs an encoder");
    Ingestor ingestor(cfg, env);
    if (sources.empty()) spdlog::warn("no knowledge sources given; the index is empty");
    for (const auto& s : sources) {
        try {
            ingestor.source(s);
        } catch (const std::exception& e) {
            spdlog::warn("source {} abandoned: {}", s, e.what());
        }
    }
    auto index = ingestor.finish();
    if (index.empty() && !sources.empty()) spdlog::warn("no usable documents found; the index is empty");
    return index;
}

}  // namespace pipegen::knowledge
