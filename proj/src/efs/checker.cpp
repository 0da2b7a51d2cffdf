#include "pipegen/efs/checker.hpp"

#include <cstdio>
#include <regex>
#include <sys/wait.h>

#include <fmt/format.h>

#include "pipegen/common/canonical_json.hpp"

namespace pipegen::efs {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(CheckKind k) {
    switch (k) {
    case CheckKind::syntax: return "syntax";
    case CheckKind::logic: return "logic";
    case CheckKind::runtime: return "runtime";
    }
    return "syntax";
}

CheckKind check_kind_from_string(std::string_view s) {
    for (auto k : {CheckKind::syntax, CheckKind::logic, CheckKind::runtime}) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument(fmt::format("unknown checker kind '{}'", s));
}

StubAdapter::StubAdapter(CheckKind kind, int count, std::vector<std::string> diagnostics)
    : kind_(kind), count_(count), diagnostics_(std::move(diagnostics)) {
    if (count < 0) throw std::invalid_argument("stub adapter count must be non-negative");
}

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out.push_back(c);
    }
    return out + "'";
}

void replace_all(std::string& s, std::string_view from, const std::string& to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
}

}  // namespace

CommandAdapter::CommandAdapter(CheckKind kind, std::string command, std::optional<std::string> pattern)
    : kind_(kind), command_(std::move(command)) {
    if (command_.empty()) throw std::invalid_argument("command adapter needs a command");
    pattern_ = pattern.value_or(kind == CheckKind::logic ? R"(\bFAIL(ED)?\b)" : R"(\berror\b)");
    try {
        std::regex probe(pattern_);
    } catch (const std::regex_error& e) {
        throw std::invalid_argument(fmt::format("bad adapter pattern '{}': {}", pattern_, e.what()));
    }
}

AdapterResult CommandAdapter::run(const fs::path& bundle_dir) {
    auto cmd = command_;
    replace_all(cmd, "{bundle}", shell_quote(bundle_dir.string()));
    replace_all(cmd, "{code}", shell_quote((bundle_dir / "code").string()));
    cmd += " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error(fmt::format("cannot run checker command: {}", command_));
    std::string output;
    char buf[4096];
    while (auto n = std::fread(buf, 1, sizeof buf, pipe)) output.append(buf, n);
    int status = ::pclose(pipe);
    int exit_code = (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    // 126/127: the shell could not run the checker at all. Counting that as zero errors
    // would report a clean pipeline that was never checked.
    if (exit_code == 126 || exit_code == 127) {
        throw std::runtime_error(fmt::format("checker command could not be run ({}): {}", exit_code, command_));
    }

    AdapterResult r;
    if (kind_ == CheckKind::runtime) {
        r.count = exit_code == 0 ? 0 : 1;
        if (r.count) r.diagnostics.push_back(fmt::format("exit status {}", exit_code));
        return r;
    }
    std::regex re(pattern_, std::regex::ECMAScript | std::regex::icase);
    std::size_t pos = 0;
    while (pos < output.size()) {
        auto nl = output.find('\n', pos);
        auto line = output.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        if (std::regex_search(line, re)) {
            ++r.count;
            r.diagnostics.push_back(line);
        }
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return r;
}

ScoreConfig score_config_from_json(const json& doc) {
    ScoreConfig cfg;
    try {
        cfg.label = doc.value("label", cfg.label);
        cfg.system = doc.value("system", cfg.system);
        cfg.complexity = doc.value("complexity", cfg.complexity);
        cfg.approach = doc.value("approach", cfg.approach);
        for (const auto& a : doc.at("adapters")) {
            auto kind = check_kind_from_string(a.at("kind").get<std::string>());
            if (a.contains("stub")) {
                cfg.adapters.push_back(std::make_shared<StubAdapter>(kind, a["stub"].get<int>()));
            } else if (a.contains("command")) {
                std::optional<std::string> pattern;
                if (a.contains("pattern")) pattern = a["pattern"].get<std::string>();
                cfg.adapters.push_back(std::make_shared<CommandAdapter>(kind, a["command"].get<std::string>(), pattern));
            } else {
                throw std::invalid_argument("adapter needs either \"stub\" or \"command\"");
            }
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(fmt::format("malformed score config: {}", e.what()));
    }
    return cfg;
}

ScoreConfig load_score_config(const fs::path& path) {
    try {
        return score_config_from_json(read_json_file(path));
    } catch (const std::runtime_error& e) {
        throw std::invalid_argument(e.what());
    }
}

ScoreEntry check(const fs::path& bundle_dir, const ScoreConfig& config) {
    std::error_code ec;
    auto code = bundle_dir / "code";
    bool has_code = false;
    if (fs::is_directory(code, ec)) {
        for (const auto& e : fs::directory_iterator(code, ec)) {
            if (e.is_regular_file()) {
                has_code = true;
                break;
            }
        }
    }
    if (!has_code) throw std::invalid_argument(fmt::format("{} holds no generated code to check", bundle_dir.string()));

    ScoreEntry entry;
    entry.label = config.label;
    entry.system = config.system;
    entry.complexity = config.complexity;
    entry.approach = config.approach;
    for (const auto& adapter : config.adapters) {
        auto r = adapter->run(bundle_dir);
        if (r.count < 0) throw std::runtime_error("checker adapter returned a negative count");
        auto& slot = adapter->kind() == CheckKind::syntax  ? entry.syntax
                     : adapter->kind() == CheckKind::logic ? entry.logic
                                                           : entry.runtime;
        slot = slot.value_or(0) + r.count;
        for (auto& d : r.diagnostics) entry.diagnostics.push_back(fmt::format("[{}] {}", to_string(adapter->kind()), d));
    }
    return entry;
}

}  // namespace pipegen::efs
