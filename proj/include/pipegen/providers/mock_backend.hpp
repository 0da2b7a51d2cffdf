#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pipegen/providers/backend.hpp"

namespace pipegen::providers {

struct MockReply {
    std::optional<std::string> text;
    std::optional<ErrorKind> error;
    std::string detail;

    static MockReply ok(std::string t) { return {std::move(t), std::nullopt, {}}; }
    static MockReply fail(ErrorKind k, std::string d = {}) { return {std::nullopt, k, std::move(d)}; }
};

struct TranscriptEntry {
    std::size_t call = 0;
    std::string model;
    std::string task;
    std::optional<std::string> text;
    std::optional<ErrorKind> error;

    friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

/// Deterministic reply synthesized from the request alone. Used once a script runs dry
/// (when auto-reply is enabled) and for fully offline runs without a script.
std::string auto_reply(const ChatRequest& request);

/// Scripted backend. Replies are consumed in call order across all models; each call is
/// recorded in the transcript. Thread-safe.
class MockBackend final : public Backend {
public:
    MockBackend() = default;
    explicit MockBackend(std::vector<MockReply> script, bool auto_when_exhausted = false);

    // Script file: {"responses": [ "text" | {"error": "<kind>", "detail": "..."} ...],
    //               "errors": [ {"call": n, "kind": "<kind>", "detail": "..."} ...],
    //               "auto": bool}
    // "errors" entries fail the n-th call (0-based) without consuming a response.
    static std::shared_ptr<MockBackend> from_json(const nlohmann::json& doc);
    static std::shared_ptr<MockBackend> from_file(const std::filesystem::path& path);

    ChatResponse complete(const ModelHandle& model, const ChatRequest& request) override;

    std::size_t calls() const;
    std::vector<TranscriptEntry> transcript() const;

private:
    mutable std::mutex mu_;
    std::deque<MockReply> script_;
    std::map<std::size_t, MockReply> injected_errors_;
    bool auto_ = true;
    std::size_t calls_ = 0;
    std::vector<TranscriptEntry> transcript_;
};

}  // namespace pipegen::providers
