#pragma once

#include <cstddef>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "pipegen/executor/clock.hpp"
#include "pipegen/providers/backend.hpp"

namespace pipegen::exec {

/// Structured run events, one JSON object each. Every event carries "seq" (0-based,
/// gap-free) and "event"; "t" is added when a clock is attached. Listeners receive
/// each event as a single JSONL line, in order.
class EventLog {
public:
    using Listener = std::function<void(const std::string& line)>;

    explicit EventLog(const Clock* clock = nullptr) : clock_(clock) {}

    void add_listener(Listener l);

    void step_start(int step_id, const std::string& action);
    void step_complete(int step_id, const std::string& action, bool fallback, int attempts);
    void attempt(const std::string& scope, int attempt, const std::string& model);
    void failure(const std::string& scope, int attempt, providers::ErrorKind kind, const std::string& detail);
    void sleep(const std::string& scope, int retries, double r, Millis delay);
    void rotate(const std::string& scope, std::size_t from, std::size_t to, providers::ErrorKind reason);
    void note(const std::string& what, nlohmann::json data = nlohmann::json::object());

    std::vector<nlohmann::json> events() const;
    std::vector<nlohmann::json> events_of(const std::string& type) const;

private:
    void emit(nlohmann::json ev);

    const Clock* clock_;
    mutable std::mutex mu_;
    std::vector<nlohmann::json> events_;
    std::vector<Listener> listeners_;
};

}  // namespace pipegen::exec
