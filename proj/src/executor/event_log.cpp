#include "pipegen/executor/event_log.hpp"

namespace pipegen::exec {

using nlohmann::json;

void EventLog::add_listener(Listener l) {
    std::lock_guard lock(mu_);
    listeners_.push_back(std::move(l));
}

void EventLog::emit(json ev) {
    std::lock_guard lock(mu_);
    ev["seq"] = events_.size();
    if (clock_) ev["t"] = format_utc(clock_->now());
    auto line = ev.dump(-1, ' ', false, json::error_handler_t::replace);
    events_.push_back(std::move(ev));
    for (auto& l : listeners_) l(line);
}

void EventLog::step_start(int step_id, const std::string& action) {
    emit({{"event", "step_start"}, {"step", step_id}, {"action", action}});
}

void EventLog::step_complete(int step_id, const std::string& action, bool fallback, int attempts) {
    emit({{"event", "step_complete"}, {"step", step_id}, {"action", action}, {"fallback", fallback},
          {"attempts", attempts}});
}

void EventLog::attempt(const std::string& scope, int attempt, const std::string& model) {
    emit({{"event", "attempt"}, {"scope", scope}, {"attempt", attempt}, {"model", model}});
}

void EventLog::failure(const std::string& scope, int attempt, providers::ErrorKind kind, const std::string& detail) {
    emit({{"event", "failure"}, {"scope", scope}, {"attempt", attempt}, {"kind", providers::to_string(kind)},
          {"detail", detail}});
}

void EventLog::sleep(const std::string& scope, int retries, double r, Millis delay) {
    emit({{"event", "sleep"}, {"scope", scope}, {"retries", retries}, {"r", r}, {"delay_ms", delay.count()}});
}

void EventLog::rotate(const std::string& scope, std::size_t from, std::size_t to, providers::ErrorKind reason) {
    emit({{"event", "rotate"}, {"scope", scope}, {"from", from}, {"to", to},
          {"reason", providers::to_string(reason)}});
}

void EventLog::note(const std::string& what, json data) {
    data["event"] = what;
    emit(std::move(data));
}

std::vector<json> EventLog::events() const {
    std::lock_guard lock(mu_);
    return events_;
}

std::vector<json> EventLog::events_of(const std::string& type) const {
    std::lock_guard lock(mu_);
    std::vector<json> out;
    for (const auto& e : events_) {
        if (e.value("event", "") == type) out.push_back(e);
    }
    return out;
}

}  // namespace pipegen::exec
