#include "pipegen/executor/clock.hpp"

#include <thread>

#include <fmt/chrono.h>
#include <fmt/format.h>

namespace pipegen::exec {

void SystemClock::sleep_for(Millis d) {
    if (d.count() > 0) std::this_thread::sleep_for(d);
}

VirtualClock::VirtualClock(TimePoint start) : now_(start) {}

TimePoint VirtualClock::now() const {
    std::lock_guard lock(mu_);
    return now_;
}

void VirtualClock::sleep_for(Millis d) {
    std::lock_guard lock(mu_);
    sleeps_.push_back(d);
    now_ += std::chrono::duration_cast<TimePoint::duration>(d);
}

void VirtualClock::advance(Millis d) {
    std::lock_guard lock(mu_);
    now_ += std::chrono::duration_cast<TimePoint::duration>(d);
}

std::vector<Millis> VirtualClock::sleeps() const {
    std::lock_guard lock(mu_);
    return sleeps_;
}

std::string format_utc(TimePoint t) {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count() % 1000;
    if (ms < 0) ms += 1000;
    auto secs = std::chrono::time_point_cast<std::chrono::seconds>(t);
    return fmt::format("{:%Y-%m-%dT%H:%M:%S}.{:03d}Z", fmt::gmtime(std::chrono::system_clock::to_time_t(secs)), ms);
}

}  // namespace pipegen::exec
