#pragma once

#include <chrono>
#include <mutex>
#include <string>
#include <vector>

namespace pipegen::exec {

using Millis = std::chrono::duration<double, std::milli>;
using TimePoint = std::chrono::system_clock::time_point;

class Clock {
public:
    virtual ~Clock() = default;
    virtual TimePoint now() const = 0;
    virtual void sleep_for(Millis d) = 0;
};

class SystemClock final : public Clock {
public:
    TimePoint now() const override { return std::chrono::system_clock::now(); }
    void sleep_for(Millis d) override;
};

/// Simulated time. Sleeping advances `now` by the requested amount and records it;
/// nothing actually blocks.
class VirtualClock final : public Clock {
public:
    // 2024-01-01T00:00:00Z unless told otherwise.
    explicit VirtualClock(TimePoint start = TimePoint{std::chrono::seconds{1704067200}});

    TimePoint now() const override;
    void sleep_for(Millis d) override;
    void advance(Millis d);

    std::vector<Millis> sleeps() const;

private:
    mutable std::mutex mu_;
    TimePoint now_;
    std::vector<Millis> sleeps_;
};

/// "YYYY-MM-DDTHH:MM:SS.mmmZ"
std::string format_utc(TimePoint t);

}  // namespace pipegen::exec
