#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pipegen/executor/clock.hpp"
#include "pipegen/providers/model_pool.hpp"

namespace pipegen::exec {

class EventLog;

/// Uniform reals in [0, 1).
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual double next() = 0;
};

/// mt19937_64 with the top 53 bits scaled by 2^-53, so 1.0 is never produced.
class SeededRandom final : public RandomSource {
public:
    explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
    double next() override;

private:
    std::mutex mu_;
    std::mt19937_64 engine_;
};

/// Replays a fixed list, cycling. For tests that need a specific r.
class FixedSequence final : public RandomSource {
public:
    explicit FixedSequence(std::vector<double> values);  // each in [0,1), nonempty
    double next() override;

private:
    std::mutex mu_;
    std::vector<double> values_;
    std::size_t pos_ = 0;
};

struct RetryPolicy {
    Millis base_delay{1000.0};
    int max_retries = 5;
    std::shared_ptr<RandomSource> rng = std::make_shared<SeededRandom>(0);

    void validate() const;  // base_delay >= 0, max_retries >= 1, rng set
};

/// base * 2^retries * (0.5 + r)
Millis backoff_delay(int retries, double r, Millis base);
/// Draws r from the policy's source.
Millis backoff_delay(int retries, const RetryPolicy& policy);

using Validator = std::function<void(const providers::ChatResponse&)>;

struct CallOutcome {
    std::optional<providers::ChatResponse> response;  // absent when retries ran out
    int attempts = 0;
    std::string model_used;  // last model tried
    std::optional<providers::ErrorKind> last_error;
    std::string last_detail;
};

/// The retry loop shared by every provider call: on a rate limit sleep for the backoff
/// delay, on an exhausted quota or a fatal error rotate to the next model, on a transient
/// error simply try again. Each failure costs one retry. A validator may reject a reply by
/// throwing ProviderError, which is handled like any other failure.
class RetryHandler {
public:
    RetryHandler(providers::ModelPool& pool, const providers::BackendRegistry& registry, RetryPolicy policy,
                 Clock& clock, EventLog* log = nullptr);

    CallOutcome call(const providers::ChatRequest& request, const Validator& validate = {},
                     const std::string& scope = {});

    providers::ModelPool& pool() noexcept { return pool_; }
    const RetryPolicy& policy() const noexcept { return policy_; }
    Clock& clock() noexcept { return clock_; }
    EventLog* log() noexcept { return log_; }

private:
    providers::ModelPool& pool_;
    const providers::BackendRegistry& registry_;
    RetryPolicy policy_;
    Clock& clock_;
    EventLog* log_;
};

}  // namespace pipegen::exec
