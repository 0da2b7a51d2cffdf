#include "pipegen/executor/retry.hpp"

#include <cmath>
#include <stdexcept>

#include "pipegen/executor/event_log.hpp"

namespace pipegen::exec {

double SeededRandom::next() {
    std::lock_guard lock(mu_);
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

FixedSequence::FixedSequence(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("FixedSequence needs at least one value");
    for (double v : values_) {
        if (!(v >= 0.0 && v < 1.0)) throw std::invalid_argument("FixedSequence values must lie in [0, 1)");
    }
}

double FixedSequence::next() {
    std::lock_guard lock(mu_);
    double v = values_[pos_];
    pos_ = (pos_ + 1) % values_.size();
    return v;
}

void RetryPolicy::validate() const {
    if (!(base_delay.count() >= 0.0) || !std::isfinite(base_delay.count())) {
        throw std::invalid_argument("base_delay must be a finite, non-negative duration");
    }
    if (max_retries < 1) throw std::invalid_argument("max_retries must be at least 1");
    if (!rng) throw std::invalid_argument("retry policy has no random source");
}

Millis backoff_delay(int retries, double r, Millis base) {
    if (retries < 0) throw std::invalid_argument("retries must be non-negative");
    return Millis{base.count() * std::ldexp(1.0, retries) * (0.5 + r)};
}

Millis backoff_delay(int retries, const RetryPolicy& policy) {
    return backoff_delay(retries, policy.rng->next(), policy.base_delay);
}

RetryHandler::RetryHandler(providers::ModelPool& pool, const providers::BackendRegistry& registry, RetryPolicy policy,
                           Clock& clock, EventLog* log)
    : pool_(pool), registry_(registry), policy_(std::move(policy)), clock_(clock), log_(log) {
    policy_.validate();
}

CallOutcome RetryHandler::call(const providers::ChatRequest& request, const Validator& validate,
                               const std::string& scope) {
    using providers::ErrorKind;
    CallOutcome out;
    int retries = 0;
    while (retries < policy_.max_retries) {
        auto model = pool_.active();
        out.model_used = model.name();
        ++out.attempts;
        if (log_) log_->attempt(scope, out.attempts, model.name());
        try {
            auto resp = providers::send(pool_, registry_, request);
            if (validate) validate(resp);
            out.response = std::move(resp);
            out.last_error.reset();
            out.last_detail.clear();
            return out;
        } catch (const providers::ProviderError& e) {
            out.last_error = e.kind();
            out.last_detail = e.detail();
            if (log_) log_->failure(scope, out.attempts, e.kind(), e.detail());
            switch (e.kind()) {
            case ErrorKind::rate_limit: {
                double r = policy_.rng->next();
                auto delay = backoff_delay(retries, r, policy_.base_delay);
                if (log_) log_->sleep(scope, retries, r, delay);
                clock_.sleep_for(delay);
                break;
            }
            case ErrorKind::quota_exceeded:
            case ErrorKind::fatal: {
                auto from = pool_.current_index();
                pool_.switch_to_next_model();
                if (log_) log_->rotate(scope, from, pool_.current_index(), e.kind());
                break;
            }
            case ErrorKind::transient:
                break;
            }
        }
        ++retries;
    }
    return out;
}

}  // namespace pipegen::exec
