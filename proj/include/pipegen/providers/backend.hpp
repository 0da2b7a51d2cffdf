#pragma once

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pipegen::providers {

enum class Capability { planning, codegen, general };
enum class ModelRole { primary, backup };

std::string to_string(Capability c);
Capability capability_from_string(std::string_view s);  // throws std::invalid_argument

struct ModelHandle {
    std::string provider_id;
    std::string model_id;
    std::set<Capability> capabilities{Capability::general};
    ModelRole role = ModelRole::primary;

    bool has(Capability c) const { return capabilities.count(c) != 0; }
    std::string name() const { return provider_id + "/" + model_id; }
};

/// Parses "provider:model[:cap1+cap2]", e.g. "openai:gpt-4o-mini:codegen+planning".
ModelHandle parse_model_spec(std::string_view spec, ModelRole role);

struct ChatRequest {
    // Routing tag such as "intent", "params", "step:design" or "hgot:generate:analysis".
    // Never sent to a backend; lets scripted mocks and logs tell calls apart.
    std::string task;
    std::string system_text;
    std::string user_text;
    int max_tokens = 2048;
    double temperature = 0.2;
};

struct ChatResponse {
    std::string content;
    std::string finish_reason;
    std::string model;
};

enum class ErrorKind { rate_limit, quota_exceeded, transient, fatal };

std::string to_string(ErrorKind k);
ErrorKind error_kind_from_string(std::string_view s);  // throws std::invalid_argument

class ProviderError : public std::runtime_error {
public:
    ProviderError(ErrorKind kind, std::string detail);

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }
    bool is_rate_limit() const noexcept { return kind_ == ErrorKind::rate_limit; }
    bool is_quota_exceeded() const noexcept { return kind_ == ErrorKind::quota_exceeded; }

private:
    ErrorKind kind_;
    std::string detail_;
};

/// HTTP status (and body) to error kind. 429 is a rate limit unless the body
/// reports an exhausted quota; 402 is a quota error; 408 and 5xx are transient;
/// every other non-2xx status is fatal.
ErrorKind classify_http_failure(int status, std::string_view body);

class Backend {
public:
    virtual ~Backend() = default;
    // Throws ProviderError on failure.
    virtual ChatResponse complete(const ModelHandle& model, const ChatRequest& request) = 0;
};

}  // namespace pipegen::providers
