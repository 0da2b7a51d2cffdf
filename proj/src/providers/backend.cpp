#include "pipegen/providers/backend.hpp"

#include <fmt/format.h>

#include "pipegen/common/text.hpp"

namespace pipegen::providers {

std::string to_string(Capability c) {
    switch (c) {
        case Capability::planning: return "planning";
        case Capability::codegen: return "codegen";
        case Capability::general: return "general";
    }
    return "general";
}

Capability capability_from_string(std::string_view s) {
    auto v = text::to_lower(s);
    if (v == "planning") return Capability::planning;
    if (v == "codegen") return Capability::codegen;
    if (v == "general") return Capability::general;
    throw std::invalid_argument(fmt::format("unknown capability '{}'", s));
}

ModelHandle parse_model_spec(std::string_view spec, ModelRole role) {
    auto first = spec.find(':');
    if (first == std::string_view::npos || first == 0 || first + 1 >= spec.size()) {
        throw std::invalid_argument(fmt::format("model spec '{}' must look like provider:model[:caps]", spec));
    }
    ModelHandle m;
    m.role = role;
    m.provider_id = std::string(spec.substr(0, first));
    auto rest = spec.substr(first + 1);
    auto second = rest.find(':');
    m.model_id = std::string(rest.substr(0, second));
    if (m.model_id.empty()) {
        throw std::invalid_argument(fmt::format("model spec '{}' has an empty model id", spec));
    }
    if (second != std::string_view::npos) {
        m.capabilities.clear();
        auto caps = rest.substr(second + 1);
        std::size_t pos = 0;
        while (pos <= caps.size()) {
            auto plus = caps.find('+', pos);
            auto tok = caps.substr(pos, plus == std::string_view::npos ? std::string_view::npos : plus - pos);
            if (!tok.empty()) m.capabilities.insert(capability_from_string(tok));
            if (plus == std::string_view::npos) break;
            pos = plus + 1;
        }
        if (m.capabilities.empty()) m.capabilities.insert(Capability::general);
    }
    return m;
}

std::string to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::rate_limit: return "rate_limit";
        case ErrorKind::quota_exceeded: return "quota_exceeded";
        case ErrorKind::transient: return "transient";
        case ErrorKind::fatal: return "fatal";
    }
    return "fatal";
}

ErrorKind error_kind_from_string(std::string_view s) {
    auto v = text::to_lower(s);
    if (v == "rate_limit") return ErrorKind::rate_limit;
    if (v == "quota_exceeded" || v == "quota") return ErrorKind::quota_exceeded;
    if (v == "transient") return ErrorKind::transient;
    if (v == "fatal") return ErrorKind::fatal;
    throw std::invalid_argument(fmt::format("unknown provider error kind '{}'", s));
}

ProviderError::ProviderError(ErrorKind kind, std::string detail)
    : std::runtime_error(fmt::format("{}: {}", to_string(kind), detail)), kind_(kind), detail_(std::move(detail)) {}

ErrorKind classify_http_failure(int status, std::string_view body) {
    if (status == 429) {
        if (text::contains_ci(body, "insufficient_quota") || text::contains_ci(body, "quota")) {
            return ErrorKind::quota_exceeded;
        }
        return ErrorKind::rate_limit;
    }
    if (status == 402) return ErrorKind::quota_exceeded;
    if (status == 408 || status >= 500 || status <= 0) return ErrorKind::transient;
    return ErrorKind::fatal;
}

}  // namespace pipegen::providers
