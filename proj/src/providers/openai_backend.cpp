#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "pipegen/providers/openai_backend.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include <fmt/format.h>
#include <httplib.h>

namespace pipegen::providers {
namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix without trailing slash
};

SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    SplitUrl out;
    out.origin = url.substr(0, path_start);
    if (path_start != std::string::npos) out.prefix = url.substr(path_start);
    while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    return out;
}

std::string env_or(const std::string& name, const std::string& fallback) {
    const char* v = std::getenv(name.c_str());
    return (v != nullptr && *v != '\0') ? std::string(v) : fallback;
}

std::string post_json(const EndpointConfig& cfg, const std::string& path, const nlohmann::json& body) {
    auto url = split_url(cfg.base_url);
    httplib::Client client(url.origin);
    client.set_connection_timeout(cfg.timeout);
    client.set_read_timeout(cfg.timeout);
    client.set_write_timeout(cfg.timeout);
    httplib::Headers headers;
    if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);

    auto res = client.Post(url.prefix + path, headers, body.dump(), "application/json");
    if (!res) {
        throw ProviderError(ErrorKind::transient, fmt::format("request to {} failed: {}", cfg.base_url,
                                                              httplib::to_string(res.error())));
    }
    if (res->status < 200 || res->status >= 300) {
        throw ProviderError(classify_http_failure(res->status, res->body),
                            fmt::format("HTTP {}: {}", res->status, res->body.substr(0, 512)));
    }
    return res->body;
}

}  // namespace

EndpointConfig endpoint_from_env(const std::string& provider_id) {
    std::string prefix;
    for (char c : provider_id) {
        prefix += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    std::string default_url;
    if (provider_id == "openai") default_url = "https://api.openai.com/v1";
    else if (provider_id == "mistral") default_url = "https://api.mistral.ai/v1";
    else if (provider_id == "groq") default_url = "https://api.groq.com/openai/v1";
    else if (provider_id == "anthropic") default_url = "https://api.anthropic.com/v1";

    EndpointConfig cfg;
    cfg.base_url = env_or(prefix + "_BASE_URL", default_url);
    cfg.api_key = env_or(prefix + "_API_KEY", "");
    return cfg;
}

nlohmann::json chat_request_body(const ModelHandle& model, const ChatRequest& request) {
    nlohmann::json messages = nlohmann::json::array();
    if (!request.system_text.empty()) {
        messages.push_back({{"role", "system"}, {"content", request.system_text}});
    }
    messages.push_back({{"role", "user"}, {"content", request.user_text}});
    return {{"model", model.model_id},
            {"messages", std::move(messages)},
            {"temperature", request.temperature},
            {"max_tokens", request.max_tokens}};
}

ChatResponse parse_chat_response(const std::string& body, const ModelHandle& model) {
    try {
        auto doc = nlohmann::json::parse(body);
        const auto& choice = doc.at("choices").at(0);
        ChatResponse out;
        out.content = choice.at("message").at("content").get<std::string>();
        if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
            out.finish_reason = choice["finish_reason"].get<std::string>();
        }
        out.model = model.name();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(ErrorKind::fatal, fmt::format("malformed chat completion: {}", e.what()));
    }
}

OpenAICompatBackend::OpenAICompatBackend(EndpointConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) {
        throw std::invalid_argument("OpenAI-compatible backend needs a base URL");
    }
}

ChatResponse OpenAICompatBackend::complete(const ModelHandle& model, const ChatRequest& request) {
    auto body = post_json(config_, "/chat/completions", chat_request_body(model, request));
    return parse_chat_response(body, model);
}

HttpEmbeddingEncoder::HttpEmbeddingEncoder(EndpointConfig config, std::string model, std::size_t dim)
    : config_(std::move(config)), model_(std::move(model)), dim_(dim) {}

embed::EmbeddingVector HttpEmbeddingEncoder::encode(std::string_view text) const {
    if (text.empty()) return embed::EmbeddingVector(dim_);
    auto body = post_json(config_, "/embeddings", {{"model", model_}, {"input", std::string(text)}});
    try {
        auto doc = nlohmann::json::parse(body);
        auto values = doc.at("data").at(0).at("embedding").get<std::vector<double>>();
        if (values.size() != dim_) {
            throw ProviderError(ErrorKind::fatal,
                                fmt::format("embedding dimension {} does not match configured {}", values.size(), dim_));
        }
        return embed::EmbeddingVector(std::move(values));
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(ErrorKind::transient, fmt::format("malformed embedding reply: {}", e.what()));
    }
}

}  // namespace pipegen::providers
