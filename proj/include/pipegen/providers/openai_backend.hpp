#pragma once

#include <chrono>
#include <memory>
#include <string>

#include <json.hpp>

#include "pipegen/embeddings/embedding.hpp"
#include "pipegen/providers/backend.hpp"

namespace pipegen::providers {

struct EndpointConfig {
    std::string base_url;  // e.g. "https://api.openai.com/v1"
    std::string api_key;
    std::chrono::seconds timeout{120};
};

/// Reads <PROVIDER>_BASE_URL and <PROVIDER>_API_KEY (provider id upper-cased, '-' -> '_').
/// Known providers (openai, mistral, groq, anthropic) get a default base URL.
EndpointConfig endpoint_from_env(const std::string& provider_id);

nlohmann::json chat_request_body(const ModelHandle& model, const ChatRequest& request);

/// Parses an OpenAI-compatible chat-completion reply; throws ProviderError(fatal) if malformed.
ChatResponse parse_chat_response(const std::string& body, const ModelHandle& model);

/// OpenAI-compatible chat-completion backend over HTTP(S).
class OpenAICompatBackend final : public Backend {
public:
    explicit OpenAICompatBackend(EndpointConfig config);
    ChatResponse complete(const ModelHandle& model, const ChatRequest& request) override;

private:
    EndpointConfig config_;
};

/// Encoder backed by an OpenAI-compatible /embeddings endpoint.
/// Failures surface as ProviderError(transient) unless the status classifies otherwise.
class HttpEmbeddingEncoder final : public embed::Encoder {
public:
    HttpEmbeddingEncoder(EndpointConfig config, std::string model, std::size_t dim);

    embed::EmbeddingVector encode(std::string_view text) const override;
    std::size_t dim() const noexcept override { return dim_; }
    embed::EncoderKind kind() const noexcept override { return embed::EncoderKind::external_provider; }

private:
    EndpointConfig config_;
    std::string model_;
    std::size_t dim_;
};

}  // namespace pipegen::providers
