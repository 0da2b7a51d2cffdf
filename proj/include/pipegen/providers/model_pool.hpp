#pragma once

#include <atomic>
#include <cstddef>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pipegen/providers/backend.hpp"

namespace pipegen::providers {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordered model pool with a shared active index. Rotation wraps to 0 after the last model.
/// The index is updated atomically, so concurrent senders always observe a valid position.
class ModelPool {
public:
    explicit ModelPool(std::vector<ModelHandle> models);  // throws ConfigError when empty
    ModelPool(ModelPool&& other) noexcept;
    ModelPool(const ModelPool&) = delete;
    ModelPool& operator=(const ModelPool&) = delete;

    std::size_t size() const noexcept { return models_.size(); }
    std::size_t current_index() const noexcept { return index_.load(std::memory_order_acquire); }
    ModelHandle active() const { return models_[current_index()]; }
    const std::vector<ModelHandle>& models() const noexcept { return models_; }

    ModelHandle switch_to_next_model();

    // Moves to the first model tagged with `c` unless the active one already is.
    // No-op when no model carries the tag.
    void prefer(Capability c);

    void reset() noexcept { index_.store(0, std::memory_order_release); }

private:
    std::vector<ModelHandle> models_;
    std::atomic<std::size_t> index_{0};
};

/// Primaries first, then backups; active index 0.
ModelPool initialize_models(std::vector<ModelHandle> primary, std::vector<ModelHandle> backup);

/// provider_id -> backend. A default backend, when set, serves unknown providers.
class BackendRegistry {
public:
    void add(const std::string& provider_id, std::shared_ptr<Backend> backend);
    void set_default(std::shared_ptr<Backend> backend) { default_ = std::move(backend); }
    Backend* find(const std::string& provider_id) const;

private:
    std::map<std::string, std::shared_ptr<Backend>> backends_;
    std::shared_ptr<Backend> default_;
};

/// Routes the request to the pool's active model. Throws ProviderError; a missing
/// backend for the active provider is reported as fatal.
ChatResponse send(const ModelPool& pool, const BackendRegistry& registry, const ChatRequest& request);

}  // namespace pipegen::providers
