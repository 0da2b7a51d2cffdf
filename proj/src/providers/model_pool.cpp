#include "pipegen/providers/model_pool.hpp"

#include <fmt/format.h>

namespace pipegen::providers {

ModelPool::ModelPool(std::vector<ModelHandle> models) : models_(std::move(models)) {
    if (models_.empty()) {
        throw ConfigError("model pool requires at least one model");
    }
    for (const auto& m : models_) {
        if (m.provider_id.empty() || m.model_id.empty()) {
            throw ConfigError("model handles need non-empty provider and model ids");
        }
    }
}

ModelPool::ModelPool(ModelPool&& other) noexcept
    : models_(std::move(other.models_)), index_(other.index_.load(std::memory_order_acquire)) {}

ModelHandle ModelPool::switch_to_next_model() {
    std::size_t current = index_.load(std::memory_order_acquire);
    std::size_t next = 0;
    do {
        next = current < models_.size() - 1 ? current + 1 : 0;
    } while (!index_.compare_exchange_weak(current, next, std::memory_order_acq_rel));
    return models_[next];
}

void ModelPool::prefer(Capability c) {
    if (models_[current_index()].has(c)) return;
    for (std::size_t i = 0; i < models_.size(); ++i) {
        if (models_[i].has(c)) {
            index_.store(i, std::memory_order_release);
            return;
        }
    }
}

ModelPool initialize_models(std::vector<ModelHandle> primary, std::vector<ModelHandle> backup) {
    if (primary.empty()) {
        throw ConfigError("at least one primary model is required");
    }
    std::vector<ModelHandle> all;
    all.reserve(primary.size() + backup.size());
    for (auto& m : primary) {
        m.role = ModelRole::primary;
        all.push_back(std::move(m));
    }
    for (auto& m : backup) {
        m.role = ModelRole::backup;
        all.push_back(std::move(m));
    }
    return ModelPool(std::move(all));
}

void BackendRegistry::add(const std::string& provider_id, std::shared_ptr<Backend> backend) {
    backends_[provider_id] = std::move(backend);
}

Backend* BackendRegistry::find(const std::string& provider_id) const {
    if (auto it = backends_.find(provider_id); it != backends_.end()) return it->second.get();
    return default_.get();
}

ChatResponse send(const ModelPool& pool, const BackendRegistry& registry, const ChatRequest& request) {
    ModelHandle model = pool.active();
    Backend* backend = registry.find(model.provider_id);
    if (backend == nullptr) {
        throw ProviderError(ErrorKind::fatal, fmt::format("no backend registered for provider '{}'", model.provider_id));
    }
    ChatResponse response = backend->complete(model, request);
    if (response.model.empty()) response.model = model.name();
    return response;
}

}  // namespace pipegen::providers
