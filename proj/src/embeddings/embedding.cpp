#include "pipegen/embeddings/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "pipegen/common/text.hpp"

namespace pipegen::embed {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = kFnvOffset;
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("embedding components must be finite");
        }
    }
}

double EmbeddingVector::norm() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
}

bool EmbeddingVector::is_zero() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

HashingEncoder::HashingEncoder(std::uint64_t seed, std::size_t dim) : seed_(seed), dim_(dim) {
    if (dim == 0) {
        throw std::invalid_argument("encoder dimension must be positive");
    }
}

EmbeddingVector HashingEncoder::encode(std::string_view text) const {
    std::vector<double> acc(dim_, 0.0);
    for (const auto& token : text::tokenize(text)) {
        std::uint64_t h = splitmix64(fnv1a(token) ^ splitmix64(seed_));
        std::size_t bucket = static_cast<std::size_t>(h % dim_);
        acc[bucket] += ((h >> 63) != 0U) ? -1.0 : 1.0;
    }
    double n = 0.0;
    for (double v : acc) n += v * v;
    if (n > 0.0) {
        n = std::sqrt(n);
        for (double& v : acc) v /= n;
    }
    return EmbeddingVector(std::move(acc));
}

std::shared_ptr<const Encoder> make_hashing_encoder(std::uint64_t seed, std::size_t dim) {
    return std::make_shared<const HashingEncoder>(seed, dim);
}

CosineResult cosine_checked(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument(fmt::format("cosine: dimension mismatch {} vs {}", a.dim(), b.dim()));
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        return {0.0, true};
    }
    double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return {std::clamp(c, -1.0, 1.0), false};
}

SimilarityMatrix similarity_matrix(std::span<const EmbeddingVector> vectors) {
    SimilarityMatrix m(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i; j < vectors.size(); ++j) {
            double c = cosine(vectors[i], vectors[j]);
            m.at(i, j) = c;
            m.at(j, i) = c;
        }
    }
    return m;
}

EmbeddingVector mean_vector(std::span<const EmbeddingVector> vectors) {
    if (vectors.empty()) return {};
    std::vector<double> acc(vectors.front().dim(), 0.0);
    for (const auto& v : vectors) {
        if (v.dim() != acc.size()) throw std::invalid_argument("mean_vector: dimension mismatch");
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
    }
    for (double& x : acc) x /= static_cast<double>(vectors.size());
    return EmbeddingVector(std::move(acc));
}

}  // namespace pipegen::embed
