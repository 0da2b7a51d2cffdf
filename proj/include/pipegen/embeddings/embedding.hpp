#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace pipegen::embed {

inline constexpr std::size_t kDefaultDim = 256;

/// Fixed-length vector of finite reals produced by an Encoder.
class EmbeddingVector {
public:
    EmbeddingVector() = default;
    explicit EmbeddingVector(std::size_t dim) : values_(dim, 0.0) {}
    explicit EmbeddingVector(std::vector<double> values);  // throws on non-finite components

    std::size_t dim() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    double norm() const noexcept;
    bool is_zero() const noexcept;

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

private:
    std::vector<double> values_;
};

enum class EncoderKind { deterministic_test, external_provider };

/// Text encoder. Implementations are immutable after construction and safe to share.
class Encoder {
public:
    virtual ~Encoder() = default;
    virtual EmbeddingVector encode(std::string_view text) const = 0;
    virtual std::size_t dim() const noexcept = 0;
    virtual EncoderKind kind() const noexcept = 0;
};

/// Seeded feature hash of whitespace-separated lowercase tokens, projected to `dim`
/// buckets with a hashed sign and L2-normalized. Empty text encodes to the zero vector.
class HashingEncoder final : public Encoder {
public:
    explicit HashingEncoder(std::uint64_t seed = 0, std::size_t dim = kDefaultDim);

    EmbeddingVector encode(std::string_view text) const override;
    std::size_t dim() const noexcept override { return dim_; }
    EncoderKind kind() const noexcept override { return EncoderKind::deterministic_test; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::size_t dim_;
};

std::shared_ptr<const Encoder> make_hashing_encoder(std::uint64_t seed = 0, std::size_t dim = kDefaultDim);

struct CosineResult {
    double value = 0.0;
    // Set when either input has zero norm; value is then 0.
    bool degenerate = false;
};

/// (a.b)/(|a||b|) clamped to [-1, 1]. Throws std::invalid_argument on dimension mismatch.
CosineResult cosine_checked(const EmbeddingVector& a, const EmbeddingVector& b);

inline double cosine(const EmbeddingVector& a, const EmbeddingVector& b) { return cosine_checked(a, b).value; }

/// Dense symmetric matrix of pairwise cosine similarities, row-major.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    explicit SimilarityMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& at(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

SimilarityMatrix similarity_matrix(std::span<const EmbeddingVector> vectors);

/// Component-wise mean; empty input yields an empty vector.
EmbeddingVector mean_vector(std::span<const EmbeddingVector> vectors);

}  // namespace pipegen::embed
