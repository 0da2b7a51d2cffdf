#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "pipegen/embeddings/embedding.hpp"

using namespace pipegen::embed;

namespace {
std::vector<double> to_vec(const EmbeddingVector& v) { return {v.values().begin(), v.values().end()}; }
}  // namespace

TEST_SUITE("embeddings") {

TEST_CASE("empty text encodes to the zero vector") {
    HashingEncoder enc(0, 64);
    auto v = enc.encode("");
    CHECK(v.dim() == 64);
    CHECK(v.is_zero());
    CHECK(enc.encode("   \n\t").is_zero());
}

TEST_CASE("cosine of (1,1) and (1,0)") {
    EmbeddingVector a({1.0, 1.0});
    EmbeddingVector b({1.0, 0.0});
    CHECK(cosine(a, b) == doctest::Approx(0.70710678).epsilon(1e-8));
    CHECK(cosine(a, a) == doctest::Approx(1.0));
}

TEST_CASE("zero vectors are degenerate, mismatched dims throw") {
    auto r = cosine_checked(EmbeddingVector(3), EmbeddingVector({1.0, 2.0, 3.0}));
    CHECK(r.degenerate);
    CHECK(r.value == 0.0);
    CHECK_THROWS_AS(cosine(EmbeddingVector(2), EmbeddingVector(3)), std::invalid_argument);
}

TEST_CASE("non-finite components are rejected") {
    CHECK_THROWS(EmbeddingVector({1.0, std::numeric_limits<double>::quiet_NaN()}));
    CHECK_THROWS(EmbeddingVector(std::vector<double>{std::numeric_limits<double>::infinity()}));
}

TEST_CASE("hashing encoder is deterministic, normalized and seed dependent") {
    HashingEncoder a(7), b(7), c(8);
    auto x = a.encode("Kafka source with tumbling windows");
    CHECK(x == b.encode("Kafka source with tumbling windows"));
    CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(x == c.encode("Kafka source with tumbling windows"));
    // Case and spacing do not matter.
    CHECK(x == a.encode("kafka   SOURCE with tumbling\nwindows"));
}

TEST_CASE("cosine matches the loop oracle on random vectors") {
    oracle::Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        std::size_t d = 1 + rng.below(16);
        std::vector<double> a(d), b(d);
        for (auto& x : a) x = rng.uniform(-1, 1);
        for (auto& x : b) x = rng.uniform(-1, 1);
        CHECK(std::abs(cosine(EmbeddingVector(a), EmbeddingVector(b)) - oracle::cosine(a, b)) < 1e-12);
    }
}

TEST_CASE("similarity matrix is symmetric with unit diagonal for nonzero inputs") {
    HashingEncoder enc(1, 32);
    std::vector<EmbeddingVector> vs{enc.encode("a b"), enc.encode("b c"), enc.encode("c d e")};
    auto m = similarity_matrix(vs);
    REQUIRE(m.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(m(i, i) == doctest::Approx(1.0));
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(m(i, j) == m(j, i));
            CHECK(m(i, j) == doctest::Approx(oracle::cosine(to_vec(vs[i]), to_vec(vs[j]))));
        }
    }
}

TEST_CASE("mean vector") {
    std::vector<EmbeddingVector> vs{EmbeddingVector({1.0, 0.0}), EmbeddingVector({0.0, 1.0})};
    auto m = mean_vector(vs);
    CHECK(m[0] == 0.5);
    CHECK(m[1] == 0.5);
    CHECK(mean_vector({}).dim() == 0);
}

}  // TEST_SUITE
