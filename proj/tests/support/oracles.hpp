#pragma once

// Independent reference computations for tests. Nothing here calls into the library's
// math; each formula is re-derived with plain loops.

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

/// splitmix64 stream; deliberately a different generator from the one the library uses.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) / 9007199254740992.0; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
    bool coin(double p = 0.5) { return uniform() < p; }

private:
    std::uint64_t state_;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double na = std::sqrt(dot(a, a));
    double nb = std::sqrt(dot(b, b));
    if (na == 0 || nb == 0) return 0.0;
    double c = dot(a, b) / (na * nb);
    return c > 1 ? 1 : (c < -1 ? -1 : c);
}

/// Weight of a source/target hyperedge: mean over all (s, t) pairs of cosine * relevance.
template <class Rel>
double edge_weight(const std::vector<std::vector<double>>& S, const std::vector<int>& s_types,
                   const std::vector<std::vector<double>>& T, const std::vector<int>& t_types, Rel relevance) {
    double total = 0;
    for (std::size_t i = 0; i < S.size(); ++i) {
        for (std::size_t k = 0; k < T.size(); ++k) total += cosine(S[i], T[k]) * relevance(s_types[i], t_types[k]);
    }
    return total / static_cast<double>(S.size() * T.size());
}

/// Mean cosine over unordered pairs.
inline double mean_pairwise(const std::vector<std::vector<double>>& vs) {
    if (vs.size() < 2) return 1.0;
    double total = 0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
            total += cosine(vs[i], vs[j]);
            ++pairs;
        }
    }
    return total / static_cast<double>(pairs);
}

/// Error-free score written out term by term.
inline double error_free_score(long s, long l, long r) {
    double a = 1.0 / (1.0 + static_cast<double>(s));
    double b = 1.0 / (1.0 + static_cast<double>(l));
    double c = 1.0 / (1.0 + static_cast<double>(r));
    return (a + b + c) / 3.0;
}

/// Plain adjacency-list graph for pairwise reductions.
struct PairGraph {
    std::map<int, std::set<int>> adj;
    void add(int a, int b) {
        if (a == b) {
            adj[a];
            return;
        }
        adj[a].insert(b);
        adj[b].insert(a);
    }
    std::set<int> neighbors(int v) const {
        auto it = adj.find(v);
        return it == adj.end() ? std::set<int>{} : it->second;
    }
};

/// argmax of score over candidates; ties go to the smallest candidate. -1 when empty.
template <class Score>
int argmax_smallest(const std::set<int>& candidates, Score score) {
    int best = -1;
    double best_score = 0;
    for (int c : candidates) {
        double s = score(c);
        if (best < 0 || s > best_score) {
            best = c;
            best_score = s;
        }
    }
    return best;
}

}  // namespace oracle
