#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// are deliberately coded against the definitions, not the library internals.

#include <algorithm>
#include <vector>

#include "stablecluster/clustering.hpp"
#include "stablecluster/digraph.hpp"
#include "stablecluster/instance.hpp"

namespace testutil {

using namespace stablecluster;

inline Instance matrix_instance(int n, int k, std::vector<double> d, bool symmetric = true) {
    Instance inst;
    inst.n = n;
    inst.k = k;
    inst.dist.n = n;
    inst.dist.v = std::move(d);
    inst.symmetric = symmetric;
    inst.objective = symmetric ? Objective::k_center : Objective::asym_k_center;
    return inst;
}

inline Instance line_instance(const std::vector<double>& xs, int k) {
    const int n = int(xs.size());
    Instance inst;
    inst.n = n;
    inst.k = k;
    inst.symmetric = true;
    inst.objective = Objective::k_center;
    inst.dist = DistMatrix(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inst.dist(i, j) = std::abs(xs[i] - xs[j]);
    return inst;
}

// Random planar points on the 2^-10 grid inside [0, 16]^2; always a metric.
inline Instance random_euclidean(int n, int k, std::uint64_t seed,
                                 Objective obj = Objective::k_center) {
    SplitMix64 rng(seed);
    Instance inst;
    inst.n = n;
    inst.k = k;
    inst.symmetric = true;
    inst.objective = obj;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = double(rng.below(16 * 1024 + 1)) / 1024.0;
        ys[i] = double(rng.below(16 * 1024 + 1)) / 1024.0;
    }
    inst.dist = DistMatrix(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double dx = xs[i] - xs[j], dy = ys[i] - ys[j];
            inst.dist(i, j) = std::sqrt(dx * dx + dy * dy);
        }
    return inst;
}

// Random directed metric: random arc costs pushed through a reference
// all-pairs relaxation until they satisfy the directed triangle inequality.
inline Instance random_asymmetric(int n, int k, std::uint64_t seed) {
    SplitMix64 rng(seed);
    DistMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = i == j ? 0.0 : double(1 + rng.below(10 * 1024)) / 1024.0;
    m = metric_completion(std::move(m));
    Instance inst;
    inst.n = n;
    inst.k = k;
    inst.symmetric = false;
    inst.objective = Objective::asym_k_center;
    inst.dist = std::move(m);
    return inst;
}

// Independent all-pairs shortest paths: Bellman-Ford from every source.
inline DistMatrix apsp_bellman_ford(const DistMatrix& w) {
    const int n = w.n;
    DistMatrix d(n, kInf);
    for (int s = 0; s < n; ++s) {
        d(s, s) = 0;
        for (int round = 0; round < n; ++round) {
            bool changed = false;
            for (int u = 0; u < n; ++u) {
                if (std::isinf(d(s, u))) continue;
                for (int v = 0; v < n; ++v) {
                    if (std::isinf(w(u, v))) continue;
                    const double via = d(s, u) + w(u, v);
                    if (via < d(s, v)) {
                        d(s, v) = via;
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }
    }
    return d;
}

// Brute-force x-hop reachability by repeated single-step expansion over an
// explicit adjacency matrix.
inline std::vector<int> bfs_ball_oracle(const Instance& inst, double r, int start, int hops,
                                        bool forward) {
    const int n = inst.n;
    std::vector<char> in_ball(n, 0);
    in_ball[start] = 1;
    for (int step = 0; step < hops; ++step) {
        std::vector<char> next = in_ball;
        for (int u = 0; u < n; ++u)
            if (in_ball[u])
                for (int v = 0; v < n; ++v) {
                    const double d = forward ? inst.dist(u, v) : inst.dist(v, u);
                    if (d <= r) next[v] = 1;
                }
        in_ball = next;
    }
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if (in_ball[v]) out.push_back(v);
    return out;
}

// Direct evaluation of min over permutations of sum |A_i \ B_sigma(i)|.
inline long long closeness_oracle(const Clustering& a, const Clustering& b) {
    const int k = a.k();
    auto ca = clusters_of(a), cb = clusters_of(b);
    for (auto& c : ca) std::sort(c.begin(), c.end());
    for (auto& c : cb) std::sort(c.begin(), c.end());
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = i;
    long long best = std::numeric_limits<long long>::max();
    do {
        long long sum = 0;
        for (int i = 0; i < k; ++i) {
            std::vector<int> diff;
            std::set_difference(ca[i].begin(), ca[i].end(), cb[perm[i]].begin(),
                                cb[perm[i]].end(), std::back_inserter(diff));
            sum += (long long)diff.size();
        }
        best = std::min(best, sum);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace testutil
