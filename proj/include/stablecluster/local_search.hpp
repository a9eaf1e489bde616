#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "stablecluster/objectives.hpp"

namespace stablecluster {

enum class InitMode { first_k, random, farthest_first };

inline const char* init_mode_name(InitMode m) {
    switch (m) {
        case InitMode::first_k: return "first-k";
        case InitMode::random: return "random";
        case InitMode::farthest_first: return "farthest-first";
    }
    return "?";
}

struct LocalSearchConfig {
    double epsilon = 0.2;
    int t = 0;  // swap size; 0 means ceil(1/epsilon)
    std::uint64_t max_iterations = 1'000'000;
    std::uint64_t seed = 0;
    InitMode init = InitMode::farthest_first;

    int swap_size() const {
        if (t > 0) return t;
        return int(std::ceil(1.0 / epsilon));
    }
};

struct SwapStep {
    std::uint64_t iteration = 0;
    double old_cost = 0;
    double new_cost = 0;
    std::vector<int> removed;
    std::vector<int> added;
};

struct LocalSearchResult {
    Clustering clustering;
    std::vector<SwapStep> trace;
    bool converged = false;
    std::uint64_t iterations = 0;
};

// Enumerates center sets differing from `centers` (sorted) by s-out/s-in
// swaps, s = 1..t, in deterministic order: ascending s, then removed subset
// lexicographic, then added subset lexicographic. Candidates arrive sorted.
// The callback returns false to stop early; the function returns false iff
// stopped.
template <typename F>
bool for_each_swap_candidate(const std::vector<int>& centers, int t, int n, F&& fn) {
    const int k = int(centers.size());
    std::vector<char> is_center(n, 0);
    for (int c : centers) is_center[c] = 1;
    std::vector<int> others;
    others.reserve(n - k);
    for (int p = 0; p < n; ++p)
        if (!is_center[p]) others.push_back(p);
    const int m = int(others.size());

    const int smax = std::min({t, k, m});
    std::vector<int> cand;
    cand.reserve(k);
    for (int s = 1; s <= smax; ++s) {
        std::vector<int> rem(s);
        for (int i = 0; i < s; ++i) rem[i] = i;  // positions into centers
        do {
            std::vector<int> add(s);
            for (int i = 0; i < s; ++i) add[i] = i;  // positions into others
            do {
                cand.clear();
                std::size_t ri = 0;
                for (int pos = 0; pos < k; ++pos) {
                    if (ri < rem.size() && rem[ri] == pos) {
                        ++ri;
                        continue;
                    }
                    cand.push_back(centers[pos]);
                }
                for (int ai : add) cand.push_back(others[ai]);
                std::sort(cand.begin(), cand.end());
                if (!fn(std::as_const(cand))) return false;
            } while (next_combination(add, m));
        } while (next_combination(rem, k));
    }
    return true;
}

inline std::vector<std::vector<int>> swap_neighborhood(const std::vector<int>& centers, int t,
                                                       int n) {
    std::vector<std::vector<int>> out;
    for_each_swap_candidate(centers, t, n, [&](const std::vector<int>& c) {
        out.push_back(c);
        return true;
    });
    return out;
}

namespace detail {

inline std::vector<int> initial_centers(const Instance& inst, const LocalSearchConfig& cfg) {
    const int n = inst.n, k = inst.k;
    std::vector<int> centers;
    SplitMix64 rng(cfg.seed);
    switch (cfg.init) {
        case InitMode::first_k:
            for (int i = 0; i < k; ++i) centers.push_back(i);
            break;
        case InitMode::random: {
            std::vector<int> pool(n);
            for (int i = 0; i < n; ++i) pool[i] = i;
            for (int i = 0; i < k; ++i)
                std::swap(pool[i], pool[i + int(rng.below(std::uint64_t(n - i)))]);
            centers.assign(pool.begin(), pool.begin() + k);
            break;
        }
        case InitMode::farthest_first: {
            std::vector<double> md(n, kInf);
            int first = int(rng.below(std::uint64_t(n)));
            centers.push_back(first);
            md[first] = -1;
            while (int(centers.size()) < k) {
                for (int p = 0; p < n; ++p)
                    if (md[p] >= 0) md[p] = std::min(md[p], inst.dist(centers.back(), p));
                int best = -1;
                double bestd = -1;
                for (int p = 0; p < n; ++p)
                    if (md[p] > bestd) {
                        bestd = md[p];
                        best = p;
                    }
                centers.push_back(best);
                md[best] = -1;
            }
            break;
        }
    }
    std::sort(centers.begin(), centers.end());
    return centers;
}

}  // namespace detail

// Swap-based local search for k-median / k-means: repeatedly replace up to t
// centers when the candidate improves cost by the (1 - epsilon/n) factor,
// taking the first improving candidate in enumeration order. The returned
// clustering admits no candidate within swap size t whose cost is
// <= (1 - epsilon/n) * cost.
inline LocalSearchResult local_search(const Instance& inst, const LocalSearchConfig& cfg) {
    if (inst.objective != Objective::k_median && inst.objective != Objective::k_means)
        throw std::invalid_argument("local_search: objective must be k-median or k-means");
    if (cfg.epsilon <= 0 || cfg.epsilon > 1)
        throw std::invalid_argument("local_search: epsilon must be in (0,1]");
    const int n = inst.n;
    const double improve = 1.0 - cfg.epsilon / n;
    const int t = cfg.swap_size();

    LocalSearchResult res;
    std::vector<int> centers = detail::initial_centers(inst, cfg);
    double cost = voronoi(inst, centers).cost;

    while (res.iterations < cfg.max_iterations) {
        ++res.iterations;
        bool accepted = false;
        for_each_swap_candidate(centers, t, n, [&](const std::vector<int>& cand) {
            const double c = detail::subset_cost(inst, cand, improve * cost);
            if (c <= improve * cost && c < cost) {
                // Commit with a from-scratch recomputation; the scan value is
                // only a filter.
                const double exact = voronoi(inst, cand).cost;
                if (!(exact <= improve * cost && exact < cost)) return true;
                SwapStep step;
                step.iteration = res.iterations;
                step.old_cost = cost;
                step.new_cost = exact;
                std::set_difference(centers.begin(), centers.end(), cand.begin(), cand.end(),
                                    std::back_inserter(step.removed));
                std::set_difference(cand.begin(), cand.end(), centers.begin(), centers.end(),
                                    std::back_inserter(step.added));
                res.trace.push_back(std::move(step));
                centers = cand;
                cost = exact;
                accepted = true;
                return false;
            }
            return true;
        });
        if (!accepted) {
            res.converged = true;
            break;
        }
    }
    res.clustering = voronoi(inst, centers);
    return res;
}

// For each optimal cluster, whether it appears verbatim as a cluster of
// `found`.
inline std::vector<bool> lpr_membership_report(const Instance& inst, const Clustering& found,
                                               const Clustering& opt) {
    if (found.n() != inst.n || opt.n() != inst.n)
        throw std::invalid_argument("lpr_membership_report: clustering size mismatch");
    std::vector<bool> flags;
    auto opt_clusters = clusters_of(opt);
    for (auto& cl : opt_clusters) {
        std::sort(cl.begin(), cl.end());
        flags.push_back(contains_cluster_verbatim(found, cl));
    }
    return flags;
}

}  // namespace stablecluster
