#pragma once

#include <algorithm>
#include <set>
#include <thread>
#include <vector>

#include "stablecluster/clustering.hpp"
#include "stablecluster/instance.hpp"

namespace stablecluster {

struct ObjectiveValue {
    Objective tag = Objective::k_center;
    double value = 0;
};

// Subset-count guard for the exhaustive oracle.
inline constexpr std::uint64_t kOracleGuard = 10'000'000;

// Objective value of a fixed (centers, assignment) pair. Deterministic
// summation order (ascending point index) so recomputation is bit-stable.
inline double clustering_cost(const Instance& inst, const std::vector<int>& centers,
                              const std::vector<int>& assign) {
    double sum = 0, mx = 0;
    for (int p = 0; p < inst.n; ++p) {
        const double d = inst.dist(centers[assign[p]], p);
        switch (inst.objective) {
            case Objective::k_median: sum += d; break;
            case Objective::k_means: sum += d * d; break;
            case Objective::k_center:
            case Objective::asym_k_center: mx = std::max(mx, d); break;
        }
    }
    return inst.objective == Objective::k_median || inst.objective == Objective::k_means ? sum : mx;
}

inline ObjectiveValue evaluate_objective(const Instance& inst, const Clustering& c) {
    return ObjectiveValue{inst.objective, clustering_cost(inst, c.centers, c.assign)};
}

// Max distance from any point to its assigned center, independent of the
// instance's objective tag.
inline double clustering_radius(const Instance& inst, const Clustering& c) {
    double mx = 0;
    for (int p = 0; p < inst.n; ++p) mx = std::max(mx, inst.dist(c.centers[c.assign[p]], p));
    return mx;
}

// Voronoi partition induced by a center list. Each point goes to the center
// minimizing dist(center, point); exact-distance ties go to the lowest center
// position in the list.
inline Clustering voronoi(const Instance& inst, const std::vector<int>& centers) {
    if (centers.empty()) throw std::invalid_argument("voronoi: empty center list");
    {
        std::vector<int> s = centers;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw std::invalid_argument("voronoi: duplicate center indices");
        if (s.front() < 0 || s.back() >= inst.n)
            throw std::invalid_argument("voronoi: center index out of range");
    }
    Clustering c;
    c.centers = centers;
    c.assign.resize(inst.n);
    for (int p = 0; p < inst.n; ++p) {
        int best = 0;
        double bestd = inst.dist(centers[0], p);
        for (int pos = 1; pos < int(centers.size()); ++pos) {
            const double d = inst.dist(centers[pos], p);
            if (d < bestd) {
                bestd = d;
                best = pos;
            }
        }
        c.assign[p] = best;
    }
    c.cost = clustering_cost(inst, c.centers, c.assign);
    return c;
}

struct ExactSolveResult {
    Clustering best;            // lexicographically smallest optimal center set
    bool unique_partition = true;
    std::vector<std::vector<int>> optimal_center_sets;  // all subsets with optimal cost
    bool optimal_sets_truncated = false;
    std::uint64_t subsets = 0;
};

namespace detail {

inline double subset_cost(const Instance& inst, const std::vector<int>& centers, double prune) {
    double sum = 0, mx = 0;
    const bool additive =
        inst.objective == Objective::k_median || inst.objective == Objective::k_means;
    for (int p = 0; p < inst.n; ++p) {
        double bd = inst.dist(centers[0], p);
        for (std::size_t i = 1; i < centers.size() && bd > 0; ++i)
            bd = std::min(bd, inst.dist(centers[i], p));
        if (additive) {
            sum += inst.objective == Objective::k_means ? bd * bd : bd;
            if (sum > prune) return sum;
        } else {
            mx = std::max(mx, bd);
            if (mx > prune) return mx;
        }
    }
    return additive ? sum : mx;
}

}  // namespace detail

// Exhaustive optimal solver over all C(n,k) center subsets in lexicographic
// order; ties broken by the first (lexicographically smallest) subset found.
// Also collects every subset whose cost matches the optimum within tolerance,
// and reports whether they all induce the same partition.
inline ExactSolveResult exact_solve(const Instance& inst, int threads = 1,
                                    std::size_t opt_sets_cap = 4096) {
    const std::uint64_t total = binomial_capped(inst.n, inst.k, kOracleGuard + 1);
    if (total > kOracleGuard)
        throw std::runtime_error("exact_solve: C(n,k) exceeds guard (" + std::to_string(total) +
                                 " > " + std::to_string(kOracleGuard) + ")");

    // Pass 1: minimum cost and the lex-least argmin.
    struct ChunkBest {
        double cost = kInf;
        std::vector<int> centers;
    };
    const int nthreads = std::max(1, std::min<int>(threads, 64));
    std::vector<ChunkBest> chunk(nthreads);
    auto scan = [&](int t, auto&& fn) {
        const std::uint64_t lo = total * t / nthreads;
        const std::uint64_t hi = total * (t + 1) / nthreads;
        if (lo >= hi) return;
        std::vector<int> comb = unrank_combination(lo, inst.n, inst.k);
        for (std::uint64_t r = lo; r < hi; ++r) {
            fn(comb);
            if (r + 1 < hi) next_combination(comb, inst.n);
        }
    };
    {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&, t] {
                scan(t, [&](const std::vector<int>& comb) {
                    const double c = detail::subset_cost(inst, comb, chunk[t].cost);
                    if (c < chunk[t].cost) {
                        chunk[t].cost = c;
                        chunk[t].centers = comb;
                    }
                });
            });
        for (auto& th : pool) th.join();
    }
    ExactSolveResult res;
    res.subsets = total;
    double best = kInf;
    std::vector<int> best_centers;
    for (const auto& cb : chunk)
        if (cb.cost < best) {
            best = cb.cost;
            best_centers = cb.centers;
        }

    // Pass 2: collect all subsets within tolerance of the optimum.
    std::vector<std::vector<std::vector<int>>> collected(nthreads);
    {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&, t] {
                scan(t, [&](const std::vector<int>& comb) {
                    const double c = detail::subset_cost(inst, comb, best + cmp_tol(best, best));
                    if (approx_eq(c, best) && collected[t].size() <= opt_sets_cap)
                        collected[t].push_back(comb);
                });
            });
        for (auto& th : pool) th.join();
    }
    for (auto& v : collected)
        for (auto& s : v) {
            if (res.optimal_center_sets.size() >= opt_sets_cap) {
                res.optimal_sets_truncated = true;
                break;
            }
            res.optimal_center_sets.push_back(std::move(s));
        }

    res.best = voronoi(inst, best_centers);
    const auto canon = canonical_partition(res.best);
    for (const auto& s : res.optimal_center_sets) {
        if (s == best_centers) continue;
        if (canonical_partition(voronoi(inst, s)) != canon) {
            res.unique_partition = false;
            break;
        }
    }
    if (res.optimal_sets_truncated) res.unique_partition = false;
    return res;
}

// Sorted, deduplicated list of all pairwise distances; the optimal k-center
// radius is always one of them.
inline std::vector<double> opt_radius_candidates(const Instance& inst) {
    std::vector<double> vals(inst.dist.v);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

}  // namespace stablecluster
