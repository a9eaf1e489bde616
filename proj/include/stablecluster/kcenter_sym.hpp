#pragma once

#include <optional>
#include <vector>

#include "stablecluster/objectives.hpp"

namespace stablecluster {

struct KCenterResult {
    Clustering clustering;
    double radius = 0;                  // max distance to assigned center
    std::optional<double> r_star;       // exact optimal radius when the oracle ran
    bool condition1_applied = false;
    bool condition2_applied = false;
    double r_used = 0;                  // threshold radius the solver ran at
    bool feasible = true;
    int phase2_rounds = 0;
};

// Farthest-first traversal (Gonzalez). First center is a seeded choice, each
// next center maximizes distance to the chosen set, ties to the lowest index.
// Works on matrices containing +inf (disconnected completions).
inline KCenterResult greedy_2approx(const Instance& inst, std::uint64_t seed = 0) {
    if (!inst.symmetric) throw std::invalid_argument("greedy_2approx: instance must be symmetric");
    const int n = inst.n, k = inst.k;
    SplitMix64 rng(seed);
    std::vector<int> centers;
    std::vector<double> md(n, kInf);
    const int first = int(rng.below(std::uint64_t(n)));
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
    KCenterResult res;
    res.clustering = voronoi(inst, centers);
    res.radius = clustering_radius(inst, res.clustering);
    res.clustering.cost = res.radius;
    return res;
}

struct CompletionResult {
    Instance instance;               // completed distances; +inf where disconnected
    long long disconnected_pairs = 0;
    std::vector<int> isolated_points;  // no neighbor within r besides self
};

// Condition (1) preprocessing: drop all edges of length > r, then take the
// metric completion of what remains. Disconnected pairs stay +inf and are
// reported; downstream feasibility checks reject radii where that prevents a
// <= 2r cover.
inline CompletionResult condition1_preprocess(const Instance& inst, double r) {
    if (!inst.symmetric)
        throw std::invalid_argument("condition1_preprocess: instance must be symmetric");
    if (r < 0) throw std::invalid_argument("condition1_preprocess: r must be >= 0");
    CompletionResult out;
    DistMatrix m(inst.n, kInf);
    for (int i = 0; i < inst.n; ++i) {
        bool has_neighbor = false;
        for (int j = 0; j < inst.n; ++j) {
            const double d = inst.dist(i, j);
            if (d <= r) {
                m(i, j) = d;
                if (j != i) has_neighbor = true;
            }
        }
        m(i, i) = 0;
        if (!has_neighbor && inst.n > 1) out.isolated_points.push_back(i);
    }
    m = metric_completion(std::move(m));
    for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j)
            if (std::isinf(m(i, j))) ++out.disconnected_pairs;
    out.instance = inst;
    out.instance.dist = std::move(m);
    out.instance.dim = 0;
    out.instance.coords.clear();
    return out;
}

// Direct n^3 scan of condition (1): every pair at distance <= 2r has a
// midpoint w with both legs <= r.
inline bool condition1_holds(const Instance& inst, double r) {
    for (int u = 0; u < inst.n; ++u)
        for (int v = 0; v < inst.n; ++v) {
            if (inst.dist(u, v) > 2 * r) continue;
            bool mid = false;
            for (int w = 0; w < inst.n && !mid; ++w)
                if (inst.dist(u, w) <= r && inst.dist(w, v) <= r) mid = true;
            if (!mid) return false;
        }
    return true;
}

// Condition (2) post-processing: while some point v has all points of two or
// more output clusters within the achieved radius, merge the lowest-indexed
// qualifying pair into one cluster centered at v (v joins it). Never
// increases the radius; idempotent at the fixpoint.
inline KCenterResult condition2_merge(const Instance& inst, const KCenterResult& input) {
    KCenterResult res = input;
    const double r_hat = input.radius;
    auto& c = res.clustering;

    bool changed = true;
    while (changed) {
        changed = false;
        auto groups = clusters_of(c);
        for (int v = 0; v < inst.n && !changed; ++v) {
            std::vector<int> qual;
            for (int g = 0; g < int(groups.size()); ++g) {
                bool all_in = true;
                for (int p : groups[g])
                    if (inst.dist(v, p) > r_hat) {
                        all_in = false;
                        break;
                    }
                if (all_in) qual.push_back(g);
            }
            if (int(qual.size()) < 2) continue;
            int a = qual[0], b = qual[1];
            // If v currently centers a cluster, that cluster is always
            // qualifying; merge it so v is not stolen from it.
            for (int g = 0; g < int(groups.size()); ++g)
                if (c.centers[g] == v) {
                    a = std::min(g, qual[0] == g ? qual[1] : qual[0]);
                    b = std::max(g, qual[0] == g ? qual[1] : qual[0]);
                    break;
                }
            // New center list: slot a becomes v, slot b is removed.
            std::vector<int> centers;
            for (int g = 0; g < int(groups.size()); ++g) {
                if (g == b) continue;
                centers.push_back(g == a ? v : c.centers[g]);
            }
            std::vector<int> assign(inst.n);
            for (int p = 0; p < inst.n; ++p) {
                int g = c.assign[p];
                if (p == v || g == a || g == b) {
                    assign[p] = a;
                } else {
                    assign[p] = g > b ? g - 1 : g;
                }
            }
            c.centers = std::move(centers);
            c.assign = std::move(assign);
            changed = true;
        }
    }
    c.cost = clustering_cost(inst, c.centers, c.assign);
    res.radius = clustering_radius(inst, c);
    res.condition2_applied = true;
    return res;
}

// Robust symmetric k-center: binary search over the O(n^2) radius candidates
// for the least r where farthest-first on the condition-(1) completion covers
// within 2r, then apply the condition-(2) merge. Any 2-approximation run this
// way contains every 2-LPR and (3,eps)-SLPR optimal cluster.
inline KCenterResult solve_robust_kcenter(const Instance& inst, std::uint64_t seed = 0,
                                          std::optional<double> known_r_star = std::nullopt) {
    if (!inst.symmetric)
        throw std::invalid_argument("solve_robust_kcenter: instance must be symmetric");
    const auto cands = opt_radius_candidates(inst);

    auto attempt = [&](double r) {
        CompletionResult pre = condition1_preprocess(inst, r);
        KCenterResult g = greedy_2approx(pre.instance, seed);
        const bool ok = g.radius <= 2 * r;
        return std::pair<bool, std::pair<CompletionResult, KCenterResult>>(
            ok, {std::move(pre), std::move(g)});
    };

    // Feasibility holds for every r >= r*, so bisection lands at a feasible
    // candidate <= r*.
    int lo = -1, hi = int(cands.size()) - 1;
    if (!attempt(cands[hi]).first)
        throw std::logic_error("solve_robust_kcenter: max radius candidate infeasible");
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (attempt(cands[mid]).first)
            hi = mid;
        else
            lo = mid;
    }
    const double r = cands[hi];
    auto parts = attempt(r).second;
    auto& [pre, g] = parts;

    KCenterResult merged = condition2_merge(pre.instance, g);
    KCenterResult res;
    res.clustering = merged.clustering;
    res.clustering.cost = clustering_cost(inst, res.clustering.centers, res.clustering.assign);
    res.radius = clustering_radius(inst, res.clustering);
    res.r_used = r;
    res.condition1_applied = true;
    res.condition2_applied = true;
    res.feasible = true;
    if (known_r_star) {
        res.r_star = known_r_star;
    } else if (binomial_capped(inst.n, inst.k, kOracleGuard + 1) <= kOracleGuard) {
        res.r_star = exact_solve(with_objective(inst, Objective::k_center)).best.cost;
    }
    return res;
}

}  // namespace stablecluster
