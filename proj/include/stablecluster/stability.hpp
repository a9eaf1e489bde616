#pragma once

#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "stablecluster/digraph.hpp"
#include "stablecluster/kcenter_asym.hpp"
#include "stablecluster/objectives.hpp"

namespace stablecluster {

enum class CapRule { min_cap, scale };

struct PerturbException {
    int source = -1;
    std::vector<int> targets;
    CapRule rule = CapRule::min_cap;
};

// A structured alpha-perturbation: a scaled (or identity) baseline plus
// per-pair exception rules, followed by metric completion. Always satisfies
// d <= completed <= alpha*d pointwise and the triangle inequality.
struct PerturbationSpec {
    double alpha = 1.0;
    bool scaled_baseline = true;  // false: baseline keeps d (single-pair scaling family)
    std::vector<PerturbException> exceptions;
    double r_star = 0;
    DistMatrix completed;
};

namespace detail {

inline void verify_perturbation(const Instance& inst, const PerturbationSpec& spec) {
    for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j) {
            const double d = inst.dist(i, j);
            const double c = spec.completed(i, j);
            if (!approx_leq(d, c) || !approx_leq(c, spec.alpha * d))
                throw std::logic_error(
                    "perturbation invariant violated at pair (" + std::to_string(i) + "," +
                    std::to_string(j) + "): d=" + std::to_string(d) + " d'=" + std::to_string(c));
        }
    if (auto w = find_triangle_violation(spec.completed))
        throw std::logic_error("perturbation completion is not metric (witness " +
                               std::to_string(w->u) + "," + std::to_string(w->v) + "," +
                               std::to_string(w->w) + ")");
}

inline double kcenter_r_star(const Instance& inst) {
    const Objective o = inst.symmetric ? Objective::k_center : Objective::asym_k_center;
    Instance tmp = inst;
    tmp.objective = o;
    return exact_solve(tmp).best.cost;
}

}  // namespace detail

// Builds d'' with every pair scaled by alpha except exception pairs (s,t):
// min_cap sets d''(s,t) = min(alpha*r*, alpha*d(s,t)) where d(s,t) <= alpha*r*
// (outside that range the cap is void and the pair stays at alpha*d), then
// takes the metric completion. The optimal k-center cost of the result is
// alpha*r*.
inline PerturbationSpec build_capped_perturbation(const Instance& inst, double alpha,
                                                  const std::vector<PerturbException>& exceptions,
                                                  std::optional<double> r_star = std::nullopt) {
    if (alpha < 1.0) throw std::invalid_argument("build_capped_perturbation: alpha must be >= 1");
    PerturbationSpec spec;
    spec.alpha = alpha;
    spec.scaled_baseline = true;
    spec.exceptions = exceptions;
    spec.r_star = r_star ? *r_star : detail::kcenter_r_star(inst);

    DistMatrix m(inst.n);
    for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j) m(i, j) = alpha * inst.dist(i, j);
    for (const auto& ex : exceptions) {
        if (ex.source < 0 || ex.source >= inst.n)
            throw std::invalid_argument("perturbation exception: bad source");
        for (int t : ex.targets) {
            if (t < 0 || t >= inst.n)
                throw std::invalid_argument("perturbation exception: bad target");
            const double d = inst.dist(ex.source, t);
            if (ex.rule == CapRule::min_cap && approx_leq(d, alpha * spec.r_star))
                m(ex.source, t) = std::min(alpha * spec.r_star, alpha * d);
            else
                m(ex.source, t) = alpha * d;
        }
    }
    spec.completed = metric_completion(std::move(m));
    detail::verify_perturbation(inst, spec);
    return spec;
}

// Single-pair scaling family: selected pairs move to alpha*d, everything else
// keeps d, then metric completion.
inline PerturbationSpec build_pair_scaled_perturbation(
    const Instance& inst, double alpha, const std::vector<std::pair<int, int>>& pairs,
    std::optional<double> r_star = std::nullopt) {
    if (alpha < 1.0)
        throw std::invalid_argument("build_pair_scaled_perturbation: alpha must be >= 1");
    PerturbationSpec spec;
    spec.alpha = alpha;
    spec.scaled_baseline = false;
    spec.r_star = r_star ? *r_star : detail::kcenter_r_star(inst);

    DistMatrix m = inst.dist;
    std::map<int, std::vector<int>> grouped;
    for (auto [s, t] : pairs) {
        m(s, t) = alpha * inst.dist(s, t);
        grouped[s].push_back(t);
    }
    for (auto& [s, ts] : grouped) spec.exceptions.push_back({s, ts, CapRule::scale});
    spec.completed = metric_completion(std::move(m));
    detail::verify_perturbation(inst, spec);
    return spec;
}

// Instance carrying the perturbed distances. Capped exceptions are directed,
// so the completion may be asymmetric even for symmetric inputs; costs are
// evaluated center-to-point either way, which is the direction the caps act
// on.
inline Instance perturbed_instance(const Instance& inst, const PerturbationSpec& spec) {
    Instance out = inst;
    out.dist = spec.completed;
    out.dim = 0;
    out.coords.clear();
    out.symmetric = true;
    for (int i = 0; i < out.n && out.symmetric; ++i)
        for (int j = i + 1; j < out.n; ++j)
            if (out.dist(i, j) != out.dist(j, i)) {
                out.symmetric = false;
                break;
            }
    if (!out.symmetric &&
        (inst.objective == Objective::k_center || inst.objective == Objective::asym_k_center))
        out.objective = Objective::asym_k_center;
    return out;
}

enum class ProbeVerdict { not_refuted, refuted, degenerate };

inline const char* verdict_name(ProbeVerdict v) {
    switch (v) {
        case ProbeVerdict::not_refuted: return "not-refuted";
        case ProbeVerdict::refuted: return "refuted";
        case ProbeVerdict::degenerate: return "degenerate";
    }
    return "?";
}

struct ProbeResult {
    ProbeVerdict verdict = ProbeVerdict::not_refuted;
    std::optional<PerturbationSpec> witness;
};

namespace detail {

inline std::vector<std::vector<std::vector<int>>> optimal_partitions(const Instance& inst,
                                                                     const ExactSolveResult& r) {
    std::vector<std::vector<std::vector<int>>> parts;
    std::set<std::vector<std::vector<int>>> seen;
    for (const auto& s : r.optimal_center_sets) {
        auto p = canonical_partition(voronoi(inst, s));
        if (seen.insert(p).second) parts.push_back(std::move(p));
    }
    if (parts.empty()) parts.push_back(canonical_partition(r.best));
    return parts;
}

inline bool partition_contains(const std::vector<std::vector<int>>& partition,
                               const std::vector<int>& cluster_sorted) {
    for (const auto& c : partition)
        if (c == cluster_sorted) return true;
    return false;
}

inline bool partition_has_eps_close(const std::vector<std::vector<int>>& partition,
                                    const std::vector<int>& cluster_sorted, double eps, int n) {
    for (const auto& c : partition)
        if (clusters_eps_close(c, cluster_sorted, eps, n)) return true;
    return false;
}

}  // namespace detail

// Re-check a refutation witness against the exact oracle. For eps < 0 (plain
// LPR) a witness refutes when some optimal clustering under the perturbation
// lacks the cluster verbatim -- tied optima count, which is how the paper's
// perturbation arguments conclude ("we can replace c_i with v in the set of
// optimal centers"). For eps >= 0 a witness refutes only when every optimal
// clustering has no cluster eps-close to it.
inline bool witness_refutes(const Instance& inst, const PerturbationSpec& spec,
                            const std::vector<int>& cluster_sorted, double eps = -1.0) {
    const Instance per = perturbed_instance(inst, spec);
    const auto solved = exact_solve(per);
    const auto parts = detail::optimal_partitions(per, solved);
    if (eps < 0) {
        for (const auto& p : parts)
            if (!detail::partition_contains(p, cluster_sorted)) return true;
        return false;
    }
    for (const auto& p : parts)
        if (detail::partition_has_eps_close(p, cluster_sorted, eps, inst.n)) return false;
    return true;
}

// Sound refutation probe for (alpha[,eps])-LPR over the structured
// perturbation family used by the proofs: capped exceptions (v, T) with T a
// single optimal cluster, a union of two clusters, or a cluster plus one
// point, plus (eps probes only) the single-pair boundary-point scalings.
// "not_refuted" is NOT a certification; the family is sound but incomplete.
//
// eps < 0 selects exact cluster containment (plain LPR), where a witness
// refutes as soon as some optimal clustering under it lacks the cluster;
// eps >= 0 selects eps-closeness, where a witness refutes only when every
// optimal clustering lacks an eps-close cluster. Clusters absent from some
// optimum of the unperturbed instance are reported degenerate, not probed.
inline std::vector<ProbeResult> probe_all_lpr(const Instance& inst, double alpha,
                                              double eps = -1.0,
                                              const ExactSolveResult* base_in = nullptr) {
    ExactSolveResult base_local;
    const ExactSolveResult* base = base_in;
    if (!base) {
        base_local = exact_solve(inst);
        base = &base_local;
    }
    const double r_star = inst.objective == Objective::k_center ||
                                  inst.objective == Objective::asym_k_center
                              ? base->best.cost
                              : detail::kcenter_r_star(inst);

    auto clusters = clusters_of(base->best);
    for (auto& c : clusters) std::sort(c.begin(), c.end());
    const int k = int(clusters.size());
    const int n = inst.n;

    // Under a non-unique base optimum, only clusters present in every optimal
    // partition have a well-defined LPR question; the rest are degenerate.
    std::vector<bool> evaluable(k, true);
    if (!base->unique_partition) {
        const auto parts = detail::optimal_partitions(inst, *base);
        for (int i = 0; i < k; ++i)
            for (const auto& p : parts)
                if (!detail::partition_contains(p, clusters[i])) {
                    evaluable[i] = false;
                    break;
                }
    }

    std::vector<ProbeResult> out(k);
    for (int i = 0; i < k; ++i)
        if (!evaluable[i]) out[i].verdict = ProbeVerdict::degenerate;

    std::vector<bool> resolved(k, false);
    for (int i = 0; i < k; ++i) resolved[i] = !evaluable[i];

    auto all_resolved = [&] {
        for (int i = 0; i < k; ++i)
            if (!resolved[i]) return false;
        return true;
    };

    auto consider = [&](const PerturbationSpec& spec) {
        const Instance per = perturbed_instance(inst, spec);
        const auto solved = exact_solve(per);
        const auto parts = detail::optimal_partitions(per, solved);
        for (int i = 0; i < k; ++i) {
            if (resolved[i]) continue;
            bool refuted;
            if (eps < 0) {
                // Some optimal clustering lacking the cluster refutes; the
                // paper's arguments swap centers into tied optima.
                refuted = false;
                for (const auto& p : parts)
                    if (!detail::partition_contains(p, clusters[i])) {
                        refuted = true;
                        break;
                    }
            } else {
                refuted = true;
                for (const auto& p : parts)
                    if (detail::partition_has_eps_close(p, clusters[i], eps, n)) {
                        refuted = false;
                        break;
                    }
            }
            if (refuted) {
                out[i].verdict = ProbeVerdict::refuted;
                out[i].witness = spec;
                resolved[i] = true;
            }
        }
    };

    // Capped family, enumerated clusters-then-candidate-centers; effective
    // exception sets are deduplicated per source since pairs beyond alpha*r*
    // keep the baseline value.
    std::vector<std::set<std::vector<int>>> seen(n);
    auto effective = [&](int v, const std::vector<int>& targets) {
        std::vector<int> e;
        for (int t : targets)
            if (approx_leq(inst.dist(v, t), alpha * r_star)) e.push_back(t);
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
        return e;
    };
    auto try_witness = [&](int v, const std::vector<int>& targets) {
        if (all_resolved()) return;
        auto e = effective(v, targets);
        if (e.empty() || !seen[v].insert(e).second) return;
        consider(build_capped_perturbation(inst, alpha, {{v, e, CapRule::min_cap}}, r_star));
    };

    for (int j = 0; j < k && !all_resolved(); ++j) {
        for (int v = 0; v < n && !all_resolved(); ++v) {
            try_witness(v, clusters[j]);
            for (int l = j + 1; l < k; ++l) {
                std::vector<int> both = clusters[j];
                both.insert(both.end(), clusters[l].begin(), clusters[l].end());
                try_witness(v, both);
            }
            for (int w = 0; w < n; ++w) {
                if (std::binary_search(clusters[j].begin(), clusters[j].end(), w)) continue;
                if (!approx_leq(inst.dist(v, w), alpha * r_star)) continue;
                std::vector<int> plus = clusters[j];
                plus.push_back(w);
                try_witness(v, plus);
            }
        }
    }

    // Boundary-point scaling family (eps probes): for clusters x and rival
    // centers c_j, scale (c_x, s) for the points s of C_x that c_j can hold.
    if (eps >= 0 && !all_resolved()) {
        for (int x = 0; x < k && !all_resolved(); ++x) {
            const int cx = base->best.centers[x];
            for (int j = 0; j < k && !all_resolved(); ++j) {
                if (j == x) continue;
                const int cj = base->best.centers[j];
                std::vector<std::pair<int, int>> pairs;
                for (int s : clusters[x]) {
                    const double bound = std::min(r_star, alpha * inst.dist(cx, s));
                    if (approx_leq(inst.dist(cj, s), bound)) pairs.push_back({cx, s});
                }
                if (pairs.empty()) continue;
                consider(build_pair_scaled_perturbation(inst, alpha, pairs, r_star));
            }
        }
    }

    return out;
}

inline ProbeResult probe_lpr(const Instance& inst, double alpha, int cluster_index,
                             const ExactSolveResult* base = nullptr) {
    auto all = probe_all_lpr(inst, alpha, -1.0, base);
    return all.at(cluster_index);
}

inline ProbeResult probe_lpr_eps(const Instance& inst, double alpha, double eps, int cluster_index,
                                 const ExactSolveResult* base = nullptr) {
    if (eps < 0) throw std::invalid_argument("probe_lpr_eps: eps must be >= 0");
    auto all = probe_all_lpr(inst, alpha, eps, base);
    return all.at(cluster_index);
}

struct CCCResult {
    std::vector<std::pair<int, int>> ccc;            // (i, j): c_i captures C_j
    std::vector<std::tuple<int, int, int>> ccc2;     // (i, j, l): discounting c_l
};

// Direct evaluation of first/second-order cluster-capturing centers: c_i is a
// CCC for C_j iff for all but eps*n points v of C_j, d(c_i,v) <= r* and
// d(c_i,v) < d(c_x,v) for every other center x (CCC2: all but one discounted
// x).
inline CCCResult detect_ccc(const Instance& inst, const Clustering& opt, double eps,
                            std::optional<double> r_star = std::nullopt) {
    const double rs = r_star ? *r_star : clustering_radius(inst, opt);
    const int k = opt.k();
    auto clusters = clusters_of(opt);
    CCCResult res;
    auto good_count = [&](int i, int j, int discount) {
        int good = 0;
        for (int v : clusters[j]) {
            const double div = inst.dist(opt.centers[i], v);
            if (!approx_leq(div, rs)) continue;
            bool beats = true;
            for (int x = 0; x < k && beats; ++x) {
                if (x == i || x == j || x == discount) continue;
                if (!(div < inst.dist(opt.centers[x], v))) beats = false;
            }
            if (beats) ++good;
        }
        return good;
    };
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            const int sz = int(clusters[j].size());
            if (sz - good_count(i, j, -1) <= eps * inst.n) res.ccc.push_back({i, j});
            for (int l = 0; l < k; ++l) {
                if (l == i || l == j) continue;
                if (sz - good_count(i, j, l) <= eps * inst.n) res.ccc2.push_back({i, j, l});
            }
        }
    return res;
}

// (beta, gamma)-hits: every point of S has at least beta points of C within
// gamma*r* (center-to-point for asymmetric instances).
inline bool check_hits(const Instance& inst, const std::vector<int>& C, int beta, double gamma,
                       double r_star) {
    if (beta > int(C.size())) return inst.n == 0;
    for (int s = 0; s < inst.n; ++s) {
        int hits = 0;
        for (int c : C)
            if (approx_leq(inst.dist(c, s), gamma * r_star)) ++hits;
        if (hits < beta) return false;
    }
    return true;
}

struct UniformApproxMode {
    bool exhaustive = true;
    int samples = 0;
    std::uint64_t seed = 0;
};

struct UniformApproxReport {
    bool holds = true;
    std::uint64_t tested = 0;
    std::optional<std::vector<int>> violating_set;
};

// The uniform-approximation condition: for the sets Y tested,
//   sum_{v in VorX(X\Y) u VorY(Y\X)} w(d(v,X))
//     <= sum_{v in VorY(Y\X)} min(w(d(v,X)), w(alpha d(v,Y)))
//        + sum_{v in VorX(X\Y)} w(alpha d(v,Y))
// with w = identity for k-median and squaring for k-means. Holding for every
// Y implies the clustering of X contains all alpha-LPR clusters.
inline UniformApproxReport check_uniform_approx_condition(const Instance& inst,
                                                          const std::vector<int>& X, double alpha,
                                                          const UniformApproxMode& mode = {}) {
    if (inst.objective != Objective::k_median && inst.objective != Objective::k_means)
        throw std::invalid_argument("uniform-approx check: objective must be k-median or k-means");
    const int n = inst.n, k = inst.k;
    if (int(X.size()) != k) throw std::invalid_argument("uniform-approx check: |X| != k");
    if (mode.exhaustive && binomial_capped(n, k, 1'000'001) > 1'000'000)
        throw std::runtime_error("uniform-approx check: C(n,k) exceeds exhaustive guard");

    const auto w = [&](double d) {
        return inst.objective == Objective::k_means ? d * d : d;
    };
    const Clustering cx = voronoi(inst, X);
    std::vector<double> dX(n);
    for (int p = 0; p < n; ++p) dX[p] = inst.dist(X[cx.assign[p]], p);
    std::vector<char> in_x(n, 0);
    for (int c : X) in_x[c] = 1;

    UniformApproxReport rep;
    auto test_one = [&](const std::vector<int>& Y) {
        ++rep.tested;
        std::vector<char> in_y(n, 0);
        for (int c : Y) in_y[c] = 1;
        const Clustering cy = voronoi(inst, Y);
        double lhs = 0, rhs = 0;
        for (int p = 0; p < n; ++p) {
            const double dY = inst.dist(Y[cy.assign[p]], p);
            const bool x_only = !in_y[X[cx.assign[p]]];  // Vor_X(X \ Y)
            const bool y_only = !in_x[Y[cy.assign[p]]];  // Vor_Y(Y \ X)
            if (x_only || y_only) lhs += w(dX[p]);
            if (y_only) rhs += std::min(w(dX[p]), w(alpha * dY));
            if (x_only) rhs += w(alpha * dY);
        }
        if (!approx_leq(lhs, rhs)) {
            rep.holds = false;
            rep.violating_set = Y;
            return false;
        }
        return true;
    };

    if (mode.exhaustive) {
        std::vector<int> Y(k);
        for (int i = 0; i < k; ++i) Y[i] = i;
        do {
            if (!test_one(Y)) return rep;
        } while (next_combination(Y, n));
    } else {
        SplitMix64 rng(mode.seed);
        for (int s = 0; s < mode.samples; ++s) {
            std::vector<int> pool(n);
            for (int i = 0; i < n; ++i) pool[i] = i;
            for (int i = 0; i < k; ++i)
                std::swap(pool[i], pool[i + int(rng.below(std::uint64_t(n - i)))]);
            std::vector<int> Y(pool.begin(), pool.begin() + k);
            std::sort(Y.begin(), Y.end());
            if (!test_one(Y)) return rep;
        }
    }
    return rep;
}

struct ClusterReport {
    bool ccv_center = false;
    bool ccv_proximity = false;
    bool center_separation = false;
    std::vector<int> ccc_witnesses;                   // centers capturing this cluster
    std::vector<std::pair<int, int>> ccc2_witnesses;  // (center, discounted)
    ProbeVerdict lpr = ProbeVerdict::not_refuted;
    std::optional<PerturbationSpec> lpr_witness;
    ProbeVerdict slpr = ProbeVerdict::not_refuted;
    std::optional<PerturbationSpec> slpr_witness;
};

struct StabilityReport {
    bool degenerate = false;  // base optimum has multiple partitions
    double r_star = 0;
    Clustering opt;
    std::vector<ClusterReport> clusters;
};

// Full per-cluster stability report: CCV flags and detectors at r*, CCC/CCC2
// witnesses, and LPR/SLPR refutation probes at the given alpha (eps >= 0
// switches the probes to eps-closeness).
inline StabilityReport stability_report(const Instance& inst, double alpha, double eps = -1.0) {
    StabilityReport rep;
    const auto base = exact_solve(inst);
    rep.degenerate = !base.unique_partition;
    rep.opt = base.best;
    rep.r_star = inst.objective == Objective::k_center ||
                         inst.objective == Objective::asym_k_center
                     ? base.best.cost
                     : detail::kcenter_r_star(inst);

    const int k = rep.opt.k();
    rep.clusters.resize(k);
    auto clusters = clusters_of(rep.opt);

    const ThresholdDigraph g = threshold_digraph(inst, rep.r_star);
    HopMetric hm(inst, g);
    const Bitset ccvs = ccv_set(g);
    for (int i = 0; i < k; ++i) {
        rep.clusters[i].ccv_center = ccvs.test(rep.opt.centers[i]);
        rep.clusters[i].ccv_proximity = satisfies_ccv_proximity(g, rep.opt.centers[i], hm, ccvs);
        rep.clusters[i].center_separation =
            satisfies_center_separation(inst, rep.opt, i, rep.r_star);
    }
    const auto ccc = detect_ccc(inst, rep.opt, std::max(eps, 0.0), rep.r_star);
    for (auto [i, j] : ccc.ccc) rep.clusters[j].ccc_witnesses.push_back(i);
    for (auto [i, j, l] : ccc.ccc2) rep.clusters[j].ccc2_witnesses.push_back({i, l});

    const auto probes = probe_all_lpr(inst, alpha, eps, &base);
    for (int i = 0; i < k; ++i) {
        rep.clusters[i].lpr = probes[i].verdict;
        rep.clusters[i].lpr_witness = probes[i].witness;
    }

    // SLPR: a cluster and all clusters with a point within r* of it must be
    // LPR; the verdict aggregates over those neighbors.
    for (int i = 0; i < k; ++i) {
        ProbeVerdict v = probes[i].verdict;
        std::optional<PerturbationSpec> w = probes[i].witness;
        for (int j = 0; j < k; ++j) {
            if (j == i) continue;
            bool neighbor = false;
            for (int u : clusters[i]) {
                for (int t : clusters[j])
                    if (inst.dist(u, t) <= rep.r_star) {
                        neighbor = true;
                        break;
                    }
                if (neighbor) break;
            }
            if (!neighbor) continue;
            if (probes[j].verdict == ProbeVerdict::refuted && v != ProbeVerdict::refuted) {
                v = ProbeVerdict::refuted;
                w = probes[j].witness;
            } else if (probes[j].verdict == ProbeVerdict::degenerate &&
                       v == ProbeVerdict::not_refuted) {
                v = ProbeVerdict::degenerate;
            }
        }
        rep.clusters[i].slpr = v;
        rep.clusters[i].slpr_witness = v == ProbeVerdict::refuted ? w : std::nullopt;
    }
    return rep;
}

}  // namespace stablecluster
