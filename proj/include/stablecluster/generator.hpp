#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "stablecluster/stability.hpp"

namespace stablecluster {

enum class Asymmetry { none, directed_skew };

struct GenSpec {
    std::uint64_t seed = 0;
    int k = 0;                   // stable cluster count
    std::vector<int> sizes;      // per stable cluster
    double intra_radius = 1.0;   // r: center-to-point distance within a cluster
    double separation = 10.0;    // cross-cluster distances > separation * r
    Asymmetry asymmetry = Asymmetry::none;
    double skew = 3.0;           // intra-cluster return distances inflated by this factor
    int noise = 0;               // unstable points (>= 2, or 0)
    Objective objective = Objective::k_center;
    double alpha = 2.0;          // stability level to certify
    double eps = 0.0;            // > 0 certifies (alpha,eps)-LPR instead
    bool certify = true;         // probe-certify when the oracle is feasible
};

struct PlantedInstance {
    Instance instance;
    Clustering planted;
    double r_star = 0;
    std::vector<bool> stable_flags;          // per planted cluster
    std::vector<bool> center_ambiguous;      // cluster's center varies across tied optima
    bool certified = false;                  // oracle + probes actually ran
    bool degenerate = false;                 // base optimum has multiple partitions
};

namespace detail {

// Stable symmetric clusters are planar clumps: the planted center plus two
// antipodal extremes at exactly r (so the planted center is the unique
// 1-center of its clump and r* = r exactly on the grid), with remaining
// points inside radius 0.9r.
inline void place_symmetric_cluster(std::vector<double>& coords, SplitMix64& rng, double cx,
                                    double cy, int size, double r) {
    auto push = [&](double x, double y) {
        coords.push_back(x);
        coords.push_back(y);
    };
    push(cx, cy);
    if (size >= 2) push(cx + r, cy);
    if (size >= 3) push(cx - r, cy);
    const long long m = (long long)std::floor(0.9 * r * 1024.0);
    for (int i = 3; i < size; ++i) {
        long long gx, gy;
        do {
            gx = (long long)rng.below(2 * m + 1) - m;
            gy = (long long)rng.below(2 * m + 1) - m;
        } while (gx * gx + gy * gy > m * m);
        push(cx + double(gx) / 1024.0, cy + double(gy) / 1024.0);
    }
}

}  // namespace detail

// Deterministic planted instance, optionally with an ambiguous noise clump.
//
// Symmetric instances are euclidean clumps spread along a line (matrix mode
// when a noise clump is present, since the clump is a pairwise-equidistant
// simplex). Asymmetric instances are hub-and-spoke matrices: d(center, v) =
// a_v <= r, d(v, center) = skew * a_v, other intra pairs route through the
// hub, cross-cluster pairs are flat. All generated values are exact on the
// 2^-10 grid so files round-trip bit-identically.
//
// The noise clump is `noise` points pairwise at 15/16 r: it needs exactly one
// center but every clump point is an equally good choice, so tied optimal
// center sets disagree on it (center_ambiguous) while the partition stays
// unique and the stable clusters stay probe-certifiable.
//
// When the oracle is feasible the planted optimum is verified exactly and
// each stable cluster is probe-certified at the advertised alpha before the
// generator reports success; a refuted probe escalates the separation and
// retries.
inline PlantedInstance gen_planted_impl(const GenSpec& spec, int noise) {
    if (spec.k <= 0 || int(spec.sizes.size()) != spec.k)
        throw std::invalid_argument("gen: sizes must list one count per stable cluster");
    for (int s : spec.sizes)
        if (s < 1) throw std::invalid_argument("gen: cluster sizes must be >= 1");
    if (spec.separation <= 2) throw std::invalid_argument("gen: separation must exceed 2");
    if (spec.asymmetry == Asymmetry::directed_skew && spec.skew < 1)
        throw std::invalid_argument("gen: skew must be >= 1");
    if (noise != 0 && noise < 2)
        throw std::invalid_argument("gen: a noise clump needs at least 2 points");
    const int n_stable = std::accumulate(spec.sizes.begin(), spec.sizes.end(), 0);
    const int n_total = n_stable + noise;
    const int k_total = spec.k + (noise > 0 ? 1 : 0);
    if (spec.eps > 0) {
        for (int s : spec.sizes)
            if (!(s > 2 * spec.eps * n_total))
                throw std::invalid_argument(
                    "gen: cluster sizes must exceed 2*eps*n for the requested eps");
    }

    std::vector<std::string> fail_diag;
    double sep = spec.separation;
    for (int attempt = 0; attempt < 5; ++attempt, sep *= 1.5) {
        if (spec.asymmetry == Asymmetry::directed_skew && sep <= spec.skew + 1)
            sep = spec.skew + 1.5;
        SplitMix64 rng(spec.seed + 0x9e3779b97f4a7c15ULL * std::uint64_t(attempt));
        const double r = spec.intra_radius;
        const double noise_side = snap_to_grid(15.0 * r / 16.0);

        PlantedInstance out;
        Instance& inst = out.instance;
        inst.n = n_total;
        inst.k = k_total;
        inst.objective = spec.objective;
        inst.symmetric = spec.asymmetry == Asymmetry::none;
        if (!inst.symmetric) inst.objective = Objective::asym_k_center;

        std::vector<int> centers;
        std::vector<int> assign(n_total, -1);
        int next = 0;

        if (inst.symmetric) {
            const double dx = snap_up_to_grid((sep + 2.5) * r);
            std::vector<double> coords;
            for (int c = 0; c < spec.k; ++c) {
                centers.push_back(next);
                detail::place_symmetric_cluster(coords, rng, double(c) * dx, 0.0, spec.sizes[c],
                                                r);
                for (int i = 0; i < spec.sizes[c]; ++i) assign[next++] = c;
            }
            inst.dist = DistMatrix(n_total);
            for (int i = 0; i < n_stable; ++i)
                for (int j = 0; j < n_stable; ++j) {
                    const double a = coords[2 * i] - coords[2 * j];
                    const double o = coords[2 * i + 1] - coords[2 * j + 1];
                    inst.dist(i, j) = std::sqrt(a * a + o * o);
                }
            if (noise == 0) {
                inst.dim = 2;
                inst.coords = coords;
            } else {
                // Simplex clump: flat cross distances keep the metric valid
                // far beyond the stable spread.
                const double far = snap_up_to_grid(double(spec.k + 1) * dx);
                centers.push_back(next);
                for (int i = 0; i < noise; ++i) assign[next++] = spec.k;
                for (int i = n_stable; i < n_total; ++i)
                    for (int j = 0; j < n_total; ++j) {
                        if (i == j) continue;
                        const double v = j >= n_stable ? noise_side : far;
                        inst.dist(i, j) = v;
                        inst.dist(j, i) = v;
                    }
            }
        } else {
            const double cross = snap_up_to_grid((sep + 1.0) * r);
            std::vector<double> a(n_total, 0.0);
            std::vector<int> cluster_of(n_total, -1);
            for (int c = 0; c < spec.k; ++c) {
                centers.push_back(next);
                for (int i = 0; i < spec.sizes[c]; ++i) {
                    cluster_of[next] = c;
                    assign[next] = c;
                    if (i == 0) {
                        a[next] = 0.0;
                    } else if (i == spec.sizes[c] - 1) {
                        a[next] = r;  // pins r* = r exactly
                    } else {
                        a[next] = double(513 + rng.below(512)) * r / 1024.0;
                    }
                    ++next;
                }
            }
            if (noise > 0) {
                centers.push_back(next);
                for (int i = 0; i < noise; ++i) {
                    cluster_of[next] = spec.k;
                    assign[next] = spec.k;
                    ++next;
                }
            }
            inst.dist = DistMatrix(n_total);
            for (int i = 0; i < n_total; ++i)
                for (int j = 0; j < n_total; ++j) {
                    if (i == j) {
                        inst.dist(i, j) = 0;
                    } else if (cluster_of[i] != cluster_of[j]) {
                        inst.dist(i, j) = cross;
                    } else if (cluster_of[i] == spec.k) {
                        inst.dist(i, j) = noise_side;  // symmetric simplex block
                    } else {
                        inst.dist(i, j) = spec.skew * a[i] + a[j];
                    }
                }
        }

        out.planted.centers = centers;
        out.planted.assign = assign;
        out.planted.cost = clustering_cost(inst, centers, assign);
        out.r_star = clustering_radius(inst, out.planted);
        out.stable_flags.assign(k_total, true);
        out.center_ambiguous.assign(k_total, false);
        if (noise > 0) out.stable_flags[spec.k] = false;

        validate_instance(inst);

        const bool oracle_ok =
            spec.certify && binomial_capped(inst.n, inst.k, kOracleGuard + 1) <= kOracleGuard;
        if (!oracle_ok) return out;

        const auto base = exact_solve(inst);
        out.degenerate = !base.unique_partition;
        if (!approx_eq(base.best.cost, out.planted.cost)) {
            fail_diag.push_back("attempt " + std::to_string(attempt) + ": oracle cost " +
                                std::to_string(base.best.cost) + " != planted " +
                                std::to_string(out.planted.cost));
            continue;
        }
        {
            const auto parts = detail::optimal_partitions(inst, base);
            const auto planted_canon = canonical_partition(out.planted);
            bool found = false;
            for (const auto& p : parts) found = found || p == planted_canon;
            if (!found) {
                fail_diag.push_back("attempt " + std::to_string(attempt) +
                                    ": planted partition is not an oracle optimum");
                continue;
            }
        }

        // Planted clusters vs the oracle's cluster order.
        auto planted_clusters = clusters_of(out.planted);
        for (auto& c : planted_clusters) std::sort(c.begin(), c.end());

        // Which clusters have several equally good centers across tied optima.
        for (const auto& set : base.optimal_center_sets) {
            const auto vc = voronoi(inst, set);
            auto vcl = clusters_of(vc);
            for (auto& c : vcl) std::sort(c.begin(), c.end());
            for (int pc = 0; pc < k_total; ++pc)
                for (int j = 0; j < int(vcl.size()); ++j)
                    if (vcl[j] == planted_clusters[pc] && vc.centers[j] != centers[pc])
                        out.center_ambiguous[pc] = true;
        }

        const auto probes = probe_all_lpr(inst, spec.alpha, spec.eps > 0 ? spec.eps : -1.0, &base);
        auto oracle_clusters = clusters_of(base.best);
        for (auto& c : oracle_clusters) std::sort(c.begin(), c.end());
        bool stable_ok = true;
        for (int c = 0; c < spec.k && stable_ok; ++c) {
            int match = -1;
            for (int j = 0; j < int(oracle_clusters.size()); ++j)
                if (oracle_clusters[j] == planted_clusters[c]) {
                    match = j;
                    break;
                }
            if (match < 0) {
                fail_diag.push_back("attempt " + std::to_string(attempt) +
                                    ": stable planted cluster missing from the oracle optimum");
                stable_ok = false;
                break;
            }
            out.stable_flags[c] = probes[match].verdict == ProbeVerdict::not_refuted;
            stable_ok = stable_ok && out.stable_flags[c];
        }
        if (!stable_ok) {
            fail_diag.push_back("attempt " + std::to_string(attempt) +
                                ": probe refuted a stable cluster at alpha=" +
                                std::to_string(spec.alpha) + " sep=" + std::to_string(sep));
            continue;
        }
        out.certified = true;
        return out;
    }
    std::string diag;
    for (const auto& d : fail_diag) diag += (diag.empty() ? "" : "; ") + d;
    throw std::runtime_error("gen: could not certify planted instance after retries (" + diag +
                             ")");
}

inline PlantedInstance gen_planted(const GenSpec& spec) { return gen_planted_impl(spec, 0); }

inline PlantedInstance gen_mixed(const GenSpec& spec) {
    if (spec.noise < 0) throw std::invalid_argument("gen_mixed: noise must be non-negative");
    return gen_planted_impl(spec, spec.noise);  // noise == 0 degenerates to gen_planted
}

struct EmbedResult {
    Instance instance;
    int k_prime = 0;
    int added = 0;
};

// Approximation-stability embedding: add ceil(n/eps) new points whose
// distance to everything (including each other) is at least 2*alpha*n*max_d,
// and raise k accordingly. Optimal cost is preserved exactly, and any
// alpha-approximation must open a center on every added point.
inline EmbedResult embed_approx_stable(const Instance& inst, double alpha, double eps) {
    if (!inst.symmetric)
        throw std::invalid_argument("embed_approx_stable: instance must be symmetric");
    if (eps <= 0) throw std::invalid_argument("embed_approx_stable: eps must be positive");
    if (alpha < 1) throw std::invalid_argument("embed_approx_stable: alpha must be >= 1");
    const int m = int(std::ceil(double(inst.n) / eps));
    double max_d = 0;
    for (double v : inst.dist.v) max_d = std::max(max_d, v);
    const double far = snap_up_to_grid(2.0 * alpha * inst.n * std::max(max_d, 1.0));

    EmbedResult out;
    out.added = m;
    out.k_prime = inst.k + m;
    Instance& e = out.instance;
    e.n = inst.n + m;
    e.k = out.k_prime;
    e.symmetric = true;
    e.objective = inst.objective;
    e.dist = DistMatrix(e.n, far);
    for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j) e.dist(i, j) = inst.dist(i, j);
    for (int i = 0; i < e.n; ++i) e.dist(i, i) = 0;
    validate_instance(e);
    return out;
}

}  // namespace stablecluster
