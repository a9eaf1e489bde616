// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here, in code.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <vector>

#include "stablecluster/generator.hpp"
#include "stablecluster/harness.hpp"
#include "stablecluster/kcenter_asym.hpp"
#include "stablecluster/kcenter_sym.hpp"
#include "stablecluster/local_search.hpp"
#include "stablecluster/stability.hpp"

using namespace stablecluster;

namespace {

struct Gate {
    int failures = 0;

    void report(int id, const std::string& name, bool pass, const std::string& detail) {
        std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                    detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
};

Instance random_scaled_euclidean(int n, int k, std::uint64_t seed, double box,
                                 Objective obj = Objective::k_center) {
    SplitMix64 rng(seed);
    Instance inst;
    inst.n = n;
    inst.k = k;
    inst.symmetric = true;
    inst.objective = obj;
    std::vector<double> xs(n), ys(n);
    const std::uint64_t cells = std::uint64_t(box * 1024.0) + 1;
    for (int i = 0; i < n; ++i) {
        xs[i] = double(rng.below(cells)) / 1024.0;
        ys[i] = double(rng.below(cells)) / 1024.0;
    }
    inst.dist = DistMatrix(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double dx = xs[i] - xs[j], dy = ys[i] - ys[j];
            inst.dist(i, j) = std::sqrt(dx * dx + dy * dy);
        }
    return inst;
}

// Witnesses harvested anywhere in this suite, re-verified by criterion 11.
struct HarvestedWitness {
    Instance instance;
    PerturbationSpec spec;
    std::vector<int> cluster;
    double eps;  // < 0: verbatim containment
};
std::vector<HarvestedWitness> g_witnesses;

void harvest(const Instance& inst, const ExactSolveResult& base,
             const std::vector<ProbeResult>& probes, double eps) {
    auto clusters = clusters_of(base.best);
    for (auto& c : clusters) std::sort(c.begin(), c.end());
    for (std::size_t i = 0; i < probes.size(); ++i)
        if (probes[i].verdict == ProbeVerdict::refuted)
            g_witnesses.push_back({inst, *probes[i].witness, clusters[i], eps});
}

// ---- criteria 1-3: local search vs the oracle --------------------------

void local_search_criteria(Gate& gate) {
    const double eps = 0.2;
    const auto t0 = std::chrono::steady_clock::now();
    int med_fail = 0, mean_fail = 0, uniform_fail = 0;
    int count = 0, uniform_count = 0;
    double worst_med = 0, worst_mean = 0;

    for (std::uint64_t seed = 1; seed <= 500; ++seed) {
        const int n = 6 + int(seed % 7);       // 6..12
        const int k = 2 + int(seed % 2);       // 2..3
        LocalSearchConfig cfg;
        cfg.epsilon = eps;
        cfg.seed = seed;

        Instance med = random_scaled_euclidean(n, k, 1000 + seed, 16.0, Objective::k_median);
        const auto rm = local_search(med, cfg);
        const double opt_m = exact_solve(med).best.cost;
        const double ratio_m = opt_m > 0 ? rm.clustering.cost / opt_m : 1.0;
        worst_med = std::max(worst_med, ratio_m);
        if (!(rm.clustering.cost <= (3 + 2 * eps) * opt_m * (1 + kRelTol))) ++med_fail;

        Instance mean = with_objective(med, Objective::k_means);
        const auto rk = local_search(mean, cfg);
        const double opt_k = exact_solve(mean).best.cost;
        const double ratio_k = opt_k > 0 ? rk.clustering.cost / opt_k : 1.0;
        worst_mean = std::max(worst_mean, ratio_k);
        if (!(rk.clustering.cost <= (9 + eps) * opt_k * (1 + kRelTol))) ++mean_fail;

        if (n <= 10 && k == 2) {
            ++uniform_count;
            if (!check_uniform_approx_condition(med, rm.clustering.centers, 3 + 2 * eps).holds)
                ++uniform_fail;
        }
        ++count;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    char buf[160];
    std::snprintf(buf, sizeof buf, "%d instances, worst ratio %.4f, %.1fs", count, worst_med,
                  secs);
    gate.report(1, "local-search k-median ratio <= 3+2eps", med_fail == 0 && secs < 60.0, buf);
    std::snprintf(buf, sizeof buf, "%d instances, worst ratio %.4f", count, worst_mean);
    gate.report(2, "local-search k-means ratio <= 9+eps", mean_fail == 0, buf);
    std::snprintf(buf, sizeof buf, "%d exhaustive checks on the n<=10,k=2 sub-corpus",
                  uniform_count);
    gate.report(3, "uniform-approximation condition at alpha=3+2eps", uniform_fail == 0, buf);
}

// ---- criterion 4: symmetric 2-LPR containment --------------------------

void symmetric_recovery(Gate& gate) {
    int fail = 0, instances = 0;
    for (std::uint64_t seed = 1; instances < 100; ++seed) {
        GenSpec spec;
        spec.seed = 9000 + seed;
        spec.k = 2 + int(seed % 3);
        spec.sizes.clear();
        SplitMix64 rng(seed);
        int n = 0;
        for (int c = 0; c < spec.k; ++c) {
            const int sz = 3 + int(rng.below(seed % 5 == 0 ? 9 : 5));
            spec.sizes.push_back(sz);
            n += sz;
        }
        if (n > 40) continue;
        spec.alpha = 2.0;
        const auto p = gen_planted(spec);
        if (!p.certified) continue;
        ++instances;

        const auto res = solve_robust_kcenter(p.instance, 0, p.r_star);
        auto groups = clusters_of(p.planted);
        bool ok = true;
        for (int c = 0; c < p.planted.k(); ++c) {
            std::sort(groups[c].begin(), groups[c].end());
            ok = ok && contains_cluster_verbatim(res.clustering, groups[c]);
        }
        if (res.clustering.k() == p.planted.k())
            ok = ok && closeness(res.clustering, p.planted, p.instance.n).mismatch == 0;
        else
            ok = false;
        if (!ok) ++fail;
    }
    gate.report(4, "robust k-center contains every certified 2-LPR cluster", fail == 0,
                std::to_string(instances) + " probe-certified planted instances");
}

// ---- criterion 5: capped perturbation properties -----------------------

void perturbation_properties(Gate& gate) {
    int built = 0, fail = 0;
    for (std::uint64_t seed = 1; built < 200; ++seed) {
        const int n = 6 + int(seed % 5);
        const int k = 2 + int(seed % 2);
        const Instance inst = random_scaled_euclidean(n, k, 5000 + seed, 8.0);
        const auto base = exact_solve(inst);
        const double r_star = base.best.cost;
        if (r_star <= 0) continue;
        auto clusters = clusters_of(base.best);

        SplitMix64 rng(seed);
        const double alpha = 1.5 + 0.5 * double(rng.below(4));  // 1.5 .. 3.0
        const int v = int(rng.below(std::uint64_t(n)));
        std::vector<int> targets = clusters[int(rng.below(std::uint64_t(k)))];
        if (rng.below(2)) {
            const auto& other = clusters[int(rng.below(std::uint64_t(k)))];
            targets.insert(targets.end(), other.begin(), other.end());
        }

        const auto spec =
            build_capped_perturbation(inst, alpha, {{v, targets, CapRule::min_cap}}, r_star);
        ++built;

        bool ok = find_triangle_violation(spec.completed) == std::nullopt;
        for (int i = 0; i < n && ok; ++i)
            for (int j = 0; j < n && ok; ++j)
                ok = approx_leq(inst.dist(i, j), spec.completed(i, j)) &&
                     approx_leq(spec.completed(i, j), alpha * inst.dist(i, j));
        const double per_cost = exact_solve(perturbed_instance(inst, spec)).best.cost;
        ok = ok && std::fabs(per_cost - alpha * r_star) <= kRelTol * std::max(1.0, alpha * r_star);
        if (!ok) ++fail;
    }
    gate.report(5, "capped perturbations: valid, metric, cost = alpha r*", fail == 0,
                std::to_string(built) + " constructed perturbations");
}

// ---- criterion 6: separation of certified (3,eps)-LPR clusters ---------

void separation_criterion(Gate& gate) {
    int instances = 0, fail = 0;
    const double eps = 0.1;
    for (std::uint64_t seed = 1; instances < 20; ++seed) {
        GenSpec spec;
        spec.seed = 20000 + seed;
        spec.k = 3 + int(seed % 2);
        spec.sizes.assign(spec.k, 5);
        spec.alpha = 3.0;
        spec.eps = eps;
        const auto p = gen_planted(spec);
        if (!p.certified) continue;
        const int n = p.instance.n;
        bool sizes_ok = true;
        const auto groups = clusters_of(p.planted);
        for (const auto& g : groups) sizes_ok = sizes_ok && double(g.size()) > 2 * eps * n;
        if (!sizes_ok) continue;

        // all stable clusters certified at (3, eps); count >= 3 by construction
        ++instances;
        double min_cross = kInf;
        for (int i = 0; i < p.planted.k(); ++i)
            for (int j = 0; j < p.planted.k(); ++j) {
                if (i == j) continue;
                for (int u : groups[i])
                    for (int v : groups[j]) min_cross = std::min(min_cross, p.instance.dist(u, v));
            }
        if (!(min_cross > p.r_star)) ++fail;
    }
    gate.report(6, "certified (3,eps)-LPR clusters stay > r* apart", fail == 0,
                std::to_string(instances) + " instances with >= 3 certified clusters");
}

// ---- criterion 7: hitting configurations -------------------------------

void hitting_criterion(Gate& gate) {
    int built = 0, fail = 0;
    for (std::uint64_t seed = 1; built < 50 && seed < 4000; ++seed) {
        const int n = 7 + int(seed % 4);  // 7..10
        const int k = 2;
        const Instance inst = random_scaled_euclidean(n, k, 30000 + seed, 2.0);
        const auto base = exact_solve(inst);
        const double r_star = base.best.cost;
        if (r_star <= 0) continue;

        std::vector<int> C = base.best.centers;  // k + 2 points
        for (int p = 0; p < n && int(C.size()) < k + 2; ++p)
            if (std::find(C.begin(), C.end(), p) == C.end()) C.push_back(p);
        if (!check_hits(inst, C, 3, 3.0, r_star)) continue;
        ++built;

        std::vector<PerturbException> ex;
        for (int c : C) {
            std::vector<int> targets;
            for (int t = 0; t < n; ++t)
                if (approx_leq(inst.dist(c, t), 3.0 * r_star)) targets.push_back(t);
            ex.push_back({c, targets, CapRule::min_cap});
        }
        const auto spec = build_capped_perturbation(inst, 3.0, ex, r_star);
        const auto per = perturbed_instance(inst, spec);

        bool ok = std::fabs(exact_solve(per).best.cost - 3.0 * r_star) <=
                  kRelTol * std::max(1.0, 3.0 * r_star);
        std::vector<int> sub(k);
        for (int i = 0; i < k; ++i) sub[i] = i;
        do {
            std::vector<int> centers;
            for (int i : sub) centers.push_back(C[i]);
            const double cost = voronoi(per, centers).cost;
            ok = ok && std::fabs(cost - 3.0 * r_star) <= kRelTol * std::max(1.0, 3.0 * r_star);
        } while (next_combination(sub, int(C.size())));
        if (!ok) ++fail;
    }
    gate.report(7, "(3,3)-hitting sets: every k-subset optimal at 3 r*", built == 50 && fail == 0,
                std::to_string(built) + " configurations, full subset enumeration");
}

// ---- criterion 8: asymmetric recovery ----------------------------------

void asymmetric_recovery(Gate& gate) {
    int instances = 0, fail = 0;
    for (std::uint64_t seed = 1; instances < 100; ++seed) {
        GenSpec spec;
        spec.seed = 40000 + seed;
        spec.k = 2 + int(seed % 3);
        SplitMix64 rng(seed);
        spec.sizes.clear();
        int n = 0;
        for (int c = 0; c < spec.k; ++c) {
            const int sz = 3 + int(rng.below(5));
            spec.sizes.push_back(sz);
            n += sz;
        }
        if (n > 36) continue;
        spec.asymmetry = Asymmetry::directed_skew;
        spec.alpha = 2.0;
        const auto p = gen_planted(spec);
        if (!p.certified) continue;

        // certification: detectors + probe (the generator already ran probes)
        const auto g = threshold_digraph(p.instance, p.r_star);
        HopMetric hm(p.instance, g);
        const auto ccvs = ccv_set(g);
        const auto opt = exact_solve(p.instance).best;
        bool detectors = true;
        for (int i = 0; i < opt.k(); ++i)
            detectors = detectors && satisfies_ccv_proximity(g, opt.centers[i], hm, ccvs) &&
                        satisfies_center_separation(p.instance, opt, i, p.r_star);
        if (!detectors) continue;
        ++instances;

        const auto rr = robust_asym_solve(p.instance, p.r_star);
        if (!rr.result.feasible ||
            closeness(rr.result.clustering, p.planted, p.instance.n).mismatch != 0)
            ++fail;
    }

    int mixed_instances = 0, mixed_fail = 0;
    for (std::uint64_t seed = 1; mixed_instances < 20; ++seed) {
        GenSpec spec;
        spec.seed = 50000 + seed;
        spec.k = 3;
        spec.sizes = {4, 5, 4};
        spec.asymmetry = Asymmetry::directed_skew;
        spec.noise = 3 + int(seed % 4);
        spec.alpha = 2.0;
        const auto p = gen_mixed(spec);
        if (!p.certified) continue;
        ++mixed_instances;

        const auto rr = robust_asym_solve(p.instance, p.r_star);
        if (!rr.result.feasible) {
            ++mixed_fail;
            continue;
        }
        auto groups = clusters_of(p.planted);
        const auto out_groups = clusters_of(rr.result.clustering);
        // each certified (stable) cluster inside exactly one output cluster,
        // and that cluster contains no other certified cluster
        std::vector<int> owner(spec.k, -1);
        bool ok = true;
        for (int c = 0; c < spec.k && ok; ++c) {
            int found = -1, count = 0;
            for (int o = 0; o < int(out_groups.size()); ++o) {
                bool subset = true;
                for (int v : groups[c])
                    if (std::find(out_groups[o].begin(), out_groups[o].end(), v) ==
                        out_groups[o].end())
                        subset = false;
                if (subset) {
                    found = o;
                    ++count;
                }
            }
            ok = count == 1;
            owner[c] = found;
        }
        for (int c = 0; c < spec.k && ok; ++c)
            for (int c2 = 0; c2 < spec.k; ++c2)
                if (c != c2 && owner[c] == owner[c2]) ok = false;
        if (!ok) ++mixed_fail;
    }

    gate.report(8, "robust asymmetric solver returns certified clusters exactly",
                fail == 0 && mixed_fail == 0,
                std::to_string(instances) + " planted + " + std::to_string(mixed_instances) +
                    " mixed instances at r = r*");
}

// ---- criterion 9: asymmetric approximation audit -----------------------

void asymmetric_audit(Gate& gate) {
    int fail = 0, instances = 0;
    std::string detail;
    for (const auto& [n_per, k, seed] :
         std::vector<std::tuple<int, int, std::uint64_t>>{{15, 4, 1},
                                                          {30, 4, 2},
                                                          {60, 4, 3},
                                                          {100, 5, 4},
                                                          {125, 4, 5},
                                                          {100, 3, 6}}) {
        GenSpec spec;
        spec.seed = 60000 + seed;
        spec.k = k;
        spec.sizes.assign(k, n_per);
        spec.asymmetry = Asymmetry::directed_skew;
        spec.certify = false;  // oracle infeasible at this size; r* is pinned by construction
        const auto p = gen_planted(spec);
        ++instances;

        for (auto solver : {AsymSolver::plain, AsymSolver::robust}) {
            const auto res = radius_search(p.instance, solver);
            const bool ok = res.clustering.k() <= p.instance.k &&
                            res.radius / p.r_star <= 27.0 &&
                            res.phase2_rounds <= log_star(p.instance.n) + 3;
            if (!ok) ++fail;
        }
        if (p.instance.n == 500) detail = "includes n=500; ";
    }
    gate.report(9, "asymmetric radius search: ratio <= 27, rounds <= log*(n)+3 [empirical audit]",
                fail == 0,
                detail + std::to_string(instances) + " instances up to n=500, both solvers");
}

// ---- criterion 10: hardness embedding ----------------------------------

void embedding_criterion(Gate& gate) {
    int fail = 0, instances = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const int n = 4 + int(seed % 3);  // 4..6
        auto inst = random_scaled_euclidean(n, 2, 70000 + seed, 8.0, Objective::k_median);
        const double alpha = seed % 2 ? 1.5 : 2.0;
        const auto e = embed_approx_stable(inst, alpha, 1.0);
        ++instances;

        const double before = exact_solve(inst).best.cost;
        const auto base = exact_solve(e.instance);
        bool ok = base.best.cost == before;

        const double bound = alpha * base.best.cost;
        std::vector<int> sub(e.instance.k);
        for (int i = 0; i < e.instance.k; ++i) sub[i] = i;
        do {
            if (voronoi(e.instance, sub).cost <= bound * (1 + kRelTol)) {
                for (int a = inst.n; a < e.instance.n && ok; ++a)
                    ok = std::find(sub.begin(), sub.end(), a) != sub.end();
            }
        } while (ok && next_combination(sub, e.instance.n));
        if (!ok) ++fail;
    }
    gate.report(10, "embedding preserves cost; alpha-approximations open all added points",
                fail == 0, std::to_string(instances) + " embeddings, oracle-enumerated");
}

// ---- criterion 11: witness soundness ------------------------------------

void witness_soundness(Gate& gate) {
    // harvest more refutations from unstable random instances
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const int n = 7 + int(seed % 4);
        const Instance inst = random_scaled_euclidean(n, 2, 80000 + seed, 6.0);
        const auto base = exact_solve(inst);
        if (!base.unique_partition) continue;
        for (double alpha : {1.5, 2.0}) {
            const auto probes = probe_all_lpr(inst, alpha, -1.0, &base);
            harvest(inst, base, probes, -1.0);
        }
        const auto eps_probes = probe_all_lpr(inst, 3.0, 0.1, &base);
        harvest(inst, base, eps_probes, 0.1);
    }

    int bogus = 0;
    for (const auto& w : g_witnesses)
        if (!witness_refutes(w.instance, w.spec, w.cluster, w.eps)) ++bogus;
    gate.report(11, "every emitted refutation witness re-verifies under the oracle", bogus == 0,
                std::to_string(g_witnesses.size()) + " witnesses, " + std::to_string(bogus) +
                    " bogus");
}

}  // namespace

int main() {
    Gate gate;
    local_search_criteria(gate);
    symmetric_recovery(gate);
    perturbation_properties(gate);
    separation_criterion(gate);
    hitting_criterion(gate);
    asymmetric_recovery(gate);
    asymmetric_audit(gate);
    embedding_criterion(gate);
    witness_soundness(gate);
    if (gate.failures) {
        std::printf("%d criterion(s) FAILED\n", gate.failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
