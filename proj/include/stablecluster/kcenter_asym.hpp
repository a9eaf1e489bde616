#pragma once

#include <unordered_map>
#include <vector>

#include "stablecluster/digraph.hpp"
#include "stablecluster/kcenter_sym.hpp"
#include "stablecluster/objectives.hpp"

namespace stablecluster {

// Center-capturing vertex: Gamma-(v) subset of Gamma+(v).
inline bool is_ccv(const ThresholdDigraph& g, int v) { return g.in[v].subset_of(g.out[v]); }

inline Bitset ccv_set(const ThresholdDigraph& g) {
    Bitset s(g.n);
    for (int v = 0; v < g.n; ++v)
        if (is_ccv(g, v)) s.set(v);
    return s;
}

// The redefined distance of the robust algorithm: candidates are compared to
// a point v by (hop count in the threshold digraph, metric length of the
// lexicographically smallest hop-shortest path, candidate index). The order
// is total for distinct candidates, so every "closer" comparison is strict.
class HopMetric {
public:
    HopMetric(const Instance& inst, const ThresholdDigraph& g) : inst_(inst), g_(g) {}

    int hops(int from, int to) {
        const auto& lev = forward(from);
        return lev[to];
    }

    // Metric length of the lex-least minimal-hop path from -> to. Requires
    // reachability.
    double lex_path_length(int from, int to) {
        const std::uint64_t key = (std::uint64_t(from) << 32) | std::uint64_t(to);
        if (auto it = len_memo_.find(key); it != len_memo_.end()) return it->second;
        const auto& back = backward(to);
        int rem = back[from];
        double len = 0;
        int cur = from;
        while (cur != to) {
            const int next =
                g_.out[cur].first_where([&](int u) { return back[u] == rem - 1; });
            len += inst_.dist(cur, next);
            cur = next;
            --rem;
        }
        len_memo_.emplace(key, len);
        return len;
    }

    // Strict "a is closer to v than b" under the tie-broken comparison.
    bool closer(int v, int a, int b) {
        if (a == b) return false;
        int ha = hops(a, v), hb = hops(b, v);
        const int INF = 1 << 30;
        if (ha < 0) ha = INF;
        if (hb < 0) hb = INF;
        if (ha != hb) return ha < hb;
        if (ha == INF) return a < b;
        if (ha > 0) {
            const double la = lex_path_length(a, v);
            const double lb = lex_path_length(b, v);
            if (la != lb) return la < lb;
        }
        return a < b;
    }

private:
    const std::vector<int>& forward(int src) {
        auto it = fwd_.find(src);
        if (it == fwd_.end()) it = fwd_.emplace(src, hop_levels_from(g_, src)).first;
        return it->second;
    }
    const std::vector<int>& backward(int dst) {
        auto it = bwd_.find(dst);
        if (it == bwd_.end()) it = bwd_.emplace(dst, hop_levels_to(g_, dst)).first;
        return it->second;
    }

    const Instance& inst_;
    const ThresholdDigraph& g_;
    std::unordered_map<int, std::vector<int>> fwd_, bwd_;
    std::unordered_map<std::uint64_t, double> len_memo_;
};

// CCV-proximity: c is a CCV and every point of Gamma-(c) is closer to c than
// any CCV outside Gamma+(c), under the tie-broken comparison.
inline bool satisfies_ccv_proximity(const ThresholdDigraph& g, int c, HopMetric& hm,
                                    const Bitset& ccvs) {
    if (!ccvs.test(c)) return false;
    Bitset rivals = ccvs;
    rivals.and_not(g.out[c]);
    if (rivals.none()) return true;
    bool ok = true;
    g.in[c].for_each([&](int v) {
        if (!ok) return;
        rivals.for_each([&](int rival) {
            if (ok && !hm.closer(v, c, rival)) ok = false;
        });
    });
    return ok;
}

inline bool satisfies_ccv_proximity(const ThresholdDigraph& g, const Instance& inst, int c) {
    HopMetric hm(inst, g);
    return satisfies_ccv_proximity(g, c, hm, ccv_set(g));
}

// Center-separation of optimal cluster i at radius r: no point outside C_i is
// within r of its center.
inline bool satisfies_center_separation(const Instance& inst, const Clustering& opt, int i,
                                        double r) {
    const int ci = opt.centers[i];
    for (int v = 0; v < inst.n; ++v)
        if (opt.assign[v] != i && inst.dist(v, ci) <= r) return false;
    return true;
}

namespace detail {

inline std::vector<Bitset> gamma5_all(const ThresholdDigraph& g) {
    std::vector<Bitset> out;
    out.reserve(g.n);
    for (int v = 0; v < g.n; ++v) out.push_back(gamma_hop(g, v, 5, Direction::out));
    return out;
}

struct Phase2Result {
    std::vector<int> a_final;
    int rounds = 0;
    bool stalled = false;
};

// Recursive set cover over A_0 = S \ Gamma+_5(C): each round greedily picks
// points maximizing 5-hop coverage of the still-uncovered part of A_i, then
// A_{i+1} = A'_{i+1} intersect A_i, until |A_i| <= k. A round that makes no
// progress can never make progress later (the state repeats), so it is
// reported as a stall and the radius treated as infeasible.
inline Phase2Result phase2_set_cover(const ThresholdDigraph& g, const Bitset& phase1_centers,
                                     int k) {
    Phase2Result res;
    const Bitset covered5 = gamma_hop_set(g, phase1_centers, 5, Direction::out);
    Bitset a(g.n);
    a.set_all();
    a.and_not(covered5);
    if (a.count() <= k) {
        res.a_final = a.to_vector();
        return res;
    }

    const auto gamma5 = gamma5_all(g);
    while (a.count() > k) {
        ++res.rounds;
        Bitset uncovered = a;
        Bitset a_prime(g.n);
        while (uncovered.any()) {
            int best = -1, best_gain = 0;
            for (int v = 0; v < g.n; ++v) {
                const int gain = gamma5[v].count_and(uncovered);
                if (gain > best_gain) {
                    best_gain = gain;
                    best = v;
                }
            }
            uncovered.and_not(gamma5[best]);
            a_prime.set(best);
        }
        Bitset a_next = a_prime;
        a_next &= a;
        if (a_next == a) {
            res.stalled = true;
            break;
        }
        a = a_next;
    }
    res.a_final = a.to_vector();
    return res;
}

}  // namespace detail

struct VishwanathanResult {
    std::vector<int> centers;       // C followed by A_final
    std::vector<int> phase1_picks;  // C in pick order
    std::vector<int> a_final;
    bool feasible = false;
    int rounds = 0;
};

// Vishwanathan's O(log* n) approximation at a guessed radius r.
// Phase I pulls out arbitrary (lowest-index) CCVs, marking Gamma+_2; Phase II
// runs the recursive set cover. Feasible iff |C union A_final| <= k.
inline VishwanathanResult vishwanathan_solve(const Instance& inst, double r) {
    const ThresholdDigraph g = threshold_digraph(inst, r);
    const Bitset ccvs = ccv_set(g);
    VishwanathanResult res;
    Bitset marked(g.n);
    Bitset chosen(g.n);
    while (int(res.phase1_picks.size()) <= inst.k) {
        int pick = -1;
        for (int v = 0; v < g.n; ++v)
            if (ccvs.test(v) && !marked.test(v)) {
                pick = v;
                break;
            }
        if (pick == -1) break;
        res.phase1_picks.push_back(pick);
        chosen.set(pick);
        marked |= gamma_hop(g, pick, 2, Direction::out);
    }
    if (int(res.phase1_picks.size()) > inst.k) return res;  // infeasible already

    auto p2 = detail::phase2_set_cover(g, chosen, inst.k);
    res.rounds = p2.rounds;
    res.a_final = p2.a_final;
    res.centers = res.phase1_picks;
    for (int v : res.a_final) res.centers.push_back(v);
    res.feasible = !p2.stalled && int(res.centers.size()) <= inst.k;
    return res;
}

struct AsymRobustResult {
    KCenterResult result;
    std::vector<int> tile_of;            // protected tile owner position, -1 if unmarked
    std::vector<int> phase1_picks;
    std::vector<bool> pick_by_proximity;
    std::vector<int> a_final;
};

// Robust asymmetric k-center at a guessed radius r. Phase I prefers unmarked
// points satisfying CCV-proximity, falling back to arbitrary unmarked CCVs,
// and each chosen c marks union over c' in Gamma-(c) of Gamma+(c'). The
// Voronoi tiles of the marked points are protected: the final assignment may
// not remove a point from its Phase-I tile.
inline AsymRobustResult robust_asym_solve(const Instance& inst, double r) {
    const ThresholdDigraph g = threshold_digraph(inst, r);
    const Bitset ccvs = ccv_set(g);
    HopMetric hm(inst, g);

    AsymRobustResult res;
    Bitset marked(g.n);
    Bitset chosen(g.n);
    while (int(res.phase1_picks.size()) <= inst.k) {
        Bitset unmarked_ccvs = ccvs;
        unmarked_ccvs.and_not(marked);
        if (unmarked_ccvs.none()) break;
        int pick = -1;
        bool by_prox = false;
        for (int v = 0; v < g.n; ++v)
            if (!marked.test(v) && satisfies_ccv_proximity(g, v, hm, ccvs)) {
                pick = v;
                by_prox = true;
                break;
            }
        if (pick == -1) pick = unmarked_ccvs.first_set();
        res.phase1_picks.push_back(pick);
        res.pick_by_proximity.push_back(by_prox);
        chosen.set(pick);
        g.in[pick].for_each([&](int cp) { marked |= g.out[cp]; });
    }

    res.tile_of.assign(inst.n, -1);
    KCenterResult& kr = res.result;
    kr.r_used = r;

    if (int(res.phase1_picks.size()) > inst.k) {
        kr.feasible = false;
        return res;
    }

    // Protected tiles: Voronoi of the marked points induced by C under the
    // tie-broken comparison.
    marked.for_each([&](int p) {
        int best = 0;
        for (int pos = 1; pos < int(res.phase1_picks.size()); ++pos)
            if (hm.closer(p, res.phase1_picks[pos], res.phase1_picks[best])) best = pos;
        res.tile_of[p] = best;
    });

    auto p2 = detail::phase2_set_cover(g, chosen, inst.k);
    kr.phase2_rounds = p2.rounds;
    res.a_final = p2.a_final;

    std::vector<int> centers = res.phase1_picks;
    for (int v : res.a_final) centers.push_back(v);
    kr.feasible = !p2.stalled && int(centers.size()) <= inst.k && !centers.empty();
    if (centers.empty()) return res;

    // Final assignment: tiles are kept; everything else goes to the closest
    // center under the tie-broken comparison.
    Clustering c;
    c.centers = centers;
    c.assign.resize(inst.n);
    for (int p = 0; p < inst.n; ++p) {
        if (res.tile_of[p] >= 0) {
            c.assign[p] = res.tile_of[p];
            continue;
        }
        int best = 0;
        for (int pos = 1; pos < int(centers.size()); ++pos)
            if (hm.closer(p, centers[pos], centers[best])) best = pos;
        c.assign[p] = best;
    }
    c.cost = clustering_cost(inst, c.centers, c.assign);
    kr.clustering = std::move(c);
    kr.radius = clustering_radius(inst, kr.clustering);
    return res;
}

enum class AsymSolver { plain, robust };

// Try ascending radius candidates, return the result at the least feasible r.
inline KCenterResult radius_search(const Instance& inst, AsymSolver solver) {
    const auto cands = opt_radius_candidates(inst);
    for (double r : cands) {
        if (solver == AsymSolver::plain) {
            auto v = vishwanathan_solve(inst, r);
            if (!v.feasible) continue;
            KCenterResult res;
            res.clustering = voronoi(inst, v.centers);
            res.radius = clustering_radius(inst, res.clustering);
            res.clustering.cost = res.radius;
            res.r_used = r;
            res.phase2_rounds = v.rounds;
            res.feasible = true;
            return res;
        }
        auto rr = robust_asym_solve(inst, r);
        if (!rr.result.feasible) continue;
        return rr.result;
    }
    throw std::logic_error("radius_search: no feasible radius (cannot happen at max distance)");
}

}  // namespace stablecluster
