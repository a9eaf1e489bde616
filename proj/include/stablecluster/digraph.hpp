#pragma once

#include <vector>

#include "stablecluster/common.hpp"
#include "stablecluster/instance.hpp"

namespace stablecluster {

// Threshold digraph D_(S,d) at radius r: arc (u,v) iff d(u,v) <= r.
// out[v] = Gamma+(v) = {u : d(v,u) <= r}, in[v] = Gamma-(v) = {u : d(u,v) <= r}.
// Self-loops are always present (self-distance 0).
struct ThresholdDigraph {
    double r = 0;
    int n = 0;
    std::vector<Bitset> out;
    std::vector<Bitset> in;
};

inline ThresholdDigraph threshold_digraph(const Instance& inst, double r) {
    if (r < 0) throw std::invalid_argument("threshold_digraph: r must be >= 0");
    ThresholdDigraph g;
    g.r = r;
    g.n = inst.n;
    g.out.assign(inst.n, Bitset(inst.n));
    g.in.assign(inst.n, Bitset(inst.n));
    for (int u = 0; u < inst.n; ++u)
        for (int v = 0; v < inst.n; ++v)
            if (inst.dist(u, v) <= r) {
                g.out[u].set(v);
                g.in[v].set(u);
            }
    return g;
}

enum class Direction { out, in };

// Points reachable from (out) or reaching (in) any seed within x hops.
inline Bitset gamma_hop_set(const ThresholdDigraph& g, const Bitset& seeds, int x, Direction dir) {
    if (x < 0) throw std::invalid_argument("gamma_hop: x must be >= 0");
    const auto& rows = dir == Direction::out ? g.out : g.in;
    Bitset vis = seeds;
    Bitset frontier = seeds;
    for (int step = 0; step < x; ++step) {
        Bitset next(g.n);
        frontier.for_each([&](int u) { next |= rows[u]; });
        next.and_not(vis);
        if (next.none()) break;
        vis |= next;
        frontier = next;
    }
    return vis;
}

inline Bitset gamma_hop(const ThresholdDigraph& g, int v, int x, Direction dir) {
    Bitset seed(g.n);
    seed.set(v);
    return gamma_hop_set(g, seed, x, dir);
}

// BFS hop counts from src following arcs forward (hops[v] = path length src->v),
// -1 where unreachable.
inline std::vector<int> hop_levels_from(const ThresholdDigraph& g, int src) {
    std::vector<int> lev(g.n, -1);
    Bitset vis(g.n);
    vis.set(src);
    lev[src] = 0;
    Bitset frontier = vis;
    for (int step = 1; frontier.any(); ++step) {
        Bitset next(g.n);
        frontier.for_each([&](int u) { next |= g.out[u]; });
        next.and_not(vis);
        next.for_each([&](int u) { lev[u] = step; });
        vis |= next;
        frontier = next;
    }
    return lev;
}

// BFS hop counts toward dst (hops[v] = path length v->dst).
inline std::vector<int> hop_levels_to(const ThresholdDigraph& g, int dst) {
    std::vector<int> lev(g.n, -1);
    Bitset vis(g.n);
    vis.set(dst);
    lev[dst] = 0;
    Bitset frontier = vis;
    for (int step = 1; frontier.any(); ++step) {
        Bitset next(g.n);
        frontier.for_each([&](int u) { next |= g.in[u]; });
        next.and_not(vis);
        next.for_each([&](int u) { lev[u] = step; });
        vis |= next;
        frontier = next;
    }
    return lev;
}

}  // namespace stablecluster
