#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "stablecluster/hungarian.hpp"
#include "stablecluster/instance.hpp"

namespace stablecluster {

// An ordered center list plus per-point assignment (values are positions in
// the center list, not point indices) and the objective value.
struct Clustering {
    std::vector<int> centers;
    std::vector<int> assign;
    double cost = 0;

    int k() const { return int(centers.size()); }
    int n() const { return int(assign.size()); }
};

inline std::vector<std::vector<int>> clusters_of(const Clustering& c) {
    std::vector<std::vector<int>> out(c.centers.size());
    for (int p = 0; p < c.n(); ++p) out[c.assign[p]].push_back(p);
    return out;
}

// Canonical form of the induced partition: member lists sorted, clusters
// ordered by smallest member. Two clusterings induce the same partition iff
// their canonical forms are equal, regardless of center labels.
inline std::vector<std::vector<int>> canonical_partition(const Clustering& c) {
    auto cl = clusters_of(c);
    for (auto& v : cl) std::sort(v.begin(), v.end());
    cl.erase(std::remove_if(cl.begin(), cl.end(), [](const auto& v) { return v.empty(); }),
             cl.end());
    std::sort(cl.begin(), cl.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return cl;
}

// Whether `points` (sorted) appears verbatim as one of found's clusters.
inline bool contains_cluster_verbatim(const Clustering& found, const std::vector<int>& points) {
    for (const auto& cl : canonical_partition(found))
        if (cl == points) return true;
    return false;
}

struct ClosenessResult {
    std::vector<int> perm;   // perm[i] = matched cluster of b for cluster i of a
    long long mismatch = 0;  // min over permutations of sum |A_i \ B_perm(i)|
};

namespace detail {

inline std::vector<std::vector<long long>> overlap_matrix(const Clustering& a,
                                                          const Clustering& b) {
    std::vector<std::vector<long long>> o(a.k(), std::vector<long long>(b.k(), 0));
    for (int p = 0; p < a.n(); ++p) ++o[a.assign[p]][b.assign[p]];
    return o;
}

// Exhaustive search over permutations; used for k <= 8 and as the test oracle
// for the assignment path.
inline ClosenessResult closeness_exhaustive(const std::vector<std::vector<long long>>& o, int n) {
    const int k = int(o.size());
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    long long best_overlap = -1;
    do {
        long long s = 0;
        for (int i = 0; i < k; ++i) s += o[i][perm[i]];
        if (s > best_overlap) {
            best_overlap = s;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return ClosenessResult{best, n - best_overlap};
}

inline ClosenessResult closeness_assignment(const std::vector<std::vector<long long>>& o, int n) {
    const int k = int(o.size());
    std::vector<std::vector<double>> cost(k, std::vector<double>(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) cost[i][j] = -double(o[i][j]);
    auto perm = hungarian(cost);
    long long s = 0;
    for (int i = 0; i < k; ++i) s += o[i][perm[i]];
    return ClosenessResult{perm, n - s};
}

}  // namespace detail

// Definition of epsilon-closeness between clusterings: the minimized mismatch
// min_sigma sum_i |A_i \ B_sigma(i)|; the clusterings are eps-close iff the
// result is <= eps*n. Exhaustive permutation search for k <= 8, optimal
// assignment above.
inline ClosenessResult closeness(const Clustering& a, const Clustering& b, int n) {
    if (a.n() != n || b.n() != n)
        throw std::invalid_argument("closeness: clusterings must cover the same n points");
    if (a.k() != b.k()) throw std::invalid_argument("closeness: cluster counts differ");
    const auto o = detail::overlap_matrix(a, b);
    if (a.k() <= 8) return detail::closeness_exhaustive(o, n);
    return detail::closeness_assignment(o, n);
}

// Per-cluster eps-closeness: |A \ B| + |B \ A| <= eps*n.
inline bool clusters_eps_close(const std::vector<int>& a_sorted, const std::vector<int>& b_sorted,
                               double eps, int n) {
    std::vector<int> inter;
    std::set_intersection(a_sorted.begin(), a_sorted.end(), b_sorted.begin(), b_sorted.end(),
                          std::back_inserter(inter));
    const auto diff = (std::ssize(a_sorted) - std::ssize(inter)) +
                      (std::ssize(b_sorted) - std::ssize(inter));
    return double(diff) <= eps * n;
}

// Clustering file:
//   cost: <decimal>
//   centers: i1 ... ik
//   assign: a0 ... a_{n-1}
// plus optional trailing key: value lines (meta:, flags:, rstar:, ...).
struct ClusteringFile {
    Clustering clustering;
    std::map<std::string, std::string> extras;
};

inline ClusteringFile load_clustering(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open clustering file: " + path);
    ClusteringFile out;
    std::string line;
    int lineno = 0;
    bool have_cost = false, have_centers = false, have_assign = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto where = path + ":" + std::to_string(lineno);
        if (line.rfind("cost:", 0) == 0) {
            out.clustering.cost =
                detail::parse_double(detail::expect_prefix(line, "cost:", where), where);
            have_cost = true;
        } else if (line.rfind("centers:", 0) == 0) {
            for (const auto& t : detail::split_ws(detail::expect_prefix(line, "centers:", where)))
                out.clustering.centers.push_back(int(detail::parse_double(t, where)));
            have_centers = true;
        } else if (line.rfind("assign:", 0) == 0) {
            for (const auto& t : detail::split_ws(detail::expect_prefix(line, "assign:", where)))
                out.clustering.assign.push_back(int(detail::parse_double(t, where)));
            have_assign = true;
        } else {
            const auto colon = line.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error(where + ": expected 'key: value'");
            out.extras[line.substr(0, colon)] =
                detail::expect_prefix(line, line.substr(0, colon + 1), where);
        }
    }
    if (!have_cost || !have_centers || !have_assign)
        throw std::runtime_error(path + ": clustering file needs cost:, centers:, assign:");
    return out;
}

inline void save_clustering(const Clustering& c, const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& extras = {}) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write clustering file: " + path);
    out << "cost: " << detail::format_double(c.cost) << "\n";
    out << "centers:";
    for (int c_ : c.centers) out << ' ' << c_;
    out << "\nassign:";
    for (int a : c.assign) out << ' ' << a;
    out << "\n";
    for (const auto& [k, v] : extras) out << k << ": " << v << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace stablecluster
