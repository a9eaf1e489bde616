#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stablecluster/common.hpp"

namespace stablecluster {

enum class Objective { k_median, k_means, k_center, asym_k_center };

inline const char* objective_name(Objective o) {
    switch (o) {
        case Objective::k_median: return "k-median";
        case Objective::k_means: return "k-means";
        case Objective::k_center: return "k-center";
        case Objective::asym_k_center: return "asymmetric-k-center";
    }
    return "?";
}

inline std::optional<Objective> parse_objective(const std::string& s) {
    if (s == "k-median" || s == "kmedian") return Objective::k_median;
    if (s == "k-means" || s == "kmeans") return Objective::k_means;
    if (s == "k-center" || s == "kcenter") return Objective::k_center;
    if (s == "asymmetric-k-center" || s == "asym-k-center") return Objective::asym_k_center;
    return std::nullopt;
}

// Dense row-major square matrix of distances. Entries may be +inf when the
// matrix represents a graph with absent arcs (pre-completion).
struct DistMatrix {
    int n = 0;
    std::vector<double> v;

    DistMatrix() = default;
    explicit DistMatrix(int n_, double fill = 0.0) : n(n_), v(std::size_t(n_) * n_, fill) {}

    double operator()(int i, int j) const { return v[std::size_t(i) * n + j]; }
    double& operator()(int i, int j) { return v[std::size_t(i) * n + j]; }

    bool operator==(const DistMatrix&) const = default;
};

// A clustering instance: point set S with its (possibly asymmetric) distance
// function, the target cluster count k, and the objective tag.
//
// Direction convention for asymmetric instances: a center c serves point p at
// cost dist(c, p), i.e. center-to-point, matching the Gamma+ coverage
// semantics of the threshold digraph. Symmetric instances are unaffected.
struct Instance {
    int n = 0;
    int k = 0;
    DistMatrix dist;
    bool symmetric = true;
    Objective objective = Objective::k_center;
    std::vector<std::string> labels;

    // Populated for euclidean-mode files so serialization preserves the mode.
    int dim = 0;
    std::vector<double> coords;  // n * dim, row-major

    double d(int i, int j) const { return dist(i, j); }
};

struct TriangleWitness {
    int u = -1, v = -1, w = -1;
    double direct = 0, via = 0;
};

// First directed-triangle violation beyond tolerance, if any.
inline std::optional<TriangleWitness> find_triangle_violation(const DistMatrix& m) {
    const int n = m.n;
    for (int v = 0; v < n; ++v)
        for (int u = 0; u < n; ++u) {
            const double duv = m(u, v);
            if (std::isinf(duv)) continue;
            for (int w = 0; w < n; ++w) {
                const double via = duv + m(v, w);
                if (m(u, w) > via + cmp_tol(m(u, w), via))
                    return TriangleWitness{u, v, w, m(u, w), via};
            }
        }
    return std::nullopt;
}

inline void validate_instance(const Instance& inst, bool check_triangle = true) {
    if (inst.n <= 0) throw std::runtime_error("instance: n must be positive");
    if (inst.k < 1 || inst.k > inst.n)
        throw std::runtime_error("instance: k must satisfy 1 <= k <= n");
    if (int(inst.dist.v.size()) != inst.n * inst.n)
        throw std::runtime_error("instance: distance matrix size mismatch");
    for (int i = 0; i < inst.n; ++i) {
        if (inst.dist(i, i) != 0.0)
            throw std::runtime_error("instance: nonzero self-distance at point " +
                                     std::to_string(i));
        for (int j = 0; j < inst.n; ++j) {
            const double d = inst.dist(i, j);
            if (std::isnan(d) || d < 0.0)
                throw std::runtime_error("instance: negative or NaN distance at (" +
                                         std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }
    if (inst.symmetric) {
        for (int i = 0; i < inst.n; ++i)
            for (int j = i + 1; j < inst.n; ++j)
                if (inst.dist(i, j) != inst.dist(j, i))
                    throw std::runtime_error("instance: symmetric flag set but dist(" +
                                             std::to_string(i) + "," + std::to_string(j) +
                                             ") != dist(" + std::to_string(j) + "," +
                                             std::to_string(i) + ")");
    } else if (inst.objective != Objective::asym_k_center) {
        throw std::runtime_error(
            "instance: asymmetric distances require the asymmetric-k-center objective");
    }
    if (check_triangle) {
        if (auto w = find_triangle_violation(inst.dist)) {
            std::ostringstream os;
            os << "instance: triangle inequality violated: d(" << w->u << "," << w->w
               << ")=" << w->direct << " > d(" << w->u << "," << w->v << ")+d(" << w->v << ","
               << w->w << ")=" << w->via << " (witness " << w->u << "," << w->v << "," << w->w
               << ")";
            throw std::runtime_error(os.str());
        }
    }
}

// Shortest-path (metric) completion of a non-negative arc-length matrix.
// Relaxation passes repeat until a fixpoint, so completing a completion is
// the identity bit-for-bit. Unreachable pairs stay +inf.
inline DistMatrix metric_completion(DistMatrix m) {
    const int n = m.n;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) {
                const double dik = m(i, k);
                if (std::isinf(dik)) continue;
                for (int j = 0; j < n; ++j) {
                    const double via = dik + m(k, j);
                    if (via < m(i, j)) {
                        m(i, j) = via;
                        changed = true;
                    }
                }
            }
    }
    return m;
}

inline Instance with_objective(Instance inst, Objective o) {
    if (!inst.symmetric && o != Objective::asym_k_center)
        throw std::runtime_error("with_objective: asymmetric instance requires asymmetric-k-center");
    inst.objective = o;
    return inst;
}

namespace detail {

inline std::string format_double(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

inline double parse_double(const std::string& tok, const std::string& where) {
    double x = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw std::runtime_error(where + ": bad number '" + tok + "'");
    return x;
}

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline std::string expect_prefix(const std::string& line, const std::string& prefix,
                                 const std::string& where) {
    if (line.rfind(prefix, 0) != 0)
        throw std::runtime_error(where + ": expected '" + prefix + "...', got '" + line + "'");
    std::string rest = line.substr(prefix.size());
    const auto a = rest.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = rest.find_last_not_of(" \t\r");
    return rest.substr(a, b - a + 1);
}

}  // namespace detail

// Instance file, STABLECLUSTER v1:
//   line 1: STABLECLUSTER v1
//   line 2: mode: matrix | euclidean
//   line 3: symmetric: true|false
//   line 4: n: <int>
//   line 5: k: <int>
//   (euclidean only) line 6: dim: <int>
//   line: data:
//   then n rows (matrix: n distances per row; euclidean: dim coordinates).
inline Instance load_instance(const std::string& path, bool validate = true) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file: " + path);

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    std::size_t ln = 0;
    auto where = [&](std::size_t i) { return path + ":" + std::to_string(i + 1); };
    auto need_line = [&]() -> const std::string& {
        if (ln >= lines.size()) throw std::runtime_error(path + ": unexpected end of file");
        return lines[ln++];
    };

    if (need_line() != "STABLECLUSTER v1")
        throw std::runtime_error(where(0) + ": bad magic, expected 'STABLECLUSTER v1'");

    const std::string mode = detail::expect_prefix(need_line(), "mode:", where(ln - 1));
    if (mode != "matrix" && mode != "euclidean")
        throw std::runtime_error(where(ln - 1) + ": mode must be 'matrix' or 'euclidean'");

    const std::string sym = detail::expect_prefix(need_line(), "symmetric:", where(ln - 1));
    if (sym != "true" && sym != "false")
        throw std::runtime_error(where(ln - 1) + ": symmetric must be 'true' or 'false'");

    Instance inst;
    inst.symmetric = sym == "true";
    inst.n = int(detail::parse_double(detail::expect_prefix(need_line(), "n:", where(ln - 1)),
                                      where(ln - 1)));
    inst.k = int(detail::parse_double(detail::expect_prefix(need_line(), "k:", where(ln - 1)),
                                      where(ln - 1)));
    if (mode == "euclidean") {
        if (!inst.symmetric)
            throw std::runtime_error(path + ": euclidean mode requires symmetric: true");
        inst.dim = int(detail::parse_double(
            detail::expect_prefix(need_line(), "dim:", where(ln - 1)), where(ln - 1)));
        if (inst.dim <= 0) throw std::runtime_error(path + ": dim must be positive");
    }
    if (detail::expect_prefix(need_line(), "data:", where(ln - 1)) != "")
        throw std::runtime_error(where(ln - 1) + ": trailing content after 'data:'");

    if (inst.n <= 0) throw std::runtime_error(path + ": n must be positive");
    inst.dist = DistMatrix(inst.n);

    if (mode == "matrix") {
        for (int i = 0; i < inst.n; ++i) {
            const auto toks = detail::split_ws(need_line());
            if (int(toks.size()) != inst.n)
                throw std::runtime_error(where(ln - 1) + ": expected " + std::to_string(inst.n) +
                                         " values, got " + std::to_string(toks.size()));
            for (int j = 0; j < inst.n; ++j)
                inst.dist(i, j) = detail::parse_double(toks[j], where(ln - 1));
        }
    } else {
        inst.coords.resize(std::size_t(inst.n) * inst.dim);
        for (int i = 0; i < inst.n; ++i) {
            const auto toks = detail::split_ws(need_line());
            if (int(toks.size()) != inst.dim)
                throw std::runtime_error(where(ln - 1) + ": expected " + std::to_string(inst.dim) +
                                         " coordinates, got " + std::to_string(toks.size()));
            for (int d = 0; d < inst.dim; ++d)
                inst.coords[std::size_t(i) * inst.dim + d] =
                    detail::parse_double(toks[d], where(ln - 1));
        }
        for (int i = 0; i < inst.n; ++i)
            for (int j = 0; j < inst.n; ++j) {
                double s = 0;
                for (int d = 0; d < inst.dim; ++d) {
                    const double diff = inst.coords[std::size_t(i) * inst.dim + d] -
                                        inst.coords[std::size_t(j) * inst.dim + d];
                    s += diff * diff;
                }
                inst.dist(i, j) = std::sqrt(s);
            }
    }

    for (std::size_t i = ln; i < lines.size(); ++i)
        if (!lines[i].empty())
            throw std::runtime_error(where(i) + ": trailing content after data rows");

    inst.objective = inst.symmetric ? Objective::k_center : Objective::asym_k_center;
    if (validate) validate_instance(inst);
    return inst;
}

inline void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file: " + path);
    const bool euclid = inst.dim > 0 && !inst.coords.empty();
    out << "STABLECLUSTER v1\n";
    out << "mode: " << (euclid ? "euclidean" : "matrix") << "\n";
    out << "symmetric: " << (inst.symmetric ? "true" : "false") << "\n";
    out << "n: " << inst.n << "\n";
    out << "k: " << inst.k << "\n";
    if (euclid) out << "dim: " << inst.dim << "\n";
    out << "data:\n";
    if (euclid) {
        for (int i = 0; i < inst.n; ++i) {
            for (int d = 0; d < inst.dim; ++d) {
                if (d) out << ' ';
                out << detail::format_double(inst.coords[std::size_t(i) * inst.dim + d]);
            }
            out << '\n';
        }
    } else {
        for (int i = 0; i < inst.n; ++i) {
            for (int j = 0; j < inst.n; ++j) {
                if (j) out << ' ';
                out << detail::format_double(inst.dist(i, j));
            }
            out << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace stablecluster
