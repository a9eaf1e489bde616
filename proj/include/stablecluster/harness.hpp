#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stablecluster/csv.hpp"
#include "stablecluster/generator.hpp"
#include "stablecluster/kcenter_asym.hpp"
#include "stablecluster/kcenter_sym.hpp"
#include "stablecluster/local_search.hpp"

namespace stablecluster {

struct BenchRecord {
    std::string instance_id;
    std::string algorithm;
    int k = 0;
    double cost = 0;
    std::optional<double> oracle_cost;
    std::optional<double> ratio;
    std::optional<int> recovered;  // truth clusters appearing verbatim
    double wall_seconds = 0;
    std::uint64_t seed = 0;
    std::string params;
    std::optional<long long> mismatch;  // closeness vs truth; assert-only, not a column
    bool assert_ok = true;
};

inline constexpr const char* kBenchHeader =
    "instance,algo,k,cost,oracle_cost,ratio,recovered,time_s,seed,params,assert_ok";

inline std::string bench_csv_row(const BenchRecord& r) {
    auto opt_num = [](const auto& o) { return o ? detail::format_double(double(*o)) : ""; };
    return csv_row({r.instance_id, r.algorithm, std::to_string(r.k),
                    detail::format_double(r.cost), opt_num(r.oracle_cost), opt_num(r.ratio),
                    r.recovered ? std::to_string(*r.recovered) : "",
                    detail::format_double(r.wall_seconds), std::to_string(r.seed), r.params,
                    r.assert_ok ? "1" : "0"});
}

using ParamMap = std::map<std::string, std::string>;

inline ParamMap parse_params(const std::string& s) {
    ParamMap out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        auto end = s.find(';', pos);
        if (end == std::string::npos) end = s.size();
        const std::string item = s.substr(pos, end - pos);
        if (!item.empty()) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("bad parameter item '" + item + "' (want key=value)");
            out[item.substr(0, eq)] = item.substr(eq + 1);
        }
        pos = end + 1;
    }
    return out;
}

namespace detail {

inline double param_d(const ParamMap& p, const std::string& key, double dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : parse_double(it->second, "param " + key);
}
inline std::uint64_t param_u(const ParamMap& p, const std::string& key, std::uint64_t dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : std::uint64_t(parse_double(it->second, "param " + key));
}
inline std::string param_s(const ParamMap& p, const std::string& key, const std::string& dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
}

}  // namespace detail

inline Objective default_objective_for(const std::string& algo, const Instance& inst) {
    if (algo == "local-search") return Objective::k_median;
    if (algo == "kcenter-greedy" || algo == "kcenter-robust") return Objective::k_center;
    if (algo == "asym-kcenter" || algo == "asym-kcenter-robust") return Objective::asym_k_center;
    return inst.objective;
}

struct RunOutput {
    Clustering clustering;
    std::vector<std::pair<std::string, std::string>> meta;
};

// Dispatch one solver over an instance whose objective tag is already set.
inline RunOutput run_algo(const Instance& inst, const std::string& algo, const ParamMap& params,
                          std::uint64_t seed, int threads = 1) {
    RunOutput out;
    if (algo == "exact") {
        auto r = exact_solve(inst, threads);
        out.clustering = r.best;
        out.meta.emplace_back("meta", std::string("unique_partition=") +
                                          (r.unique_partition ? "1" : "0"));
        return out;
    }
    if (algo == "local-search") {
        LocalSearchConfig cfg;
        cfg.epsilon = detail::param_d(params, "epsilon", 0.2);
        cfg.t = int(detail::param_u(params, "t", 0));
        cfg.seed = seed;
        const std::string init = detail::param_s(params, "init", "farthest-first");
        if (init == "first-k")
            cfg.init = InitMode::first_k;
        else if (init == "random")
            cfg.init = InitMode::random;
        else if (init == "farthest-first")
            cfg.init = InitMode::farthest_first;
        else
            throw std::runtime_error("unknown init mode: " + init);
        auto r = local_search(inst, cfg);
        out.clustering = r.clustering;
        out.meta.emplace_back("meta", "swaps=" + std::to_string(r.trace.size()) +
                                          " converged=" + (r.converged ? "1" : "0"));
        return out;
    }
    if (algo == "kcenter-greedy") {
        auto r = greedy_2approx(inst, seed);
        out.clustering = r.clustering;
        out.meta.emplace_back("meta", "radius=" + detail::format_double(r.radius));
        return out;
    }
    if (algo == "kcenter-robust") {
        KCenterResult r;
        if (params.count("r")) {
            const double rad = detail::param_d(params, "r", 0);
            auto pre = condition1_preprocess(inst, rad);
            auto g = greedy_2approx(pre.instance, seed);
            r = condition2_merge(pre.instance, g);
            r.r_used = rad;
            r.condition1_applied = true;
            r.clustering.cost =
                clustering_cost(inst, r.clustering.centers, r.clustering.assign);
            r.radius = clustering_radius(inst, r.clustering);
        } else {
            r = solve_robust_kcenter(inst, seed);
        }
        out.clustering = r.clustering;
        out.meta.emplace_back("meta", "radius=" + detail::format_double(r.radius) +
                                          " r=" + detail::format_double(r.r_used) +
                                          " cond1=" + (r.condition1_applied ? "1" : "0") +
                                          " cond2=" + (r.condition2_applied ? "1" : "0"));
        return out;
    }
    if (algo == "asym-kcenter" || algo == "asym-kcenter-robust") {
        const bool robust = algo == "asym-kcenter-robust";
        KCenterResult r;
        std::string tiles;
        if (params.count("r")) {
            const double rad = detail::param_d(params, "r", 0);
            if (robust) {
                auto rr = robust_asym_solve(inst, rad);
                r = rr.result;
                std::map<int, int> tile_sizes;
                for (int t : rr.tile_of)
                    if (t >= 0) ++tile_sizes[t];
                for (auto [pos, sz] : tile_sizes)
                    tiles += (tiles.empty() ? "" : "|") + std::to_string(sz);
            } else {
                auto v = vishwanathan_solve(inst, rad);
                r.feasible = v.feasible;
                r.r_used = rad;
                r.phase2_rounds = v.rounds;
                if (v.feasible) {
                    r.clustering = voronoi(inst, v.centers);
                    r.radius = clustering_radius(inst, r.clustering);
                }
            }
            if (!r.feasible)
                throw std::runtime_error(algo + ": infeasible at r=" +
                                         detail::format_double(rad));
        } else {
            r = radius_search(inst, robust ? AsymSolver::robust : AsymSolver::plain);
        }
        out.clustering = r.clustering;
        std::string meta = "r=" + detail::format_double(r.r_used) +
                           " rounds=" + std::to_string(r.phase2_rounds) +
                           " feasible=" + (r.feasible ? "1" : "0");
        if (!tiles.empty()) meta += " tiles=" + tiles;
        out.meta.emplace_back("meta", meta);
        return out;
    }
    throw std::runtime_error("unknown algorithm: " + algo);
}

// One benchmark row: run the solver, compare against the oracle when feasible
// and against ground truth when provided.
inline BenchRecord bench_one(const Instance& inst_in, const std::string& instance_id,
                             const std::string& algo, const ParamMap& params,
                             const std::optional<Clustering>& truth, std::uint64_t seed,
                             int threads = 1) {
    Instance inst = inst_in;
    if (params.count("objective")) {
        auto o = parse_objective(params.at("objective"));
        if (!o) throw std::runtime_error("unknown objective: " + params.at("objective"));
        inst = with_objective(inst, *o);
    } else {
        inst = with_objective(inst, default_objective_for(algo, inst));
    }

    BenchRecord rec;
    rec.instance_id = instance_id;
    rec.algorithm = algo;
    rec.k = inst.k;
    rec.seed = seed;
    std::string pstr;
    for (const auto& [k, v] : params) pstr += (pstr.empty() ? "" : ";") + k + "=" + v;
    rec.params = pstr;

    const auto t0 = std::chrono::steady_clock::now();
    auto out = run_algo(inst, algo, params, seed, threads);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.cost = out.clustering.cost;

    if (algo != "exact" && binomial_capped(inst.n, inst.k, kOracleGuard + 1) <= kOracleGuard) {
        rec.oracle_cost = exact_solve(inst, threads).best.cost;
        if (*rec.oracle_cost > 0) rec.ratio = rec.cost / *rec.oracle_cost;
    }
    if (truth) {
        const auto flags = lpr_membership_report(inst, out.clustering, *truth);
        int rc = 0;
        for (bool f : flags) rc += f;
        rec.recovered = rc;
        if (truth->k() == out.clustering.k())
            rec.mismatch = closeness(out.clustering, *truth, inst.n).mismatch;
    }
    return rec;
}

// Compare a set of solvers on one instance against ground truth.
inline std::vector<BenchRecord> run_compare(const std::string& instance_path,
                                            const std::string& truth_path,
                                            const std::vector<std::string>& algos,
                                            const ParamMap& params, std::uint64_t seed,
                                            int threads = 1, bool validate = true) {
    const Instance inst = load_instance(instance_path, validate);
    std::optional<Clustering> truth;
    if (!truth_path.empty()) truth = load_clustering(truth_path).clustering;
    std::vector<BenchRecord> out;
    for (const auto& algo : algos)
        out.push_back(bench_one(inst, instance_path, algo, params, truth, seed, threads));
    return out;
}

namespace detail {

// assert grammar: clause ('&' clause)*, clause = metric op value,
// metric in {cost, oracle_cost, ratio, recovered, mismatch, k}.
inline bool eval_assert(const BenchRecord& r, const std::string& expr, std::string* why) {
    std::size_t pos = 0;
    while (pos < expr.size()) {
        auto end = expr.find('&', pos);
        if (end == std::string::npos) end = expr.size();
        std::string clause = expr.substr(pos, end - pos);
        pos = end + 1;
        // trim
        const auto a = clause.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        const auto b = clause.find_last_not_of(" \t");
        clause = clause.substr(a, b - a + 1);

        static const char* ops[] = {"<=", ">=", "==", "!=", "<", ">"};
        std::size_t op_pos = std::string::npos;
        std::string op;
        for (const char* o : ops) {
            const auto p = clause.find(o);
            if (p != std::string::npos && p < op_pos) {
                op_pos = p;
                op = o;
            }
        }
        if (op.empty()) throw std::runtime_error("bad assert clause: " + clause);
        const std::string metric = clause.substr(0, op_pos);
        const double want = parse_double(clause.substr(op_pos + op.size()), "assert value");

        std::optional<double> have;
        if (metric == "cost") have = r.cost;
        else if (metric == "oracle_cost") have = r.oracle_cost;
        else if (metric == "ratio") have = r.ratio;
        else if (metric == "recovered") have = r.recovered ? std::optional<double>(*r.recovered)
                                                           : std::nullopt;
        else if (metric == "mismatch") have = r.mismatch ? std::optional<double>(double(*r.mismatch))
                                                         : std::nullopt;
        else if (metric == "k") have = double(r.k);
        else throw std::runtime_error("unknown assert metric: " + metric);

        if (!have) {
            if (why) *why = metric + " unavailable";
            return false;
        }
        bool ok;
        if (op == "<=") ok = *have <= want;
        else if (op == ">=") ok = *have >= want;
        else if (op == "==") ok = *have == want;
        else if (op == "!=") ok = *have != want;
        else if (op == "<") ok = *have < want;
        else ok = *have > want;
        if (!ok) {
            if (why) *why = clause + " (got " + format_double(*have) + ")";
            return false;
        }
    }
    return true;
}

inline GenSpec gen_spec_from_params(const std::string& kind, const ParamMap& p) {
    GenSpec spec;
    spec.seed = param_u(p, "seed", 0);
    spec.k = int(param_u(p, "k", 0));
    for (const auto& tok : split_ws(param_s(p, "sizes", "")))
        spec.sizes.push_back(int(parse_double(tok, "gen sizes")));
    spec.intra_radius = param_d(p, "r", 1.0);
    spec.separation = param_d(p, "sep", 10.0);
    if (p.count("asym")) {
        spec.asymmetry = Asymmetry::directed_skew;
        spec.skew = param_d(p, "asym", 3.0);
    }
    spec.noise = int(param_u(p, "noise", 0));
    spec.alpha = param_d(p, "alpha", 2.0);
    spec.eps = param_d(p, "eps", 0.0);
    if (p.count("certify")) spec.certify = param_u(p, "certify", 1) != 0;
    if (kind == "mixed" && spec.noise == 0) spec.noise = 4;
    return spec;
}

}  // namespace detail

struct SuiteResult {
    std::vector<BenchRecord> records;
    std::vector<std::string> failures;  // one message per failed assert
    bool all_passed = true;
};

// Manifest: CSV with header kind,input,algo,params,assert.
//   kind "gen":  input is "planted;key=val;..." or "mixed;..." (gen mini-spec)
//   kind "file": input is an instance path; ground truth at <input>.truth if present
// Rows run in order with their own seeds; the report CSV is written in
// manifest order. Wall time is the only nondeterministic column.
inline SuiteResult run_suite(const std::string& manifest_path, const std::string& out_path,
                             int threads = 1) {
    const auto rows = parse_csv(read_file(manifest_path));
    if (rows.empty() || rows[0] != std::vector<std::string>{"kind", "input", "algo", "params",
                                                            "assert"})
        throw std::runtime_error(manifest_path +
                                 ":1: manifest header must be kind,input,algo,params,assert");
    SuiteResult res;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string where = manifest_path + ":" + std::to_string(i + 1);
        if (row.size() != 5) throw std::runtime_error(where + ": expected 5 fields");
        const auto& [kind, input, algo, params_s, assert_s] = std::tie(
            row[0], row[1], row[2], row[3], row[4]);

        ParamMap params = parse_params(params_s);
        const std::uint64_t seed = detail::param_u(params, "seed", 0);
        BenchRecord rec;
        if (kind == "file") {
            const std::string truth = std::ifstream(input + ".truth") ? input + ".truth" : "";
            Instance inst = load_instance(input);
            std::optional<Clustering> tc;
            if (!truth.empty()) tc = load_clustering(truth).clustering;
            rec = bench_one(inst, input, algo, params, tc, seed, threads);
        } else if (kind == "gen") {
            const auto semi = input.find(';');
            const std::string gkind = input.substr(0, semi == std::string::npos ? input.size()
                                                                                : semi);
            ParamMap gp = semi == std::string::npos ? ParamMap{}
                                                    : parse_params(input.substr(semi + 1));
            GenSpec spec = detail::gen_spec_from_params(gkind, gp);
            PlantedInstance gen;
            if (gkind == "planted")
                gen = gen_planted(spec);
            else if (gkind == "mixed")
                gen = gen_mixed(spec);
            else
                throw std::runtime_error(where + ": unknown gen kind '" + gkind + "'");
            rec = bench_one(gen.instance, input, algo, params, gen.planted, seed, threads);
        } else {
            throw std::runtime_error(where + ": unknown kind '" + kind + "'");
        }

        std::string why;
        rec.assert_ok = assert_s.empty() || detail::eval_assert(rec, assert_s, &why);
        if (!rec.assert_ok) {
            res.all_passed = false;
            res.failures.push_back(where + ": assert failed: " + why);
        }
        res.records.push_back(std::move(rec));
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write report: " + out_path);
        out << kBenchHeader << "\n";
        for (const auto& r : res.records) out << bench_csv_row(r) << "\n";
    }
    return res;
}

}  // namespace stablecluster
