// stablecluster: generators, solvers, and stability probes for center-based
// clustering under perturbation resilience.

#include <CLI11.hpp>
#include <iostream>

#include "stablecluster/harness.hpp"

using namespace stablecluster;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    int threads = 1;
    bool no_validate = false;
};

std::string verdict_csv(ProbeVerdict v) { return verdict_name(v); }

int cmd_gen(const std::string& kind, const GenSpec& spec_in, const std::string& in_path,
            double alpha, double eps, const std::string& out_path) {
    if (kind == "embed") {
        if (in_path.empty()) throw std::runtime_error("gen --kind embed requires --in");
        const Instance inst = load_instance(in_path);
        auto e = embed_approx_stable(inst, alpha, eps);
        save_instance(e.instance, out_path);
        std::cout << "embedded: n=" << e.instance.n << " k=" << e.k_prime
                  << " added=" << e.added << " -> " << out_path << "\n";
        return 0;
    }
    GenSpec spec = spec_in;
    PlantedInstance p;
    if (kind == "planted")
        p = gen_planted(spec);
    else if (kind == "mixed")
        p = gen_mixed(spec);
    else
        throw std::runtime_error("unknown gen kind: " + kind);

    save_instance(p.instance, out_path);
    std::string flags, ambig;
    for (std::size_t i = 0; i < p.stable_flags.size(); ++i) {
        flags += (i ? " " : "") + std::string(p.stable_flags[i] ? "1" : "0");
        ambig += (i ? " " : "") + std::string(p.center_ambiguous[i] ? "1" : "0");
    }
    save_clustering(p.planted, out_path + ".truth",
                    {{"flags", flags},
                     {"center_ambiguous", ambig},
                     {"rstar", detail::format_double(p.r_star)},
                     {"certified", p.certified ? "1" : "0"},
                     {"degenerate", p.degenerate ? "1" : "0"}});
    std::cout << "generated: n=" << p.instance.n << " k=" << p.instance.k
              << " rstar=" << detail::format_double(p.r_star)
              << " certified=" << p.certified << " -> " << out_path << "\n";
    return 0;
}

int cmd_solve(const GlobalOpts& g, const std::string& in_path, const std::string& algo,
              const ParamMap& params, const std::string& out_path,
              const std::string& trace_path) {
    Instance inst = load_instance(in_path, !g.no_validate);
    if (params.count("objective")) {
        auto o = parse_objective(params.at("objective"));
        if (!o) throw std::runtime_error("unknown objective: " + params.at("objective"));
        inst = with_objective(inst, *o);
    } else {
        inst = with_objective(inst, default_objective_for(algo, inst));
    }

    if (!trace_path.empty() && algo == "local-search") {
        LocalSearchConfig cfg;
        cfg.epsilon = detail::param_d(params, "epsilon", 0.2);
        cfg.t = int(detail::param_u(params, "t", 0));
        cfg.seed = g.seed;
        auto r = local_search(inst, cfg);
        std::ofstream tr(trace_path);
        tr << "iteration,cost,swap\n";
        for (const auto& s : r.trace) {
            std::string swap = "out:";
            for (std::size_t i = 0; i < s.removed.size(); ++i)
                swap += (i ? " " : "") + std::to_string(s.removed[i]);
            swap += "->in:";
            for (std::size_t i = 0; i < s.added.size(); ++i)
                swap += (i ? " " : "") + std::to_string(s.added[i]);
            tr << csv_row({std::to_string(s.iteration), detail::format_double(s.new_cost), swap})
               << "\n";
        }
        if (!out_path.empty()) save_clustering(r.clustering, out_path);
        std::cout << "cost: " << detail::format_double(r.clustering.cost)
                  << " swaps: " << r.trace.size() << " converged: " << r.converged << "\n";
        return 0;
    }

    auto out = run_algo(inst, algo, params, g.seed, g.threads);
    if (!out_path.empty()) save_clustering(out.clustering, out_path, out.meta);
    std::cout << "cost: " << detail::format_double(out.clustering.cost);
    for (const auto& [k, v] : out.meta) std::cout << " " << k << ": " << v;
    std::cout << "\n";
    return 0;
}

int cmd_probe(const GlobalOpts& g, const std::string& in_path, const std::string& check,
              double alpha, double eps, int beta, double gamma,
              const std::string& clustering_path, int samples, const std::string& out_path) {
    const Instance inst = load_instance(in_path, !g.no_validate);
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot write " + out_path);
        os = &file;
    }

    if (check == "hits" || check == "uniform-approx") {
        std::vector<int> centers;
        if (!clustering_path.empty()) {
            centers = load_clustering(clustering_path).clustering.centers;
        } else {
            centers = exact_solve(inst, g.threads).best.centers;
        }
        if (check == "hits") {
            const double rs = detail::kcenter_r_star(inst);
            const bool ok = check_hits(inst, centers, beta, gamma, rs);
            *os << "hits,beta,gamma,rstar\n"
                << (ok ? 1 : 0) << "," << beta << "," << detail::format_double(gamma) << ","
                << detail::format_double(rs) << "\n";
            return 0;
        }
        UniformApproxMode mode;
        if (samples > 0) {
            mode.exhaustive = false;
            mode.samples = samples;
            mode.seed = g.seed;
        }
        const auto rep = check_uniform_approx_condition(inst, centers, alpha, mode);
        *os << "holds,tested\n" << (rep.holds ? 1 : 0) << "," << rep.tested << "\n";
        return 0;
    }

    const bool want_probe = check == "lpr" || check == "lpr-eps";
    const double probe_eps = check == "lpr-eps" ? eps : -1.0;
    StabilityReport rep;
    if (want_probe || check == "all") {
        rep = stability_report(inst, alpha, probe_eps);
    } else {
        // detector-only checks skip the (more expensive) probes
        const auto base = exact_solve(inst, g.threads);
        rep.degenerate = !base.unique_partition;
        rep.opt = base.best;
        rep.r_star = inst.objective == Objective::k_center ||
                             inst.objective == Objective::asym_k_center
                         ? base.best.cost
                         : detail::kcenter_r_star(inst);
        rep.clusters.resize(rep.opt.k());
        const ThresholdDigraph dg = threshold_digraph(inst, rep.r_star);
        HopMetric hm(inst, dg);
        const Bitset ccvs = ccv_set(dg);
        for (int i = 0; i < rep.opt.k(); ++i) {
            rep.clusters[i].ccv_center = ccvs.test(rep.opt.centers[i]);
            rep.clusters[i].ccv_proximity =
                satisfies_ccv_proximity(dg, rep.opt.centers[i], hm, ccvs);
            rep.clusters[i].center_separation =
                satisfies_center_separation(inst, rep.opt, i, rep.r_star);
        }
        const auto ccc = detect_ccc(inst, rep.opt, std::max(eps, 0.0), rep.r_star);
        for (auto [i, j] : ccc.ccc) rep.clusters[j].ccc_witnesses.push_back(i);
        for (auto [i, j, l] : ccc.ccc2) rep.clusters[j].ccc2_witnesses.push_back({i, l});
    }

    *os << "cluster,center,ccv,ccv_proximity,center_separation,ccc_by,ccc2_by,lpr,slpr,"
           "degenerate\n";
    int witness_idx = 0;
    for (int i = 0; i < int(rep.clusters.size()); ++i) {
        const auto& c = rep.clusters[i];
        std::string ccc_by, ccc2_by;
        for (std::size_t j = 0; j < c.ccc_witnesses.size(); ++j)
            ccc_by += (j ? "|" : "") + std::to_string(c.ccc_witnesses[j]);
        for (std::size_t j = 0; j < c.ccc2_witnesses.size(); ++j)
            ccc2_by += (j ? "|" : "") + std::to_string(c.ccc2_witnesses[j].first) + ":" +
                       std::to_string(c.ccc2_witnesses[j].second);
        *os << csv_row({std::to_string(i), std::to_string(rep.opt.centers[i]),
                        c.ccv_center ? "1" : "0", c.ccv_proximity ? "1" : "0",
                        c.center_separation ? "1" : "0", ccc_by, ccc2_by,
                        want_probe ? verdict_csv(c.lpr) : "",
                        want_probe ? verdict_csv(c.slpr) : "", rep.degenerate ? "1" : "0"})
            << "\n";
        if (c.lpr_witness && !out_path.empty()) {
            const std::string wpath =
                out_path + ".witness" + std::to_string(witness_idx++) + ".inst";
            save_instance(perturbed_instance(inst, *c.lpr_witness), wpath);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"center-based clustering under local perturbation resilience"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--seed", g.seed, "seed for all randomized choices (default 0)");
    app.add_option("--threads", g.threads, "worker threads for the exact oracle");
    app.add_flag("--no-validate", g.no_validate, "skip triangle-inequality validation on load");

    // gen
    auto* gen = app.add_subcommand("gen", "generate planted/mixed/embedded instances");
    std::string gen_kind = "planted", gen_out, gen_in;
    GenSpec spec;
    double embed_alpha = 2.0, embed_eps = 0.5;
    gen->add_option("--kind", gen_kind, "planted|mixed|embed")->required();
    gen->add_option("--k", spec.k, "stable cluster count");
    gen->add_option("--sizes", spec.sizes, "per-cluster sizes");
    gen->add_option("--r", spec.intra_radius, "intra-cluster radius");
    gen->add_option("--sep", spec.separation, "separation factor (cross > sep*r)");
    double asym_skew = 0;
    gen->add_option("--asym", asym_skew, "asymmetric skew factor (enables directed mode)");
    gen->add_option("--noise", spec.noise, "ambiguous clump size for mixed instances");
    gen->add_option("--alpha", embed_alpha, "stability level / embedding alpha");
    gen->add_option("--eps", embed_eps, "eps for (alpha,eps) certification or embedding");
    bool no_certify = false;
    gen->add_flag("--no-certify", no_certify, "skip oracle verification and probes");
    gen->add_option("--in", gen_in, "input instance (embed only)");
    gen->add_option("-o,--out", gen_out, "output instance path")->required();

    // solve
    auto* solve = app.add_subcommand("solve", "run a solver on an instance");
    std::string s_in, s_algo, s_out, s_trace, s_params;
    double s_epsilon = -1, s_r = -1, s_t = -1;
    std::string s_init, s_objective;
    solve->add_option("--in", s_in, "instance file")->required();
    solve->add_option("--algo", s_algo,
                      "local-search|kcenter-greedy|kcenter-robust|asym-kcenter|"
                      "asym-kcenter-robust|exact")
        ->required();
    solve->add_option("--epsilon", s_epsilon, "local search epsilon");
    solve->add_option("--t", s_t, "local search swap size (default ceil(1/epsilon))");
    solve->add_option("--init", s_init, "first-k|random|farthest-first");
    solve->add_option("--r", s_r, "fixed radius guess (skips the radius search)");
    solve->add_option("--objective", s_objective, "k-median|k-means|k-center|asymmetric-k-center");
    solve->add_option("--trace", s_trace, "write accepted-swap trace CSV (local-search)");
    solve->add_option("-o,--out", s_out, "output clustering file");

    // exact
    auto* exact = app.add_subcommand("exact", "exhaustive optimal solver");
    std::string e_in, e_out, e_objective;
    exact->add_option("--in", e_in, "instance file")->required();
    exact->add_option("--objective", e_objective, "objective override");
    exact->add_option("-o,--out", e_out, "output clustering file");

    // probe
    auto* probe = app.add_subcommand("probe", "stability detectors and refutation probes");
    std::string p_in, p_check, p_clustering, p_out;
    double p_alpha = 2.0, p_eps = 0.1, p_gamma = 3.0;
    int p_beta = 3, p_samples = 0;
    probe->add_option("--in", p_in, "instance file")->required();
    probe->add_option("--check", p_check,
                      "ccv|ccv-proximity|center-separation|ccc|lpr|lpr-eps|hits|uniform-approx|all")
        ->required();
    probe->add_option("--alpha", p_alpha, "perturbation factor");
    probe->add_option("--eps", p_eps, "eps for lpr-eps / ccc");
    probe->add_option("--beta", p_beta, "hits: required count");
    probe->add_option("--gamma", p_gamma, "hits: radius factor");
    probe->add_option("--clustering", p_clustering, "center set for hits/uniform-approx");
    probe->add_option("--samples", p_samples, "uniform-approx: sampled mode");
    probe->add_option("-o,--out", p_out, "report CSV path (witnesses saved alongside)");

    // compare
    auto* compare = app.add_subcommand("compare", "run several solvers against ground truth");
    std::string c_in, c_truth, c_algos, c_params, c_out;
    compare->add_option("--in", c_in, "instance file")->required();
    compare->add_option("--truth", c_truth, "ground-truth clustering file");
    compare->add_option("--algos", c_algos, "comma-separated solver list")->required();
    compare->add_option("--params", c_params, "shared params key=val;key=val");
    compare->add_option("-o,--out", c_out, "report CSV path");

    // bench
    auto* bench = app.add_subcommand("bench", "run a manifest of benchmark rows");
    std::string b_manifest, b_out;
    bench->add_option("--manifest", b_manifest, "manifest CSV")->required();
    bench->add_option("-o,--out", b_out, "report CSV path");

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            if (asym_skew > 0) {
                spec.asymmetry = Asymmetry::directed_skew;
                spec.skew = asym_skew;
            }
            spec.seed = g.seed;
            spec.alpha = embed_alpha;
            spec.eps = gen_kind == "embed" ? 0.0 : embed_eps;
            spec.certify = !no_certify;
            if (gen_kind != "embed" && !gen->count("--eps")) spec.eps = 0.0;
            return cmd_gen(gen_kind, spec, gen_in, embed_alpha, embed_eps, gen_out);
        }
        if (solve->parsed()) {
            ParamMap params;
            if (s_epsilon >= 0) params["epsilon"] = detail::format_double(s_epsilon);
            if (s_t >= 0) params["t"] = detail::format_double(s_t);
            if (!s_init.empty()) params["init"] = s_init;
            if (s_r >= 0) params["r"] = detail::format_double(s_r);
            if (!s_objective.empty()) params["objective"] = s_objective;
            return cmd_solve(g, s_in, s_algo, params, s_out, s_trace);
        }
        if (exact->parsed()) {
            ParamMap params;
            if (!e_objective.empty()) params["objective"] = e_objective;
            return cmd_solve(g, e_in, "exact", params, e_out, "");
        }
        if (probe->parsed())
            return cmd_probe(g, p_in, p_check, p_alpha, p_eps, p_beta, p_gamma, p_clustering,
                             p_samples, p_out);
        if (compare->parsed()) {
            std::vector<std::string> algos;
            std::size_t pos = 0;
            while (pos <= c_algos.size()) {
                auto end = c_algos.find(',', pos);
                if (end == std::string::npos) end = c_algos.size();
                if (end > pos) algos.push_back(c_algos.substr(pos, end - pos));
                pos = end + 1;
            }
            const auto recs = run_compare(c_in, c_truth, algos, parse_params(c_params), g.seed,
                                          g.threads, !g.no_validate);
            std::ostream* os = &std::cout;
            std::ofstream file;
            if (!c_out.empty()) {
                file.open(c_out);
                os = &file;
            }
            *os << kBenchHeader << "\n";
            for (const auto& r : recs) *os << bench_csv_row(r) << "\n";
            return 0;
        }
        if (bench->parsed()) {
            const auto res = run_suite(b_manifest, b_out, g.threads);
            for (const auto& f : res.failures) std::cerr << f << "\n";
            std::cout << res.records.size() << " rows, "
                      << (res.all_passed ? "all assertions passed" : "ASSERTION FAILURES")
                      << "\n";
            return res.all_passed ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
