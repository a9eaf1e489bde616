#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "helpers.hpp"
#include "stablecluster/generator.hpp"
#include "stablecluster/kcenter_asym.hpp"
#include "stablecluster/kcenter_sym.hpp"

using namespace stablecluster;

TEST_CASE("planted generation is reproducible bit-for-bit") {
    GenSpec spec;
    spec.k = 3;
    spec.sizes = {4, 4, 4};
    spec.seed = 123;
    const auto a = gen_planted(spec);
    const auto b = gen_planted(spec);
    CHECK(a.instance.dist.v == b.instance.dist.v);
    CHECK(a.planted.centers == b.planted.centers);
    CHECK(a.planted.assign == b.planted.assign);
    CHECK(a.r_star == b.r_star);

    GenSpec other = spec;
    other.seed = 124;
    const auto c = gen_planted(other);
    CHECK(a.instance.dist.v != c.instance.dist.v);
}

TEST_CASE("planted instances validate and match the oracle") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        for (auto asym : {Asymmetry::none, Asymmetry::directed_skew}) {
            GenSpec spec;
            spec.k = 3;
            spec.sizes = {4, 3, 5};
            spec.seed = 500 + seed;
            spec.asymmetry = asym;
            const auto p = gen_planted(spec);
            REQUIRE(p.certified);
            CHECK_NOTHROW(validate_instance(p.instance));
            CHECK(p.r_star == spec.intra_radius);  // pinned extreme
            const auto oracle = exact_solve(p.instance);
            CHECK(oracle.best.cost == p.r_star);
            CHECK(canonical_partition(oracle.best) == canonical_partition(p.planted));
            for (int c = 0; c < spec.k; ++c) CHECK(p.stable_flags[c]);
        }
    }
}

TEST_CASE("generated files round trip exactly") {
    GenSpec spec;
    spec.k = 2;
    spec.sizes = {4, 4};
    spec.seed = 3;
    const auto p = gen_planted(spec);
    const auto path = (std::filesystem::temp_directory_path() / "gen_rt.inst").string();
    save_instance(p.instance, path);
    const auto back = load_instance(path);
    CHECK(back.dist.v == p.instance.dist.v);
}

TEST_CASE("generator rejects bad specs") {
    GenSpec spec;
    spec.k = 2;
    spec.sizes = {3, 3};

    SECTION("separation must exceed 2") {
        spec.separation = 1.5;
        CHECK_THROWS(gen_planted(spec));
    }
    SECTION("sizes must match k") {
        spec.sizes = {3};
        CHECK_THROWS(gen_planted(spec));
    }
    SECTION("cluster sizes must clear the 2 eps n bound") {
        spec.eps = 0.4;  // 2*eps*n = 4.8 > 3
        CHECK_THROWS_WITH(gen_planted(spec), Catch::Matchers::ContainsSubstring("2*eps*n"));
    }
}

TEST_CASE("tight separation requests escalate until the probe passes") {
    GenSpec spec;
    spec.k = 2;
    spec.sizes = {4, 4};
    spec.seed = 2;
    spec.separation = 2.01;
    spec.alpha = 2.0;
    const auto p = gen_planted(spec);  // may retry internally with larger separation
    REQUIRE(p.certified);
    for (int c = 0; c < spec.k; ++c) CHECK(p.stable_flags[c]);
}

TEST_CASE("mixed instances flag the ambiguous clump") {
    for (auto asym : {Asymmetry::none, Asymmetry::directed_skew}) {
        GenSpec spec;
        spec.k = 2;
        spec.sizes = {4, 4};
        spec.seed = 31;
        spec.noise = 5;
        spec.asymmetry = asym;
        const auto p = gen_mixed(spec);
        REQUIRE(p.certified);
        CHECK(p.instance.k == 3);
        CHECK(p.stable_flags == std::vector<bool>{true, true, false});
        CHECK(p.center_ambiguous == std::vector<bool>{false, false, true});
        CHECK(!p.degenerate);  // center choice varies, the partition does not
    }
}

TEST_CASE("noise zero reduces gen_mixed to gen_planted") {
    GenSpec spec;
    spec.k = 2;
    spec.sizes = {3, 3};
    spec.seed = 4;
    spec.noise = 0;
    const auto a = gen_mixed(spec);
    const auto b = gen_planted(spec);
    CHECK(a.instance.dist.v == b.instance.dist.v);
}

TEST_CASE("robust solvers recover every stable cluster on mixed output") {
    GenSpec spec;
    spec.k = 3;
    spec.sizes = {4, 4, 4};
    spec.seed = 8;
    spec.noise = 4;
    const auto p = gen_mixed(spec);
    REQUIRE(p.certified);
    const auto res = solve_robust_kcenter(p.instance);
    auto groups = clusters_of(p.planted);
    for (int c = 0; c < spec.k; ++c) {
        std::sort(groups[c].begin(), groups[c].end());
        CHECK(contains_cluster_verbatim(res.clustering, groups[c]));
    }
}

TEST_CASE("approximation-stability embedding") {
    SECTION("arithmetic of the added points") {
        const auto inst = testutil::random_euclidean(4, 2, 1, Objective::k_median);
        const auto e = embed_approx_stable(inst, 1.0, 0.5);
        CHECK(e.added == 8);
        CHECK(e.k_prime == 10);
        CHECK(e.instance.n == 12);
        CHECK_NOTHROW(validate_instance(e.instance));
    }
    SECTION("optimal cost is preserved exactly") {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            auto inst = testutil::random_euclidean(5, 2, 40 + seed, Objective::k_median);
            const double before = exact_solve(inst).best.cost;
            const auto e = embed_approx_stable(inst, 2.0, 1.0);
            const double after = exact_solve(e.instance).best.cost;
            CHECK(after == before);
        }
    }
    SECTION("alpha-approximations must open all added points") {
        auto inst = testutil::random_euclidean(4, 2, 9, Objective::k_median);
        const double alpha = 2.0;
        const auto e = embed_approx_stable(inst, alpha, 1.0);
        const auto base = exact_solve(e.instance);
        const double bound = alpha * base.best.cost;
        // enumerate all center subsets within the alpha bound
        std::vector<int> sub(e.instance.k);
        for (int i = 0; i < e.instance.k; ++i) sub[i] = i;
        do {
            if (voronoi(e.instance, sub).cost <= bound + cmp_tol(bound, bound)) {
                for (int a = inst.n; a < e.instance.n; ++a)
                    CHECK(std::find(sub.begin(), sub.end(), a) != sub.end());
            }
        } while (next_combination(sub, e.instance.n));
    }
    SECTION("asymmetric inputs are rejected") {
        const auto inst = testutil::random_asymmetric(4, 2, 2);
        CHECK_THROWS(embed_approx_stable(inst, 2.0, 0.5));
    }
}
