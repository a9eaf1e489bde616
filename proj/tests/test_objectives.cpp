#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "stablecluster/objectives.hpp"

using namespace stablecluster;

TEST_CASE("voronoi assignment and costs") {
    SECTION("all points as centers costs zero for every objective") {
        for (auto obj : {Objective::k_median, Objective::k_means, Objective::k_center}) {
            auto inst = testutil::line_instance({0, 1, 3, 8}, 4);
            inst.objective = obj;
            const auto c = voronoi(inst, {0, 1, 2, 3});
            CHECK(c.cost == 0.0);
            for (int p = 0; p < 4; ++p) CHECK(c.centers[c.assign[p]] == p);
        }
    }
    SECTION("one-center k-median on a line") {
        auto inst = testutil::line_instance({0, 1, 3}, 1);
        inst.objective = Objective::k_median;
        CHECK(voronoi(inst, {1}).cost == 3.0);  // 1 + 0 + 2
    }
    SECTION("exact ties go to the lowest center position") {
        auto inst = testutil::line_instance({0, 2, 1}, 2);
        const auto c = voronoi(inst, {0, 1});  // point 2 is equidistant
        CHECK(c.assign[2] == 0);
        const auto c2 = voronoi(inst, {1, 0});
        CHECK(c2.assign[2] == 0);  // still position 0, now center index 1
    }
    SECTION("duplicate centers are rejected") {
        auto inst = testutil::line_instance({0, 1, 3}, 2);
        CHECK_THROWS(voronoi(inst, {1, 1}));
        CHECK_THROWS(voronoi(inst, {}));
    }
    SECTION("cost recomputation is bit-stable") {
        const auto inst = testutil::random_euclidean(10, 3, 3);
        const auto c = voronoi(inst, {0, 4, 7});
        CHECK(clustering_cost(inst, c.centers, c.assign) == c.cost);
        CHECK(evaluate_objective(inst, c).value == c.cost);
    }
}

TEST_CASE("exact solver on hand-checked instances") {
    SECTION("n = k costs zero") {
        const auto inst = testutil::line_instance({0, 5, 9}, 3);
        CHECK(exact_solve(inst).best.cost == 0.0);
    }
    SECTION("four points on a line, k-center") {
        const auto inst = testutil::line_instance({0, 1, 10, 11}, 2);
        const auto r = exact_solve(inst);
        CHECK(r.best.cost == 1.0);
        CHECK(r.best.centers == std::vector<int>{0, 2});  // lex-least among ties
        CHECK(r.optimal_center_sets.size() == 4);          // {0,2},{0,3},{1,2},{1,3}
        CHECK(r.unique_partition);                         // all induce {01|23}
    }
    SECTION("oracle guard rejects huge enumerations") {
        Instance inst = testutil::random_euclidean(30, 15, 1);
        CHECK_THROWS_WITH(exact_solve(inst), Catch::Matchers::ContainsSubstring("guard"));
    }
}

TEST_CASE("exact cost lower-bounds every explicit center set") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        for (auto obj : {Objective::k_median, Objective::k_means, Objective::k_center}) {
            const int n = 8 + int(seed % 5);
            auto inst = testutil::random_euclidean(n, 3, 900 + seed, obj);
            const double opt = exact_solve(inst).best.cost;
            SplitMix64 rng(seed);
            for (int trial = 0; trial < 200; ++trial) {
                std::vector<int> centers;
                while (int(centers.size()) < 3) {
                    int c = int(rng.below(std::uint64_t(n)));
                    if (std::find(centers.begin(), centers.end(), c) == centers.end())
                        centers.push_back(c);
                }
                CHECK(opt <= voronoi(inst, centers).cost + cmp_tol(opt, opt));
            }
        }
    }
}

TEST_CASE("radius candidates") {
    SECTION("two points") {
        const auto inst = testutil::line_instance({0, 5}, 1);
        CHECK(opt_radius_candidates(inst) == std::vector<double>{0, 5});
    }
    SECTION("all identical points") {
        const auto inst = testutil::matrix_instance(3, 1, {0, 0, 0, 0, 0, 0, 0, 0, 0});
        CHECK(opt_radius_candidates(inst) == std::vector<double>{0});
    }
    SECTION("k-center optimum is always a candidate") {
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            const auto inst = testutil::random_euclidean(8, 2, 50 + seed);
            const double opt = exact_solve(inst).best.cost;
            const auto cands = opt_radius_candidates(inst);
            CHECK(std::find(cands.begin(), cands.end(), opt) != cands.end());
        }
    }
}

TEST_CASE("scaling distances scales costs and preserves the argmin") {
    const double lambda = 3.0;
    for (auto obj : {Objective::k_median, Objective::k_means, Objective::k_center}) {
        auto inst = testutil::random_euclidean(9, 2, 11, obj);
        auto scaled = inst;
        for (auto& v : scaled.dist.v) v *= lambda;
        const auto a = exact_solve(inst);
        const auto b = exact_solve(scaled);
        const double factor = obj == Objective::k_means ? lambda * lambda : lambda;
        CHECK(b.best.cost == Catch::Approx(factor * a.best.cost));
        CHECK(a.best.centers == b.best.centers);
    }
}

TEST_CASE("exact solver parallel chunks agree with single-threaded") {
    const auto inst = testutil::random_euclidean(12, 3, 21);
    const auto a = exact_solve(inst, 1);
    const auto b = exact_solve(inst, 4);
    CHECK(a.best.cost == b.best.cost);
    CHECK(a.best.centers == b.best.centers);
    CHECK(a.optimal_center_sets == b.optimal_center_sets);
    CHECK(a.unique_partition == b.unique_partition);
}
