#include <random>

#include <gtest/gtest.h>

#include "mtvrp/convex.hpp"
#include "mtvrp/oracle.hpp"
#include "mtvrp/twgraph.hpp"
#include "test_util.hpp"

using namespace mtvrp;
using mtvrp::testing::make_instance;
using mtvrp::testing::static_target;

namespace {

struct ArcGen {
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> unit{0.0, 1.0};

    explicit ArcGen(std::uint64_t seed) : rng(seed) {}
    double u() { return unit(rng); }
    LinearArc make(double v_max, double t_lo, double t_span) {
        const double t0 = t_lo + t_span * u();
        const double t1 = t0 + 40.0 * u();
        const double speed = 0.5 * v_max * u();
        const double h = 6.283185307179586 * u();
        return {t0, t1, {100.0 * u() - 50.0, 100.0 * u() - 50.0},
                {speed * std::cos(h), speed * std::sin(h)}};
    }
    std::vector<LinearArc> sequence(int n, double v_max) {
        std::vector<LinearArc> arcs{{0.0, 0.0, {0, 0}, {0, 0}}};
        for (int k = 1; k < n; ++k) arcs.push_back(make(v_max, 20.0 * k, 60.0));
        return arcs;
    }
};

void expect_admissible(std::span<const LinearArc> arcs, const TrajOptResult& r, double v_max) {
    ASSERT_EQ(r.times.size(), arcs.size());
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        EXPECT_GE(r.times[k], arcs[k].start_time - 1e-9);
        EXPECT_LE(r.times[k], arcs[k].end_time + 1e-9);
        if (k > 0) {
            EXPECT_LE(norm(r.positions[k] - r.positions[k - 1]),
                      v_max * (r.times[k] - r.times[k - 1]) + 1e-6);
        }
    }
}

}  // namespace

TEST(TourCost, OutAndBack) {
    const auto g = TwGraph::build(make_instance({static_target(1, {3, 4}, {{0, 100}})}), 4);
    const std::vector<int> seq{0, 1, 0};
    const auto r = tour_cost(g, seq);
    EXPECT_NEAR(r.cost, 10.0, 1e-9);
    EXPECT_GE(r.times[1], 5.0 - 1e-9);  // any later interception costs the same
}

TEST(TourCost, UnreachableWindowIsInfinite) {
    const auto inst = make_instance({static_target(1, {30, 40}, {{0, 10}, {60, 70}})});
    const auto g = TwGraph::build(inst, 4);
    const std::vector<int> seq{0, 1, 0};  // first window closes before arrival
    EXPECT_EQ(tour_cost(g, seq).cost, kInf);
    const std::vector<int> later{0, 2, 0};
    EXPECT_NEAR(tour_cost(g, later).cost, 100.0, 1e-9);
}

TEST(TourCost, WaitingIsFree) {
    // Second target only opens late; the agent waits, which costs nothing.
    const auto inst = make_instance(
        {static_target(1, {10, 0}, {{0, 100}}), static_target(2, {10, 10}, {{200, 210}})});
    const auto g = TwGraph::build(inst, 4);
    const std::vector<int> seq{0, 1, 2, 0};
    EXPECT_NEAR(tour_cost(g, seq).cost, 10.0 + 10.0 + std::sqrt(200.0), 1e-9);
}

TEST(TourCost, MatchesGridBracket) {
    ArcGen gen(11);
    int feasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const double v_max = 1.0;
        const auto arcs = gen.sequence(2 + trial % 3, v_max);
        const auto r = optimize_trajectory(arcs, v_max);
        const auto grid = oracle::grid_tour_cost(arcs, v_max, 200);
        if (!r.feasible()) {
            EXPECT_EQ(grid.upper, kInf) << trial;
            continue;
        }
        ++feasible;
        expect_admissible(arcs, r, v_max);
        const double tol = 1e-7 * (1.0 + r.cost);
        EXPECT_LE(r.cost, grid.upper + tol) << trial;
        EXPECT_GE(r.cost, grid.lower - tol) << trial;
    }
    EXPECT_GT(feasible, 100);
}

TEST(TourCost, MinimumFinalTimeIsEarliestChain) {
    ArcGen gen(12);
    for (int trial = 0; trial < 200; ++trial) {
        const auto arcs = gen.sequence(2 + trial % 4, 1.0);
        const auto e = earliest_times(arcs, 1.0);
        const auto r = optimize_trajectory(arcs, 1.0, TrajObjective::FinalTime);
        if (!(e.back() < kInf)) {
            EXPECT_FALSE(r.feasible());
            continue;
        }
        EXPECT_NEAR(r.cost, e.back(), 1e-7 * (1.0 + e.back())) << trial;
    }
}

TEST(TourCost, ExtendingNeverCheapens) {
    ArcGen gen(13);
    for (int trial = 0; trial < 100; ++trial) {
        const auto arcs = gen.sequence(5, 1.0);
        double prev = 0.0;
        for (std::size_t n = 1; n <= arcs.size(); ++n) {
            const auto r = optimize_trajectory(std::span(arcs).first(n), 1.0);
            if (!r.feasible()) break;
            EXPECT_GE(r.cost, prev - 1e-7 * (1.0 + prev));
            prev = r.cost;
        }
    }
}

TEST(SegmentDistance, StaticEndpointsGiveEuclidean) {
    const LinearArc a{0, 10, {0, 0}, {0, 0}};
    const LinearArc b{0, 100, {3, 4}, {0, 0}};
    EXPECT_NEAR(segment_distance(a, b, 1.0), 5.0, 1e-9);
}

TEST(SegmentDistance, TargetEndsBeforeSourceStarts) {
    const LinearArc a{50, 60, {0, 0}, {0, 0}};
    const LinearArc b{0, 10, {3, 4}, {0, 0}};
    EXPECT_EQ(segment_distance(a, b, 1.0), kInf);
}

TEST(SegmentDistance, CrossingTubesGiveZero) {
    // Both pass through (5, 0) at time 5.
    const LinearArc a{0, 10, {0, 0}, {1, 0}};
    const LinearArc b{0, 10, {5, -5}, {0, 1}};
    EXPECT_NEAR(segment_distance(a, b, 1.0), 0.0, 1e-7);
}

TEST(SegmentDistance, MatchesTwoNodeTrajectory) {
    ArcGen gen(14);
    for (int trial = 0; trial < 500; ++trial) {
        const LinearArc a = gen.make(1.0, 0.0, 60.0);
        const LinearArc b = gen.make(1.0, 0.0, 100.0);
        const std::vector<LinearArc> arcs{a, b};
        const double d = segment_distance(a, b, 1.0);
        const auto r = optimize_trajectory(arcs, 1.0);
        if (!r.feasible()) {
            EXPECT_EQ(d, kInf) << trial;
            continue;
        }
        EXPECT_NEAR(d, r.cost, 1e-6 * (1.0 + r.cost)) << trial;
    }
}

TEST(ReducedCost, Arithmetic) {
    const auto inst = make_instance(
        {static_target(1, {1, 0}, {{0, 100}}), static_target(2, {2, 0}, {{0, 100}})});
    const auto g = TwGraph::build(inst, 2);
    const std::vector<int> seq{0, 1, 2, 0};
    Duals duals{-1.0, {0.0, 3.0, 4.0}};
    EXPECT_DOUBLE_EQ(reduced_cost(10.0, g, seq, duals), 4.0);
    Duals zero{0.0, {0.0, 0.0, 0.0}};
    EXPECT_DOUBLE_EQ(reduced_cost(10.0, g, seq, zero), 10.0);
}

TEST(BuildSolution, VerifiesAgainstInstance) {
    const auto inst = make_instance(
        {static_target(1, {10, 0}, {{0, 100}}), static_target(2, {10, 10}, {{5, 210}})});
    const auto g = TwGraph::build(inst, 4);
    const auto sol = build_solution(g, {{0, 1, 2, 0}});
    const auto rep = verify(inst, sol);
    EXPECT_TRUE(rep.ok()) << (rep.violations.empty() ? "" : rep.violations[0]);
}
