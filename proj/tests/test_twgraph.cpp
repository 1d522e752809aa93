#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "mtvrp/convex.hpp"
#include "mtvrp/twgraph.hpp"
#include "test_util.hpp"

using namespace mtvrp;
using mtvrp::testing::make_instance;
using mtvrp::testing::small_random;
using mtvrp::testing::static_target;

TEST(AllocateSegments, ProportionalSplit) {
    const auto t = static_target(1, {0, 0}, {{0, 30}, {40, 60}});
    EXPECT_EQ(allocate_segments(t, 10), (std::vector<int>{6, 4}));
}

TEST(AllocateSegments, SingleWindow) {
    EXPECT_EQ(allocate_segments(static_target(1, {0, 0}, {{0, 30}}), 8), (std::vector<int>{8}));
}

TEST(AllocateSegments, ClampKeepsOneSegment) {
    const auto t = static_target(1, {0, 0}, {{0, 49}, {50, 51}});
    EXPECT_EQ(allocate_segments(t, 4), (std::vector<int>{3, 1}));
}

TEST(AllocateSegments, TiesGoToLowestIndex) {
    const auto t = static_target(1, {0, 0}, {{0, 10}, {20, 30}, {40, 50}});
    EXPECT_EQ(allocate_segments(t, 10), (std::vector<int>{4, 3, 3}));
}

TEST(AllocateSegments, CountsSumToMaxOfBudgetAndWindows) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 30.0);
    for (int trial = 0; trial < 500; ++trial) {
        const int nw = 1 + trial % 5;
        std::vector<std::pair<double, double>> w;
        double t = 0.0;
        for (int j = 0; j < nw; ++j) {
            const double len = u(rng);
            w.emplace_back(t, t + len);
            t += len + 1.0;
        }
        const int budget = 1 + trial % 40;
        const auto c = allocate_segments(static_target(1, {0, 0}, w), budget);
        int sum = 0;
        for (int x : c) {
            EXPECT_GE(x, 1);
            sum += x;
        }
        EXPECT_EQ(sum, std::max(budget, nw));
    }
}

TEST(TwGraphBuild, SegmentsPartitionWindows) {
    const auto g = TwGraph::build(small_random(3, 5), 8);
    EXPECT_EQ(g.tw(0).target, 0);
    EXPECT_EQ(g.tw(0).n_segments(), 1);
    for (const auto& tw : g.tws()) {
        EXPECT_EQ(g.segment(tw.seg_begin).t0, tw.arc.start_time);
        EXPECT_EQ(g.segment(tw.seg_end - 1).t1, tw.arc.end_time);
        for (int s = tw.seg_begin; s < tw.seg_end; ++s) {
            const auto& seg = g.segment(s);
            if (s + 1 < tw.seg_end) EXPECT_EQ(seg.t1, g.segment(s + 1).t0);
            EXPECT_NEAR(seg.spatial_length, tw.arc.speed() * (seg.t1 - seg.t0), 1e-12);
            EXPECT_EQ(g.segment_of(seg.tw, seg.t0), s);
        }
        EXPECT_EQ(g.segment_of(&tw - g.tws().data(), tw.arc.end_time), tw.seg_end - 1);
    }
}

TEST(TwGraphBuild, StaticPairTablesAreEuclidean) {
    const auto inst = make_instance(
        {static_target(1, {3, 4}, {{0, 100}}), static_target(2, {6, 8}, {{0, 100}})});
    const auto g = TwGraph::build(inst, 1);
    const int s1 = g.tw(1).seg_begin;
    const int s2 = g.tw(2).seg_begin;
    EXPECT_NEAR(g.c_seg(s1, s2), 5.0, 1e-9);
    // Both segment starts are at time 0, so the straight move is too fast.
    EXPECT_EQ(g.c_start(s1, s2), kInf);
    EXPECT_EQ(g.c_seg(0, 0), kInf);
    EXPECT_EQ(g.lfdt(0, 0), -kInf);
    EXPECT_NEAR(g.lfdt(1, 2), 95.0, 1e-9);
}

TEST(TwGraphBuild, TimeOrderGivesInfiniteSegmentCost) {
    const auto inst = make_instance(
        {static_target(1, {3, 4}, {{50, 60}}), static_target(2, {3, 4}, {{0, 10}})});
    const auto g = TwGraph::build(inst, 2);
    for (int s = g.tw(1).seg_begin; s < g.tw(1).seg_end; ++s) {
        for (int s2 = g.tw(2).seg_begin; s2 < g.tw(2).seg_end; ++s2) {
            EXPECT_EQ(g.c_seg(s, s2), kInf);
        }
    }
}

TEST(TwGraphBuild, SegmentBoundsAreConsistent) {
    const auto g = TwGraph::build(small_random(4, 4), 6);
    for (int s = 0; s < g.n_segments(); ++s) {
        for (int s2 = 0; s2 < g.n_segments(); ++s2) {
            const double start = g.c_start(s, s2);
            const double seg = g.c_seg(s, s2);
            if (start < kInf) {
                EXPECT_LE(seg, start + g.segment(s).spatial_length + 1e-9);
                EXPECT_GE(start, norm(g.segment(s2).start.position - g.segment(s).start.position) - 1e-12);
            }
        }
    }
}

TEST(TwGraphBuild, SegmentCostLowerBoundsDirectLegs) {
    const auto g = TwGraph::build(small_random(5, 4), 4);
    std::mt19937_64 rng(9);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int a = 1 + static_cast<int>(rng() % (g.n_tw() - 1));
        const int b = static_cast<int>(rng() % g.n_tw());
        if (!g.has_edge(a, b)) continue;
        const std::vector<int> seq{0, a, b};
        const auto r = tour_cost(g, seq);
        if (!r.feasible()) continue;
        const int s = g.segment_of(a, r.times[1]);
        const int s2 = g.segment_of(b, r.times[2]);
        EXPECT_LE(g.c_seg(s, s2), norm(r.positions[2] - r.positions[1]) + 1e-7);
        ++checked;
    }
    EXPECT_GT(checked, 20);
}

TEST(TwGraphBuild, CacheRoundTrip) {
    const auto inst = small_random(6, 4);
    const auto dir = std::filesystem::temp_directory_path() / "mtvrp_cache_test";
    std::filesystem::remove_all(dir);
    const auto a = TwGraph::build(inst, 4, dir);
    EXPECT_TRUE(std::filesystem::exists(table_cache_file(dir, inst, 4)));
    const auto b = TwGraph::build(inst, 4, dir);
    for (int s = 0; s < a.n_segments(); ++s) {
        for (int s2 = 0; s2 < a.n_segments(); ++s2) {
            EXPECT_EQ(a.c_seg(s, s2), b.c_seg(s, s2));
            EXPECT_EQ(a.c_start(s, s2), b.c_start(s, s2));
        }
    }
    for (int w = 0; w < a.n_tw(); ++w) EXPECT_EQ(a.max_lfdt(w, 1), b.max_lfdt(w, 1));
    std::filesystem::remove_all(dir);
}

TEST(TwGraphBuild, ReportsUnreachableTargets) {
    const auto inst = make_instance(
        {static_target(1, {3, 4}, {{0, 100}}), static_target(2, {300, 400}, {{0, 10}})});
    const auto g = TwGraph::build(inst, 2);
    EXPECT_EQ(g.unreachable_targets(), std::vector<int>{2});
}
