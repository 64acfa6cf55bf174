#include "oracles.hpp"
#include "scalp/color.hpp"
#include "scalp/hard_constraint.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace scalp;

namespace {

void draw_rect(HierarchicalMap& u, int x0, int y0, int x1, int y1, double v)
{
    for (int x = x0; x <= x1; ++x)
    {
        u.at(x, y0) = std::max(u.at(x, y0), v);
        u.at(x, y1) = std::max(u.at(x, y1), v);
    }
    for (int y = y0; y <= y1; ++y)
    {
        u.at(x0, y) = std::max(u.at(x0, y), v);
        u.at(x1, y) = std::max(u.at(x1, y), v);
    }
}

// Outer loop at 0.7, two inner loops at 0.3.
HierarchicalMap nested_loops()
{
    HierarchicalMap u(Extent{48, 40, 1}, 0.0);
    draw_rect(u, 6, 5, 41, 34, 0.7);
    draw_rect(u, 10, 10, 20, 28, 0.3);
    draw_rect(u, 26, 12, 36, 22, 0.3);
    return u;
}

bool inside(int x, int y, int x0, int y0, int x1, int y1)
{
    return x > x0 && x < x1 && y > y0 && y < y1;
}

} // namespace

TEST(Threshold, NestedLoopsKeepOnlyStrongRegions)
{
    const HierarchicalMap u = nested_loops();
    EXPECT_EQ(count_open_contours(u, 0.4), 0u);
    const RegionPartition r = threshold_regions(u, 0.4);
    ASSERT_EQ(r.region_count(), 2u);
    // Non-contour pixels: inside vs outside the 0.7 loop.
    const int in_label = r.labels.at(20, 20);
    const int out_label = r.labels.at(0, 0);
    EXPECT_NE(in_label, out_label);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 48; ++x)
        {
            if (u.at(x, y) >= 0.4)
                continue;
            EXPECT_EQ(r.labels.at(x, y), inside(x, y, 6, 5, 41, 34) ? in_label : out_label) << x << ',' << y;
        }
    ASSERT_EQ(r.adjacency.size(), 1u);
    EXPECT_DOUBLE_EQ(r.adjacency.begin()->second.strength, 0.7);

    const RegionPartition finer = threshold_regions(u, 0.2);
    EXPECT_EQ(finer.region_count(), 4u);
    EXPECT_EQ(threshold_regions(u, 0.8).region_count(), 1u);
}

TEST(Threshold, DetectsOpenContours)
{
    HierarchicalMap u = nested_loops();
    u.at(6, 20) = 0.0;
    EXPECT_EQ(count_open_contours(u, 0.4), 1u);
}

TEST(Threshold, ThickContoursAreAbsorbed)
{
    HierarchicalMap u(Extent{20, 9, 1}, 0.0);
    for (int y = 0; y < 9; ++y)
        for (int x = 8; x < 13; ++x)
            u.at(x, y) = 0.9;
    const RegionPartition r = threshold_regions(u, 0.4);
    ASSERT_EQ(r.region_count(), 2u);
    for (int y = 0; y < 9; ++y)
    {
        EXPECT_EQ(r.labels.at(9, y), r.labels.at(0, y));
        // The middle column is equidistant: tie goes to the lowest label.
        EXPECT_EQ(r.labels.at(10, y), std::min(r.labels.at(0, y), r.labels.at(19, y)));
        EXPECT_EQ(r.labels.at(11, y), r.labels.at(19, y));
    }
}

TEST(Partition, StrengthIsMinOverPairs)
{
    LabelMap l(Extent{4, 2, 1}, 0);
    l.at(2, 0) = l.at(3, 0) = l.at(2, 1) = l.at(3, 1) = 1;
    HierarchicalMap u(l.extent(), 0.0);
    u.at(1, 0) = 0.9;
    u.at(2, 0) = 0.6;
    u.at(1, 1) = 0.5;
    u.at(2, 1) = 0.45;
    const RegionPartition p = make_partition(l, u, 0.4);
    ASSERT_EQ(p.adjacency.size(), 1u);
    EXPECT_DOUBLE_EQ(p.adjacency.at({0, 1}).strength, 0.5);
    EXPECT_EQ(p.adjacency.at({0, 1}).pixels.size(), 4u);
    EXPECT_EQ(p.sizes, (std::vector<std::size_t>{4, 4}));
    EXPECT_EQ(p.neighbors(0), std::vector<int>{1});
    // Below tau the map is suppressed.
    EXPECT_DOUBLE_EQ(make_partition(l, u, 0.55).adjacency.at({0, 1}).strength, 0.0);
}

TEST(Merge, AbsorbsAcrossWeakestBoundary)
{
    // Small region 1 between region 0 (weak edge) and region 2 (strong edge).
    LabelMap l(Extent{9, 3, 1}, 0);
    for (int y = 0; y < 3; ++y)
    {
        l.at(4, y) = 1;
        for (int x = 5; x < 9; ++x)
            l.at(x, y) = 2;
    }
    HierarchicalMap u(l.extent(), 0.0);
    for (int y = 0; y < 3; ++y)
    {
        u.at(3, y) = 0.45;
        u.at(5, y) = 0.8;
    }
    const RegionPartition p = make_partition(l, u, 0.4);
    const RegionPartition m = merge_small_regions(p, u, 10.0, 0.5);
    ASSERT_EQ(m.region_count(), 2u);
    EXPECT_EQ(m.labels.at(4, 1), m.labels.at(0, 1));
    EXPECT_NE(m.labels.at(4, 1), m.labels.at(8, 1));
}

TEST(Merge, MatchesBruteForceOracle)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uv(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial)
    {
        LabelMap cells = oracle::random_labels(24, 20, 14, 1000, rng);
        const LabelMap labels = compact_labels(cells);
        HierarchicalMap u(labels.extent(), 0.0);
        for (auto& v : u)
            v = std::round(uv(rng) * 20.0) / 20.0;
        const double tau = 0.3;
        const double s = 80.0;
        const double t = 0.5;
        const RegionPartition m = merge_small_regions(make_partition(labels, u, tau), u, s, t);
        const LabelMap want = oracle::merge(labels, u, tau, s * t);
        ASSERT_TRUE(oracle::same_partition(m.labels, want)) << "trial " << trial;
        for (std::size_t n : m.sizes)
        {
            if (m.region_count() > 1)
                ASSERT_GE(static_cast<double>(n), s * t);
        }
    }
}

TEST(Split, SubRegionsFollowSizeRule)
{
    LabelMap l(Extent{40, 20, 1}, 0);
    for (int y = 0; y < 20; ++y)
        for (int x = 30; x < 40; ++x)
            l.at(x, y) = 1;
    const HierarchicalMap u(l.extent(), 0.0);
    const RegionPartition p = make_partition(l, u, 0.4);
    const RegionPartition sub = partition_regions(p, 100.0, 3);
    // 600 px -> 6 pieces, 200 px -> 2 pieces.
    ASSERT_EQ(sub.region_count(), 8u);
    ASSERT_EQ(sub.parent.size(), 8u);
    for (std::size_t i = 0; i < l.size(); ++i)
    {
        ASSERT_EQ(sub.parent[static_cast<std::size_t>(sub.labels[i])], l[i]);
    }
    EXPECT_EQ(partition_regions(p, 100.0, 3).labels, sub.labels);
    EXPECT_EQ(partition_regions(p, 1000.0, 3).region_count(), 2u);
}

TEST(HardConstraint, SuperpixelsStayInsideRegions)
{
    const HierarchicalMap u = nested_loops();
    RgbImage img(48, 40, Rgb8{120, 120, 120});
    std::mt19937_64 rng(2);
    const RgbImage noisy = add_gaussian_noise(img, 200.0, 5);
    const LabImage lab = rgb_to_lab(noisy);
    ScalpParams p;
    p.k = 30;
    const HcResult r = run_scalp_hc(lab, p, nullptr, u);
    ASSERT_EQ(r.regions.region_count(), 2u);
    std::size_t violations = 0;
    const Extent& e = lab.extent();
    for (int y = 0; y < e.height; ++y)
        for (int x = 0; x < e.width; ++x)
        {
            if (x + 1 < e.width)
                violations += r.labels.at(x, y) == r.labels.at(x + 1, y) &&
                              r.regions.labels.at(x, y) != r.regions.labels.at(x + 1, y);
            if (y + 1 < e.height)
                violations += r.labels.at(x, y) == r.labels.at(x, y + 1) &&
                              r.regions.labels.at(x, y) != r.regions.labels.at(x, y + 1);
        }
    EXPECT_EQ(violations, 0u);
    std::map<int, int> region_of;
    for (std::size_t i = 0; i < r.labels.size(); ++i)
    {
        auto [it, fresh] = region_of.emplace(r.labels[i], r.regions.labels[i]);
        ASSERT_EQ(it->second, r.regions.labels[i]);
    }
    EXPECT_TRUE(oracle::labels_connected(r.labels));
    EXPECT_EQ(run_scalp_hc(lab, p, nullptr, u).labels, r.labels);

    HcOptions soft;
    soft.constrain = false;
    const HcResult s = run_scalp_hc(lab, p, nullptr, u, soft);
    EXPECT_TRUE(oracle::labels_connected(s.labels));
}
