#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "safeset/error.hpp"
#include "safeset/oss.hpp"
#include "scripted_system.hpp"

namespace safeset {
namespace {

using testing::box_spec;
using testing::line_spec;
using testing::pt;

std::vector<double> first_coords(const CoveringSet& set) {
    std::vector<double> xs;
    for (const auto id : set.ids()) {
        xs.push_back(set.centroid(id).cont[0]);
    }
    return xs;
}

OssSpec with_modes(OssSpec spec, std::vector<std::int64_t> values, const char* name = "q") {
    spec.disc_dims.push_back(DiscreteDim{name, std::move(values)});
    return spec;
}

TEST(InitialCovering, QuarterStepTilesTheUnitInterval) {
    const auto set = build_initial_covering(line_spec(0, 1, 0.25));
    EXPECT_EQ(first_coords(set), (std::vector<double>{0.25, 0.75}));
}

TEST(InitialCovering, FifthStepEndsOnTheUpperBound) {
    const auto set = build_initial_covering(line_spec(0, 1, 0.2));
    const auto xs = first_coords(set);
    ASSERT_EQ(xs.size(), 3u);
    EXPECT_NEAR(xs[0], 0.2, 1e-12);
    EXPECT_NEAR(xs[1], 0.6, 1e-12);
    EXPECT_NEAR(xs[2], 1.0, 1e-12);
    // Union of the boxes [x - 0.2, x + 0.2] must cover [0, 1] without gaps.
    double reach = 0.0;
    for (const double x : xs) {
        ASSERT_LE(x - 0.2, reach + 1e-12);
        reach = std::max(reach, x + 0.2);
    }
    EXPECT_GE(reach, 1.0);
}

TEST(InitialCovering, ModesMultiplyTheCount) {
    const auto set = build_initial_covering(with_modes(line_spec(0, 1, 0.25), {1, 2, 3}));
    EXPECT_EQ(set.size(), 6u);
}

TEST(InitialCovering, OverhangingLastCellIsPulledOntoTheBound) {
    // (1 - 0) / 0.44 = 2.27, so three cells whose lattice centers are 0.22, 0.66 and 1.10.
    const auto set = build_initial_covering(line_spec(0, 1, 0.22));
    const auto xs = first_coords(set);
    ASSERT_EQ(xs.size(), 3u);
    EXPECT_NEAR(xs[2], 1.0, 1e-12);
    EXPECT_TRUE(set.contains(pt({0.87})));
    EXPECT_TRUE(set.contains(pt({1.0})));
}

TEST(InitialCovering, IdsFollowCellOrderWithLastDimensionFastest) {
    const auto spec = with_modes(box_spec({{0, 2}, {0, 2}}, {0.5, 0.5}, 1), {5, -1});
    const auto set = build_initial_covering(spec);
    ASSERT_EQ(set.size(), 8u);
    std::vector<CellKey> keys;
    for (const auto id : set.ids()) {
        keys.push_back(set.cell(id));
    }
    EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
    EXPECT_EQ(keys[0], (CellKey{0, 0, -1}));
    EXPECT_EQ(keys[1], (CellKey{0, 0, 5}));
    EXPECT_EQ(keys[2], (CellKey{0, 1, -1}));
}

TEST(InitialCovering, CapacityLimitRaises) {
    const auto spec = box_spec({{0, 100}, {0, 100}}, {0.5, 0.5}, 1);
    EXPECT_THROW(build_initial_covering(spec, 9999), CapacityError);
    EXPECT_EQ(build_initial_covering(spec, 10000).size(), 10000u);
}

TEST(OssSpec, RejectsInvalidDeclarations) {
    EXPECT_THROW(line_spec(1, 1, 0.1).validate(), SpecError);
    EXPECT_THROW(line_spec(0, 1, 0.0).validate(), SpecError);
    EXPECT_THROW(line_spec(0, 1, 0.1, 0).validate(), SpecError);
    auto no_modes = with_modes(line_spec(0, 1, 0.1), {});
    EXPECT_THROW(no_modes.validate(), SpecError);
    auto repeated = with_modes(line_spec(0, 1, 0.1), {1, 1});
    EXPECT_THROW(repeated.validate(), SpecError);
    auto short_delta = box_spec({{0, 1}, {0, 1}}, {0.1}, 1);
    EXPECT_THROW(short_delta.validate(), SpecError);
    EXPECT_NO_THROW(line_spec(0, 1, 0.1).validate());
}

class ContainsExample : public ::testing::Test {
protected:
    ContainsExample() : set(with_modes(line_spec(0, 1, 0.2), {1, 2})) { set.insert(pt({0.2}, {1})); }
    CoveringSet set;
};

TEST_F(ContainsExample, InsideBoxWithEqualMode) {
    EXPECT_TRUE(set.contains(pt({0.35}, {1})));
}

TEST_F(ContainsExample, ModeMismatchBlocksCoverage) {
    EXPECT_FALSE(set.contains(pt({0.35}, {2})));
}

TEST_F(ContainsExample, OutsideBoxByAHundredth) {
    EXPECT_FALSE(set.contains(pt({0.41}, {1})));
}

TEST_F(ContainsExample, WrongDimensionsRaise) {
    EXPECT_THROW(set.contains(pt({0.35})), DimensionError);
    EXPECT_THROW(set.contains(pt({0.35, 0.1}, {1})), DimensionError);
}

TEST(Snap, InteriorPointGoesToCellCenter) {
    EXPECT_EQ(snap_to_cell(line_spec(0, 1, 0.25), pt({0.1})), pt({0.25}));
}

TEST(Snap, CentroidIsAFixedPoint) {
    EXPECT_EQ(snap_to_cell(line_spec(0, 1, 0.25), pt({0.75})), pt({0.75}));
}

TEST(Snap, BoundaryTieGoesToTheLowerCell) {
    const auto spec = line_spec(0, 1, 0.25);
    const auto s = snap_to_cell(spec, pt({0.5}));
    EXPECT_EQ(s, pt({0.25}));
    EXPECT_EQ(snap_to_cell(spec, s), s);
}

TEST(Snap, LowerBoundBelongsToTheFirstCell) {
    EXPECT_EQ(snap_to_cell(line_spec(0, 1, 0.25), pt({0.0})), pt({0.25}));
}

TEST(Snap, OutsideTheOssRaises) {
    const auto spec = line_spec(0, 1, 0.25);
    EXPECT_THROW(snap_to_cell(spec, pt({1.01})), SpecError);
    EXPECT_THROW(snap_to_cell(with_modes(spec, {1}), pt({0.5}, {2})), SpecError);
}

TEST(Snap, ModesAreCopied) {
    const auto spec = with_modes(line_spec(0, 1, 0.25), {4, 9});
    EXPECT_EQ(snap_to_cell(spec, pt({0.6}, {9})), pt({0.75}, {9}));
}

TEST(NormNearest, TieGoesToTheFirstCandidate) {
    const auto spec = box_spec({{0, 2}, {0, 10}}, {1, 1}, 1);
    const std::vector<StatePoint> c{pt({0, 5}), pt({1, 0})};
    EXPECT_EQ(nearest_normalized(spec, c, pt({1, 5})), 0u);
    const std::vector<StatePoint> reversed{pt({1, 0}), pt({0, 5})};
    EXPECT_EQ(nearest_normalized(spec, reversed, pt({1, 5})), 0u);
}

TEST(NormNearest, NormalizationPicksTheSecondCandidate) {
    const auto spec = box_spec({{0, 2}, {0, 10}}, {1, 1}, 1);
    const std::vector<StatePoint> c{pt({2, 5}), pt({1, 9})};
    // Exhaustive normalized distances computed here: 0.5 and 0.4.
    const auto dist = [](const StatePoint& a, const StatePoint& b) {
        return std::hypot((a.cont[0] - b.cont[0]) / 2.0, (a.cont[1] - b.cont[1]) / 10.0);
    };
    EXPECT_NEAR(dist(c[0], pt({1, 5})), 0.5, 1e-12);
    EXPECT_NEAR(dist(c[1], pt({1, 5})), 0.4, 1e-12);
    EXPECT_EQ(nearest_normalized(spec, c, pt({1, 5})), 1u);
}

TEST(NormNearest, ExactCentroidWins) {
    const auto set = build_initial_covering(box_spec({{0, 4}, {0, 4}}, {0.5, 0.5}, 1));
    for (const auto id : set.ids()) {
        EXPECT_EQ(set.norm_nearest(set.centroid(id)), id);
    }
}

TEST(NormNearest, LatticeTieGoesToSmallestId) {
    // (1, 1) is equidistant from all four surrounding centroids.
    const auto set = build_initial_covering(box_spec({{0, 2}, {0, 2}}, {0.5, 0.5}, 1));
    const auto picked = set.norm_nearest(pt({1, 1}));
    EXPECT_EQ(set.centroid(picked), pt({0.5, 0.5}));
    EXPECT_EQ(picked, set.ids()[0]);
}

TEST(NormNearest, ModesUseRankScaling) {
    const auto spec = with_modes(line_spec(0, 10, 5), {0, 100, 1000});
    CoveringSet set(spec);
    const auto low = set.insert(pt({5}, {0})).first;
    const auto mid = set.insert(pt({5}, {100})).first;
    set.insert(pt({5}, {1000}));
    // By rank, mode 100 sits at 0.5 and mode 0 at 0: mid wins for a query at mode 100.
    EXPECT_EQ(set.norm_nearest(pt({5}, {100})), mid);
    EXPECT_EQ(set.norm_nearest(pt({0}, {0})), low);
}

TEST(NormNearest, EmptySetRaises) {
    CoveringSet set(line_spec(0, 1, 0.25));
    EXPECT_THROW(set.norm_nearest(pt({0.5})), EmptySetError);
}

TEST(NormNearest, InvariantUnderPerDimensionRescaling) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double scale = 0.01 + 100.0 * u(gen);
        const auto a = box_spec({{0, 1}, {0, 1}}, {0.5, 0.5}, 1);
        const auto b = box_spec({{0, 1}, {0, scale}}, {0.5, 0.5 * scale}, 1);
        std::vector<StatePoint> ca;
        std::vector<StatePoint> cb;
        for (int k = 0; k < 6; ++k) {
            const double x = u(gen);
            const double y = u(gen);
            ca.push_back(pt({x, y}));
            cb.push_back(pt({x, y * scale}));
        }
        const double qx = u(gen);
        const double qy = u(gen);
        EXPECT_EQ(nearest_normalized(a, ca, pt({qx, qy})), nearest_normalized(b, cb, pt({qx, qy * scale})));
    }
}

TEST(CoveringSet, IdsAreNeverReused) {
    CoveringSet set(line_spec(0, 4, 0.5));
    const auto a = set.insert(pt({0.2})).first;
    const auto b = set.insert(pt({1.2})).first;
    set.erase(a);
    const auto c = set.insert(pt({0.3})).first;
    EXPECT_NE(c, a);
    EXPECT_NE(c, b);
    EXPECT_GT(c.value, b.value);
    EXPECT_FALSE(set.has(a));
}

TEST(CoveringSet, InsertIntoOccupiedCellReturnsExistingId) {
    CoveringSet set(line_spec(0, 4, 0.5));
    const auto [a, fresh] = set.insert(pt({0.2}));
    const auto [b, again] = set.insert(pt({0.9}));
    EXPECT_TRUE(fresh);
    EXPECT_FALSE(again);
    EXPECT_EQ(a, b);
    EXPECT_EQ(set.size(), 1u);
}

TEST(CoveringSet, CoveringListsEveryBoxContainingThePoint) {
    const auto set = build_initial_covering(line_spec(0, 2, 0.5));
    // 1.0 lies on the shared edge of the boxes around 0.5 and 1.5.
    EXPECT_EQ(set.covering(pt({1.0})).size(), 2u);
    EXPECT_EQ(set.covering(pt({0.2})).size(), 1u);
}

TEST(CoveringSet, CapacityIsEnforcedOnInsert) {
    CoveringSet set(line_spec(0, 4, 0.5), 2);
    set.insert(pt({0.2}));
    set.insert(pt({1.2}));
    EXPECT_THROW(set.insert(pt({2.2})), CapacityError);
}

TEST(CoveringProperty, RandomPointsAreCoveredAndSnapConsistent) {
    const std::vector<OssSpec> specs{
        line_spec(0, 1, 0.2),
        line_spec(-3, 7, 0.37),
        box_spec({{0, 1}, {-2, 2}, {10, 11}}, {0.22, 0.3, 0.07}, 1),
        with_modes(box_spec({{0, 5}, {0, 1}}, {0.45, 0.125}, 1), {0, 3, 7}),
    };
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& spec : specs) {
        const auto set = build_initial_covering(spec);
        for (int i = 0; i < 10000; ++i) {
            StatePoint p;
            for (const auto& d : spec.cont_dims) {
                p.cont.push_back(d.lower + (d.upper - d.lower) * u(gen));
            }
            for (const auto& d : spec.disc_dims) {
                p.disc.push_back(d.values[static_cast<std::size_t>(u(gen) * d.values.size())]);
            }
            ASSERT_TRUE(set.contains(p));
            const auto s = snap_to_cell(spec, p);
            ASSERT_TRUE(in_box(spec, s, p));
            ASSERT_EQ(snap_to_cell(spec, s), s);
            ASSERT_TRUE(spec.in_oss(s));
            ASSERT_TRUE(set.find_cell(cell_of(spec, p)).has_value());
        }
    }
}

TEST(CoveringProperty, BoundsAndCornersAreCovered) {
    const auto spec = box_spec({{0, 1}, {-2, 2}}, {0.22, 0.3}, 1);
    const auto set = build_initial_covering(spec);
    for (const double x : {0.0, 1.0}) {
        for (const double y : {-2.0, 2.0}) {
            EXPECT_TRUE(set.contains(pt({x, y})));
        }
    }
}

TEST(Iou, IdenticalSetsScoreOne) {
    const CellSet a{{0}, {1}, {2}};
    const CellSet sets[] = {a, a};
    EXPECT_EQ(iou(sets), 1.0);
}

TEST(Iou, OverlapOfOneInThree) {
    const CellSet sets[] = {{{0}, {1}}, {{1}, {2}}};
    EXPECT_DOUBLE_EQ(iou(sets), 1.0 / 3.0);
}

TEST(Iou, FiveIdenticalSetsScoreOne) {
    const CellSet a{{0, 1}, {3, 4}};
    const std::vector<CellSet> sets(5, a);
    EXPECT_EQ(iou(sets), 1.0);
}

TEST(Iou, AllEmptyRaises) {
    const std::vector<CellSet> sets(3);
    EXPECT_THROW(iou(sets), EmptySetError);
}

TEST(Iou, NeedsTwoSets) {
    const std::vector<CellSet> sets(1, CellSet{{1}});
    EXPECT_THROW(iou(sets), Error);
}

TEST(Iou, MismatchedCoveringsRaise) {
    const auto a = build_initial_covering(line_spec(0, 1, 0.25));
    const auto b = build_initial_covering(line_spec(0, 1, 0.2));
    const CoveringSet* sets[] = {&a, &b};
    EXPECT_THROW(iou(sets), GridMismatchError);
}

TEST(IouProperty, SymmetricAndOneOnlyForEqualSets) {
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<CellSet> sets(2 + gen() % 3);
        for (auto& s : sets) {
            for (std::int64_t c = 0; c < 6; ++c) {
                if (gen() % 2 == 0) {
                    s.insert({c});
                }
            }
        }
        if (std::all_of(sets.begin(), sets.end(), [](const CellSet& s) { return s.empty(); })) {
            continue;
        }
        const double base = iou(sets);
        auto shuffled = sets;
        std::shuffle(shuffled.begin(), shuffled.end(), gen);
        EXPECT_EQ(iou(shuffled), base);
        const bool all_equal = std::all_of(sets.begin(), sets.end(), [&](const CellSet& s) { return s == sets[0]; });
        EXPECT_EQ(base == 1.0, all_equal);
        EXPECT_GE(base, 0.0);
        EXPECT_LE(base, 1.0);
    }
}

}  // namespace
}  // namespace safeset
