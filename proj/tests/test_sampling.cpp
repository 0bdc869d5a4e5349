#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <random>
#include <set>

#include "mhdpinn/errors.hpp"
#include "mhdpinn/sampling.hpp"
#include "support.hpp"

using namespace mhdpinn;
using namespace mhdpinn::testing;

namespace {

const Domain kUnit{0.0, 1.0, 0.0, 1.0, 0.0, 1.0};

CurriculumSchedule paper_schedule() {
  CurriculumSchedule s;
  s.total_epochs = 5000;
  return s;
}

}  // namespace

TEST(Trajectories, FourLinesWithExactEndpoints) {
  const TrajectorySet set = gen_trajectories(odd_domain(), 0.25, 25, 3);
  ASSERT_EQ(set.lines.size(), kNumTrajectories);
  ASSERT_EQ(set.samples.size(), 100u);
  for (const TrajectoryLine& l : set.lines) {
    EXPECT_EQ(l.a.t, odd_domain().t_min);
    EXPECT_EQ(l.b.t, odd_domain().t_max);
    EXPECT_TRUE(odd_domain().contains(l.a));
    EXPECT_TRUE(odd_domain().contains(l.b));
    EXPECT_LE(std::abs(l.b.x - l.a.x), 0.25 * 2.0 + 1e-12);
  }
  EXPECT_EQ(set.samples[0].s, 0.0);
  EXPECT_EQ(set.samples[24].s, 1.0);
  EXPECT_EQ(set.samples[24].point, set.lines[0].b);
  EXPECT_EQ(gen_trajectories(odd_domain(), 0.25, 25, 3), set);
  EXPECT_NE(gen_trajectories(odd_domain(), 0.25, 25, 4), set);
}

TEST(Trajectories, LabelsComeFromTruth) {
  TrajectorySet set = gen_trajectories(kUnit, 0.5, 5, 1);
  label_trajectories(set, [](const Point& p) {
    PrimitiveState s;
    s[0] = p.x + 2 * p.t;
    return s;
  });
  for (const LabeledSample& s : set.samples) EXPECT_EQ(s.label[0], s.point.x + 2 * s.point.t);
}

TEST(Strategy, NamesRoundTrip) {
  for (Strategy s : {Strategy::random, Strategy::density, Strategy::cuboid, Strategy::cylinder}) {
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  EXPECT_EQ(parse_strategy("bubble"), Strategy::cylinder);
  EXPECT_FALSE(parse_strategy("sphere").has_value());
}

TEST(Curriculum, StepBoundariesForPaperSchedule) {
  const CurriculumSchedule s = paper_schedule();
  EXPECT_EQ(s.curriculum_epochs(), 1500);
  for (long e = 1; e < 5000; ++e) {
    const bool cuboid_change = s.step_index(e, 5) != s.step_index(e - 1, 5);
    const bool cylinder_change = s.step_index(e, 15) != s.step_index(e - 1, 15);
    EXPECT_EQ(cuboid_change, e <= 1500 && e % 300 == 0) << e;
    EXPECT_EQ(cylinder_change, e <= 1500 && e % 100 == 0) << e;
  }
  EXPECT_EQ(s.step_index(1499, 15), 14u);
  EXPECT_EQ(s.step_index(1500, 15), 15u);
  EXPECT_EQ(s.step_index(4999, 5), 5u);
}

TEST(Curriculum, CuboidSlab) {
  const CuboidRegion r0 = CuboidRegion::at_step(odd_domain(), Axis::t, 0, 5);
  EXPECT_DOUBLE_EQ(r0.box().t_max, 0.5);
  EXPECT_EQ(r0.box().x_max, odd_domain().x_max);
  EXPECT_EQ(CuboidRegion::at_step(odd_domain(), Axis::t, 5, 5).box(), odd_domain());
  const CuboidRegion rx = CuboidRegion::at_step(odd_domain(), Axis::x, 2, 5);
  EXPECT_DOUBLE_EQ(rx.box().x_max, -0.5 + 0.5 * 2.0);
  EXPECT_EQ(rx.box().t_max, odd_domain().t_max);
}

TEST(Curriculum, CuboidBatchesStayInSlabAndGrow) {
  CurriculumSchedule s = paper_schedule();
  double last = 0.0;
  for (long e = 0; e < 5000; e += 37) {
    Rng rng = derive_rng(1, 2, static_cast<std::uint64_t>(e));
    const CollocationBatch b = sample_cuboid(kUnit, 64, e, s, rng);
    ASSERT_EQ(b.points.size(), 64u);
    const CuboidRegion r = CuboidRegion::at_step(kUnit, Axis::t, b.step, 5);
    EXPECT_GE(r.upper, last);
    last = r.upper;
    for (const Point& p : b.points) EXPECT_TRUE(r.contains(p));
  }
}

TEST(Curriculum, CylinderRegionsAreNestedAndEndFull) {
  const TrajectorySet set = gen_trajectories(odd_domain(), 0.25, 5, 8);
  const double r_max = max_line_distance(odd_domain(), set.lines);
  std::mt19937_64 rng(4);
  std::vector<CylinderRegion> regions;
  for (std::size_t k = 0; k <= 15; ++k) regions.push_back(CylinderRegion::at_step(odd_domain(), set.lines, 0.02, k, 15, r_max));
  EXPECT_DOUBLE_EQ(regions[0].radius, 0.02 * kNormalizedDiagonal);
  EXPECT_TRUE(regions[15].full);
  for (int i = 0; i < 20000; ++i) {
    const Point p = random_point(odd_domain(), rng);
    EXPECT_TRUE(regions[15].contains(p));
    EXPECT_LE(nearest_line_distance(odd_domain(), set.lines, p), r_max);
    bool inside = false;
    for (const CylinderRegion& r : regions) {
      if (r.contains(p)) {
        inside = true;
      } else {
        EXPECT_FALSE(inside) << "region shrank";
      }
    }
  }
}

TEST(Curriculum, CylinderInitialPointsHugTheLines) {
  const TrajectorySet set = gen_trajectories(kUnit, 0.25, 5, 2);
  CurriculumSchedule s = paper_schedule();
  s.initial_radius_fraction = 1e-3;
  Rng rng = derive_rng(0, 3, 0);
  const CollocationBatch b = sample_cylinder(kUnit, 500, 0, s, set.lines, rng);
  ASSERT_EQ(b.points.size(), 500u);
  for (const Point& p : b.points) {
    EXPECT_LE(nearest_line_distance(kUnit, set.lines, p), 1e-3 * kNormalizedDiagonal);
    EXPECT_TRUE(kUnit.contains(p));
  }
}

TEST(Curriculum, CylinderIsUniformOverItsRegion) {
  // Chi-square against a uniform density on the region, cells weighted by
  // the region volume they contain (fine-grid mask).
  const TrajectorySet set = gen_trajectories(kUnit, 0.25, 5, 5);
  const CylinderRegion region = CylinderRegion::at_step(kUnit, set.lines, 0.02, 3, 15);
  Rng rng(99);
  const auto pts = sample_in_region(region, 10000, rng);
  ASSERT_EQ(pts.size(), 10000u);

  constexpr int kCells = 4, kFine = 24;
  std::vector<double> mass(kCells * kCells * kCells, 0.0);
  double total = 0.0;
  for (int i = 0; i < kCells * kFine; ++i)
    for (int j = 0; j < kCells * kFine; ++j)
      for (int k = 0; k < kCells * kFine; ++k) {
        const Point p{(i + 0.5) / (kCells * kFine), (j + 0.5) / (kCells * kFine), (k + 0.5) / (kCells * kFine)};
        if (!region.contains(p)) continue;
        mass[(i / kFine * kCells + j / kFine) * kCells + k / kFine] += 1.0;
        total += 1.0;
      }
  std::vector<double> counts(mass.size(), 0.0);
  for (const Point& p : pts) {
    ASSERT_TRUE(region.contains(p));
    const int i = std::min(kCells - 1, static_cast<int>(p.x * kCells));
    const int j = std::min(kCells - 1, static_cast<int>(p.y * kCells));
    const int k = std::min(kCells - 1, static_cast<int>(p.t * kCells));
    counts[(i * kCells + j) * kCells + k] += 1.0;
  }
  double chi2 = 0.0;
  int dof = -1;
  for (std::size_t c = 0; c < mass.size(); ++c) {
    const double expected = 10000.0 * mass[c] / total;
    if (expected < 5.0) continue;
    chi2 += (counts[c] - expected) * (counts[c] - expected) / expected;
    ++dof;
  }
  ASSERT_GT(dof, 5);
  // The fine mask approximates cell volumes; allow for its discretization.
  const boost::math::chi_squared dist(dof);
  EXPECT_LT(chi2, boost::math::quantile(dist, 0.99)) << "dof " << dof;
}

TEST(Curriculum, DegenerateLinesStillWork) {
  TrajectoryLine l{{0.5, 0.5, 0.0}, {0.5, 0.5, 1.0}};
  const std::vector<TrajectoryLine> lines(4, l);
  CurriculumSchedule s = paper_schedule();
  Rng rng(1);
  const CollocationBatch b = sample_cylinder(kUnit, 50, 0, s, lines, rng);
  EXPECT_EQ(b.points.size(), 50u);
}

TEST(Density, LatticeAndGrowth) {
  DensitySchedule d;
  d.total_epochs = 100;
  EXPECT_EQ(d.k_at(0), 4u);
  EXPECT_EQ(d.k_at(99), 16u);
  for (long e = 1; e < 100; ++e) EXPECT_GE(d.k_at(e), d.k_at(e - 1));
  const auto pts = lattice(kUnit, 3);
  ASSERT_EQ(pts.size(), 27u);
  std::set<std::tuple<double, double, double>> uniq;
  for (const Point& p : pts) uniq.insert({p.x, p.y, p.t});
  EXPECT_EQ(uniq.size(), 27u);
  EXPECT_TRUE(uniq.count({0.0, 0.0, 0.0}));
  EXPECT_TRUE(uniq.count({1.0, 1.0, 1.0}));
  EXPECT_EQ(sample_density(kUnit, 0, d).points.size(), 64u);
}

TEST(Density, ScalingLimit) {
  DensitySchedule d;
  d.total_epochs = 10;
  d.k_min = d.k_max = 101;
  EXPECT_THROW(sample_density(kUnit, 0, d), ScalingLimitError);
}

TEST(Sampler, ConstantCountAndDeterminism) {
  const TrajectorySet set = gen_trajectories(kUnit, 0.25, 5, 6);
  for (Strategy st : {Strategy::random, Strategy::cuboid, Strategy::cylinder}) {
    SamplerConfig cfg;
    cfg.strategy = st;
    cfg.n_colloc = 100;
    cfg.schedule.total_epochs = 500;
    cfg.seed = 4;
    const CollocationSampler a(cfg, kUnit, set.lines), b(cfg, kUnit, set.lines);
    for (long e = 0; e < 500; e += 7) {
      const CollocationBatch ba = a.batch(e);
      EXPECT_EQ(ba.points.size(), 100u);
      EXPECT_EQ(ba.points, b.batch(e).points);
      for (const Point& p : ba.points) EXPECT_TRUE(kUnit.contains(p));
    }
    EXPECT_EQ(a.batch(37).points, a.batch(37).points);
    EXPECT_NE(a.batch(200).points, a.batch(201).points);
  }
}

TEST(Sampler, FixedBatchesPerStepWithoutResampling) {
  const TrajectorySet set = gen_trajectories(kUnit, 0.25, 5, 6);
  SamplerConfig cfg;
  cfg.strategy = Strategy::cylinder;
  cfg.schedule.total_epochs = 5000;
  cfg.schedule.resample_every_epoch = false;
  const CollocationSampler s(cfg, kUnit, set.lines);
  EXPECT_EQ(s.batch(0).points, s.batch(99).points);
  EXPECT_NE(s.batch(99).points, s.batch(100).points);
}

TEST(Schedule, Validation) {
  CurriculumSchedule s;
  s.curriculum_fraction = 0.0;
  EXPECT_THROW(s.validate(), PreconditionError);
  s = CurriculumSchedule{};
  s.cylinder_steps = 0;
  EXPECT_THROW(s.validate(), PreconditionError);
  EXPECT_THROW(gen_trajectories(kUnit, 1.5, 5, 0), PreconditionError);
}
