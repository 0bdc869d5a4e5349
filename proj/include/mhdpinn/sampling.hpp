#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mhdpinn/domain.hpp"
#include "mhdpinn/state.hpp"

namespace mhdpinn {

using Rng = std::mt19937_64;

/// Independent stream for one (seed, stream, epoch) triple so batches can be
/// regenerated without replaying earlier epochs.
Rng derive_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// ---------------------------------------------------------------------------
// Trajectories

/// Straight spacecraft track from `a` (at t_min) to `b` (at t_max).
struct TrajectoryLine {
  Point a;
  Point b;

  Point at(double s) const {
    return {a.x + s * (b.x - a.x), a.y + s * (b.y - a.y), a.t + s * (b.t - a.t)};
  }
  friend bool operator==(const TrajectoryLine&, const TrajectoryLine&) = default;
};

struct LabeledSample {
  std::size_t line = 0;
  double s = 0.0;
  Point point;
  PrimitiveState label{};
  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

struct TrajectorySet {
  Domain domain;
  std::vector<TrajectoryLine> lines;
  std::vector<LabeledSample> samples;

  std::vector<PrimitiveState> labels() const;
  friend bool operator==(const TrajectorySet&, const TrajectorySet&) = default;
};

inline constexpr std::size_t kNumTrajectories = 4;

/// Four lines spanning [t_min, t_max]. Start points are uniform over the
/// spatial domain; end points are uniform within frac * extent of the start
/// on each spatial axis (clipped to the domain). Samples are equally spaced
/// in s including both ends; labels are left zero.
TrajectorySet gen_trajectories(const Domain& domain, double frac, std::size_t samples_per_line,
                               std::uint64_t seed);

/// Fills every sample's label from `truth`.
void label_trajectories(TrajectorySet& set,
                        const std::function<PrimitiveState(const Point&)>& truth);

// ---------------------------------------------------------------------------
// Collocation strategies

enum class Strategy : std::uint32_t { random = 0, density = 1, cuboid = 2, cylinder = 3 };

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

struct CollocationBatch {
  std::vector<Point> points;
  long epoch = 0;
  Strategy strategy = Strategy::random;
  std::size_t step = 0;  // curriculum step index, 0 for non-curriculum strategies
};

struct CurriculumSchedule {
  long total_epochs = 5000;
  double curriculum_fraction = 0.30;
  std::size_t cuboid_steps = 5;
  std::size_t cylinder_steps = 15;
  Axis cuboid_axis = Axis::t;
  double initial_radius_fraction = 0.02;
  bool resample_every_epoch = true;

  void validate() const;

  /// ceil(fraction * total): first epoch at which the region is the full domain.
  long curriculum_epochs() const;

  /// min(S, floor(epoch * S / curriculum_epochs())) in integer arithmetic.
  std::size_t step_index(long epoch, std::size_t steps) const;
};

/// Per-axis lattice count k(epoch), growing linearly from k_min to k_max.
struct DensitySchedule {
  long total_epochs = 5000;
  std::size_t k_min = 4;
  std::size_t k_max = 16;
  std::size_t max_points = 1'000'000;

  void validate() const;
  std::size_t k_at(long epoch) const;
};

CollocationBatch sample_random(const Domain& domain, std::size_t n_colloc, long epoch, Rng& rng);

/// Full k^3 tensor-product lattice including the domain corners (k >= 2).
/// Throws ScalingLimitError when k^3 exceeds `schedule.max_points`.
CollocationBatch sample_density(const Domain& domain, long epoch, const DensitySchedule& schedule);
std::vector<Point> lattice(const Domain& domain, std::size_t k);

/// Slab [min, min + (k+1)/(S+1) * extent] along the schedule's axis, full
/// range on the other two.
struct CuboidRegion {
  Domain domain;
  Axis axis = Axis::t;
  double upper = 0.0;

  static CuboidRegion at_step(const Domain& domain, Axis axis, std::size_t step, std::size_t steps);
  Domain box() const;
  bool contains(const Point& p) const;
  double fraction() const;
};

CollocationBatch sample_cuboid(const Domain& domain, std::size_t n_colloc, long epoch,
                               const CurriculumSchedule& schedule, Rng& rng);

/// Union of time-sliced tubes around the trajectory lines. Distances are
/// measured in the (x, y) plane at the point's own t, with each axis scaled
/// to unit extent.
struct CylinderRegion {
  Domain domain;
  std::vector<TrajectoryLine> lines;
  double radius = 0.0;
  bool full = false;

  static CylinderRegion at_step(const Domain& domain, std::span<const TrajectoryLine> lines,
                                double initial_radius_fraction, std::size_t step,
                                std::size_t steps, std::optional<double> r_max = {});
  bool contains(const Point& p) const;
  double distance(const Point& p) const;
};

/// Normalized distance from p to the nearest line at p.t.
double nearest_line_distance(const Domain& domain, std::span<const TrajectoryLine> lines,
                             const Point& p);

/// Upper bound on the largest nearest-line distance over the domain (grid
/// maximum plus a Lipschitz margin), so a tube of this radius covers it all.
double max_line_distance(const Domain& domain, std::span<const TrajectoryLine> lines);

/// Radius of the unit-square diagonal, sqrt(2).
inline constexpr double kNormalizedDiagonal = 1.4142135623730951;

CollocationBatch sample_cylinder(const Domain& domain, std::size_t n_colloc, long epoch,
                                 const CurriculumSchedule& schedule,
                                 std::span<const TrajectoryLine> lines, Rng& rng,
                                 std::optional<double> r_max = {});

/// Uniform points from `region` by rejection from the domain box, falling
/// back to line + disk draws when the acceptance rate is below 0.1%.
std::vector<Point> sample_in_region(const CylinderRegion& region, std::size_t n, Rng& rng);

// ---------------------------------------------------------------------------

struct SamplerConfig {
  Strategy strategy = Strategy::random;
  std::size_t n_colloc = 100;
  CurriculumSchedule schedule;
  DensitySchedule density;
  std::uint64_t seed = 0;
};

/// Per-epoch batch source for the trainer. Batches depend only on
/// (seed, strategy, schedule, epoch), never on earlier calls.
class CollocationSampler {
 public:
  CollocationSampler(SamplerConfig config, Domain domain, std::vector<TrajectoryLine> lines);

  CollocationBatch batch(long epoch) const;
  std::size_t step_at(long epoch) const;
  const SamplerConfig& config() const { return config_; }

 private:
  SamplerConfig config_;
  Domain domain_;
  std::vector<TrajectoryLine> lines_;
  double r_max_ = 0.0;
};

}  // namespace mhdpinn
