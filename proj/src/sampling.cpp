#include "mhdpinn/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <string>

#include "mhdpinn/errors.hpp"

namespace mhdpinn {

void Domain::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min) || !(t_max > t_min)) {
    throw PreconditionError("domain needs max > min on every axis");
  }
}

Rng derive_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(index), hi(index)};
  return Rng(seq);
}

namespace {

double uniform(Rng& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return std::min(hi, lo + (hi - lo) * unit(rng));
}

Point uniform_point(Rng& rng, const Domain& d) {
  const double x = uniform(rng, d.x_min, d.x_max);
  const double y = uniform(rng, d.y_min, d.y_max);
  const double t = uniform(rng, d.t_min, d.t_max);
  return {x, y, t};
}

double normalized(double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }

}  // namespace

// ---------------------------------------------------------------------------

std::vector<PrimitiveState> TrajectorySet::labels() const {
  std::vector<PrimitiveState> out;
  out.reserve(samples.size());
  for (const LabeledSample& s : samples) out.push_back(s.label);
  return out;
}

TrajectorySet gen_trajectories(const Domain& domain, double frac, std::size_t samples_per_line,
                               std::uint64_t seed) {
  if (!(frac >= 0.0 && frac <= 1.0)) throw PreconditionError("trajectory frac must lie in [0, 1]");
  if (samples_per_line < 2) throw PreconditionError("need at least 2 samples per trajectory");
  Rng rng = derive_rng(seed, 0x7472616aULL, 0);
  TrajectorySet set;
  set.domain = domain;
  const double dx = frac * domain.extent(Axis::x);
  const double dy = frac * domain.extent(Axis::y);
  for (std::size_t l = 0; l < kNumTrajectories; ++l) {
    TrajectoryLine line;
    line.a = {uniform(rng, domain.x_min, domain.x_max), uniform(rng, domain.y_min, domain.y_max),
              domain.t_min};
    line.b = {uniform(rng, std::max(domain.x_min, line.a.x - dx), std::min(domain.x_max, line.a.x + dx)),
              uniform(rng, std::max(domain.y_min, line.a.y - dy), std::min(domain.y_max, line.a.y + dy)),
              domain.t_max};
    set.lines.push_back(line);
    for (std::size_t i = 0; i < samples_per_line; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(samples_per_line - 1);
      LabeledSample sample;
      sample.line = l;
      sample.s = s;
      sample.point = i + 1 == samples_per_line ? line.b : line.at(s);
      set.samples.push_back(sample);
    }
  }
  return set;
}

void label_trajectories(TrajectorySet& set,
                        const std::function<PrimitiveState(const Point&)>& truth) {
  for (LabeledSample& s : set.samples) s.label = truth(s.point);
}

// ---------------------------------------------------------------------------

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::random: return "random";
    case Strategy::density: return "density";
    case Strategy::cuboid: return "cuboid";
    case Strategy::cylinder: return "cylinder";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::random, Strategy::density, Strategy::cuboid, Strategy::cylinder}) {
    if (to_string(s) == name) return s;
  }
  if (name == "bubble") return Strategy::cylinder;
  return std::nullopt;
}

void CurriculumSchedule::validate() const {
  if (total_epochs < 1) throw PreconditionError("total_epochs must be >= 1");
  if (!(curriculum_fraction > 0.0 && curriculum_fraction <= 1.0)) {
    throw PreconditionError("curriculum_fraction must lie in (0, 1]");
  }
  if (cuboid_steps < 1 || cylinder_steps < 1) throw PreconditionError("curriculum steps must be >= 1");
  if (!(initial_radius_fraction >= 0.0)) throw PreconditionError("initial_radius_fraction must be >= 0");
}

long CurriculumSchedule::curriculum_epochs() const {
  // The epsilon absorbs representation error, e.g. 0.3 * 5000.
  const double c = std::ceil(curriculum_fraction * static_cast<double>(total_epochs) - 1e-9);
  return std::max(1L, static_cast<long>(c));
}

std::size_t CurriculumSchedule::step_index(long epoch, std::size_t steps) const {
  if (epoch <= 0) return 0;
  const long c = curriculum_epochs();
  const auto k = static_cast<std::size_t>((epoch * static_cast<long>(steps)) / c);
  return std::min(steps, k);
}

void DensitySchedule::validate() const {
  if (total_epochs < 1) throw PreconditionError("density total_epochs must be >= 1");
  if (k_min < 2 || k_max < k_min) throw PreconditionError("density schedule needs 2 <= k_min <= k_max");
}

std::size_t DensitySchedule::k_at(long epoch) const {
  if (epoch <= 0) return k_min;
  const std::size_t span = k_max - k_min + 1;
  const auto k = k_min + static_cast<std::size_t>(epoch) * span / static_cast<std::size_t>(total_epochs);
  return std::min(k_max, k);
}

// ---------------------------------------------------------------------------

CollocationBatch sample_random(const Domain& domain, std::size_t n_colloc, long epoch, Rng& rng) {
  if (n_colloc < 1) throw PreconditionError("n_colloc must be >= 1");
  CollocationBatch b{{}, epoch, Strategy::random, 0};
  b.points.reserve(n_colloc);
  for (std::size_t i = 0; i < n_colloc; ++i) b.points.push_back(uniform_point(rng, domain));
  return b;
}

std::vector<Point> lattice(const Domain& d, std::size_t k) {
  auto node = [k](double lo, double hi, std::size_t i) {
    if (k == 1) return 0.5 * (lo + hi);
    if (i + 1 == k) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
  };
  std::vector<Point> pts;
  pts.reserve(k * k * k);
  for (std::size_t it = 0; it < k; ++it)
    for (std::size_t iy = 0; iy < k; ++iy)
      for (std::size_t ix = 0; ix < k; ++ix)
        pts.push_back({node(d.x_min, d.x_max, ix), node(d.y_min, d.y_max, iy), node(d.t_min, d.t_max, it)});
  return pts;
}

CollocationBatch sample_density(const Domain& domain, long epoch, const DensitySchedule& schedule) {
  const std::size_t k = schedule.k_at(epoch);
  const double count = std::pow(static_cast<double>(k), 3.0);
  if (count > static_cast<double>(schedule.max_points)) {
    throw ScalingLimitError("density lattice k=" + std::to_string(k) + " needs " +
                            std::to_string(static_cast<long long>(count)) + " points, cap is " +
                            std::to_string(schedule.max_points));
  }
  return CollocationBatch{lattice(domain, k), epoch, Strategy::density, 0};
}

// ---------------------------------------------------------------------------

CuboidRegion CuboidRegion::at_step(const Domain& domain, Axis axis, std::size_t step,
                                   std::size_t steps) {
  CuboidRegion r{domain, axis, domain.max(axis)};
  if (step < steps) {
    const double frac = static_cast<double>(step + 1) / static_cast<double>(steps + 1);
    r.upper = domain.min(axis) + frac * domain.extent(axis);
  }
  return r;
}

Domain CuboidRegion::box() const {
  Domain b = domain;
  switch (axis) {
    case Axis::x: b.x_max = upper; break;
    case Axis::y: b.y_max = upper; break;
    case Axis::t: b.t_max = upper; break;
  }
  return b;
}

bool CuboidRegion::contains(const Point& p) const { return box().contains(p); }

double CuboidRegion::fraction() const {
  const double e = domain.extent(axis);
  return e > 0.0 ? (upper - domain.min(axis)) / e : 1.0;
}

CollocationBatch sample_cuboid(const Domain& domain, std::size_t n_colloc, long epoch,
                               const CurriculumSchedule& schedule, Rng& rng) {
  if (n_colloc < 1) throw PreconditionError("n_colloc must be >= 1");
  const std::size_t k = schedule.step_index(epoch, schedule.cuboid_steps);
  const Domain box = CuboidRegion::at_step(domain, schedule.cuboid_axis, k, schedule.cuboid_steps).box();
  CollocationBatch b{{}, epoch, Strategy::cuboid, k};
  b.points.reserve(n_colloc);
  for (std::size_t i = 0; i < n_colloc; ++i) b.points.push_back(uniform_point(rng, box));
  return b;
}

// ---------------------------------------------------------------------------

double nearest_line_distance(const Domain& d, std::span<const TrajectoryLine> lines, const Point& p) {
  const double s = normalized(p.t, d.t_min, d.t_max);
  const double px = normalized(p.x, d.x_min, d.x_max);
  const double py = normalized(p.y, d.y_min, d.y_max);
  double best = std::numeric_limits<double>::infinity();
  for (const TrajectoryLine& l : lines) {
    const Point c = l.at(s);
    const double dx = px - normalized(c.x, d.x_min, d.x_max);
    const double dy = py - normalized(c.y, d.y_min, d.y_max);
    best = std::min(best, std::sqrt(dx * dx + dy * dy));
  }
  return best;
}

double max_line_distance(const Domain& d, std::span<const TrajectoryLine> lines) {
  if (lines.empty()) return kNormalizedDiagonal;
  constexpr std::size_t nxy = 129, nt = 65;
  double grid_max = 0.0;
  for (std::size_t it = 0; it < nt; ++it) {
    const double t = d.t_min + d.extent(Axis::t) * static_cast<double>(it) / (nt - 1);
    for (std::size_t iy = 0; iy < nxy; ++iy) {
      const double y = d.y_min + d.extent(Axis::y) * static_cast<double>(iy) / (nxy - 1);
      for (std::size_t ix = 0; ix < nxy; ++ix) {
        const double x = d.x_min + d.extent(Axis::x) * static_cast<double>(ix) / (nxy - 1);
        grid_max = std::max(grid_max, nearest_line_distance(d, lines, {x, y, t}));
      }
    }
  }
  // The nearest-line distance is 1-Lipschitz in normalized space and moves
  // with each line's normalized drift speed in normalized time.
  double speed = 0.0;
  for (const TrajectoryLine& l : lines) {
    const double vx = normalized(l.b.x, d.x_min, d.x_max) - normalized(l.a.x, d.x_min, d.x_max);
    const double vy = normalized(l.b.y, d.y_min, d.y_max) - normalized(l.a.y, d.y_min, d.y_max);
    speed = std::max(speed, std::hypot(vx, vy));
  }
  const double margin = 0.5 * std::hypot(1.0 / (nxy - 1), 1.0 / (nxy - 1)) + 0.5 * speed / (nt - 1);
  return std::min(kNormalizedDiagonal, grid_max + margin);
}

CylinderRegion CylinderRegion::at_step(const Domain& domain, std::span<const TrajectoryLine> lines,
                                       double initial_radius_fraction, std::size_t step,
                                       std::size_t steps, std::optional<double> r_max_hint) {
  CylinderRegion r{domain, {lines.begin(), lines.end()}, 0.0, step >= steps};
  const double r0 = initial_radius_fraction * kNormalizedDiagonal;
  const double r_max = r_max_hint ? *r_max_hint : max_line_distance(domain, lines);
  r.radius = r0 + (static_cast<double>(std::min(step, steps)) / static_cast<double>(steps)) * (r_max - r0);
  if (r.full) r.radius = std::max(r.radius, r_max);
  return r;
}

double CylinderRegion::distance(const Point& p) const { return nearest_line_distance(domain, lines, p); }

bool CylinderRegion::contains(const Point& p) const {
  if (!domain.contains(p)) return false;
  return full || distance(p) <= radius;
}

std::vector<Point> sample_in_region(const CylinderRegion& region, std::size_t n, Rng& rng) {
  std::vector<Point> pts;
  pts.reserve(n);
  if (region.full || region.lines.empty()) {
    for (std::size_t i = 0; i < n; ++i) pts.push_back(uniform_point(rng, region.domain));
    return pts;
  }
  constexpr std::size_t pilot = 2000;
  const std::size_t cap = 10'000 * n;
  std::size_t draws = 0;
  bool fallback = false;
  while (pts.size() < n) {
    if (draws == pilot && static_cast<double>(pts.size()) < 1e-3 * pilot) fallback = true;
    if (draws >= cap) fallback = true;
    if (fallback) break;
    const Point p = uniform_point(rng, region.domain);
    ++draws;
    if (region.contains(p)) pts.push_back(p);
  }
  if (pts.size() < n) {
    // Line + disk draws; only used for regions too thin for rejection.
    const Domain& d = region.domain;
    std::uniform_int_distribution<std::size_t> pick(0, region.lines.size() - 1);
    while (pts.size() < n) {
      const TrajectoryLine& l = region.lines[pick(rng)];
      const double s = uniform(rng, 0.0, 1.0);
      const double rad = region.radius * std::sqrt(uniform(rng, 0.0, 1.0));
      const double ang = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      const Point c = l.at(s);
      const Point p{c.x + rad * std::cos(ang) * d.extent(Axis::x),
                    c.y + rad * std::sin(ang) * d.extent(Axis::y), c.t};
      if (region.contains(p)) pts.push_back(p);
    }
  }
  return pts;
}

CollocationBatch sample_cylinder(const Domain& domain, std::size_t n_colloc, long epoch,
                                 const CurriculumSchedule& schedule,
                                 std::span<const TrajectoryLine> lines, Rng& rng,
                                 std::optional<double> r_max) {
  if (n_colloc < 1) throw PreconditionError("n_colloc must be >= 1");
  if (lines.empty()) throw PreconditionError("cylinder sampling needs trajectories");
  const std::size_t k = schedule.step_index(epoch, schedule.cylinder_steps);
  const CylinderRegion region = CylinderRegion::at_step(domain, lines, schedule.initial_radius_fraction,
                                                        k, schedule.cylinder_steps, r_max);
  return CollocationBatch{sample_in_region(region, n_colloc, rng), epoch, Strategy::cylinder, k};
}

// ---------------------------------------------------------------------------

CollocationSampler::CollocationSampler(SamplerConfig config, Domain domain,
                                       std::vector<TrajectoryLine> lines)
    : config_(std::move(config)), domain_(domain), lines_(std::move(lines)) {
  config_.schedule.validate();
  if (config_.n_colloc < 1) throw PreconditionError("n_colloc must be >= 1");
  if (config_.strategy == Strategy::density) config_.density.validate();
  if (config_.strategy == Strategy::cylinder) {
    if (lines_.empty()) throw PreconditionError("cylinder sampling needs trajectories");
    bool all_same = true;
    for (const TrajectoryLine& l : lines_) all_same = all_same && l == lines_.front();
    if (all_same && lines_.size() > 1) {
      std::cerr << "warning: all trajectory lines coincide; cylinder regions degenerate to one tube\n";
    }
    r_max_ = max_line_distance(domain_, lines_);
  }
}

std::size_t CollocationSampler::step_at(long epoch) const {
  const CurriculumSchedule& s = config_.schedule;
  switch (config_.strategy) {
    case Strategy::cuboid: return s.step_index(epoch, s.cuboid_steps);
    case Strategy::cylinder: return s.step_index(epoch, s.cylinder_steps);
    default: return 0;
  }
}

CollocationBatch CollocationSampler::batch(long epoch) const {
  const auto stream = static_cast<std::uint64_t>(config_.strategy) + 0x636f6c6cULL;
  const bool curriculum = config_.strategy == Strategy::cuboid || config_.strategy == Strategy::cylinder;
  // Without per-epoch resampling a curriculum batch is redrawn only when the
  // step changes (and once more when the curriculum ends).
  std::uint64_t index = static_cast<std::uint64_t>(epoch);
  if (curriculum && !config_.schedule.resample_every_epoch) index = step_at(epoch);
  Rng rng = derive_rng(config_.seed, stream, index);
  CollocationBatch b;
  switch (config_.strategy) {
    case Strategy::random: b = sample_random(domain_, config_.n_colloc, epoch, rng); break;
    case Strategy::density: b = sample_density(domain_, epoch, config_.density); break;
    case Strategy::cuboid: b = sample_cuboid(domain_, config_.n_colloc, epoch, config_.schedule, rng); break;
    case Strategy::cylinder:
      b = sample_cylinder(domain_, config_.n_colloc, epoch, config_.schedule, lines_, rng, r_max_);
      break;
  }
  b.epoch = epoch;
  return b;
}

}  // namespace mhdpinn
