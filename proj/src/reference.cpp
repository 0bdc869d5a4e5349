#include "mhdpinn/reference.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mhdpinn/errors.hpp"

namespace mhdpinn {

double alfven_speed(const AlfvenParams& p) {
  const double kn = std::hypot(p.kx, p.ky);
  const double b_par = (p.b0x * p.kx + p.b0y * p.ky) / kn;
  return b_par / std::sqrt(p.rho0);
}

double alfven_period(const AlfvenParams& p) {
  return 2.0 * std::numbers::pi / (std::hypot(p.kx, p.ky) * std::abs(alfven_speed(p)));
}

AnalyticSolution alfven_wave(const AlfvenParams& p) {
  if (!(p.rho0 > 0.0) || !(p.p0 > 0.0)) throw PreconditionError("alfven wave needs rho0 > 0 and p0 > 0");
  const double bn = std::hypot(p.b0x, p.b0y);
  const double kn = std::hypot(p.kx, p.ky);
  if (bn == 0.0) throw PreconditionError("alfven wave needs a nonzero background field");
  if (kn == 0.0) throw PreconditionError("alfven wave needs a nonzero wave vector");
  if (std::abs(p.kx * p.b0y - p.ky * p.b0x) > 1e-12 * kn * bn) {
    throw PreconditionError("alfven wave vector must be aligned with the background field");
  }
  const double khx = p.kx / kn, khy = p.ky / kn;
  const double omega = kn * alfven_speed(p);
  const double inv_sqrt_rho = 1.0 / std::sqrt(p.rho0);

  return AnalyticSolution("alfven", [=](const Point& x) {
    const double phi = p.kx * x.x + p.ky * x.y - omega * x.t + p.phase;
    const double c = std::cos(phi), s = std::sin(phi);
    // mean + a*cos(phi) and mean + a*sin(phi) with exact partials.
    auto cos_field = [&](double mean, double a) {
      return Jet<double>{mean + a * c,          -a * p.kx * s,         -a * p.ky * s,
                         a * omega * s,         -a * p.kx * p.kx * c, -a * p.ky * p.ky * c};
    };
    auto sin_field = [&](double mean, double a) {
      return Jet<double>{mean + a * s,          a * p.kx * c,          a * p.ky * c,
                         -a * omega * c,        -a * p.kx * p.kx * s, -a * p.ky * p.ky * s};
    };
    const double A = p.amplitude;
    StateJet st;
    st[Field::rho] = Jet<double>::constant(p.rho0);
    st[Field::p] = Jet<double>::constant(p.p0);
    st[Field::bx] = cos_field(p.b0x, -A * khy);
    st[Field::by] = cos_field(p.b0y, A * khx);
    st[Field::bz] = sin_field(0.0, A);
    st[Field::vx] = cos_field(0.0, A * khy * inv_sqrt_rho);
    st[Field::vy] = cos_field(0.0, -A * khx * inv_sqrt_rho);
    st[Field::vz] = sin_field(0.0, -A * inv_sqrt_rho);
    return st;
  });
}

// ---------------------------------------------------------------------------

ManufacturedParams ManufacturedParams::desk_default(const PhysParams& phys) {
  constexpr double pi = std::numbers::pi;
  ManufacturedParams m;
  m.phys = phys;
  //            mean  amp   kx       px    ky       py    w        pt
  m.fields[0] = {1.0, 0.2, pi, 0.3, pi, 0.1, pi, 0.0};        // rho
  m.fields[1] = {0.0, 0.5, 2 * pi, 0.0, pi, 0.4, pi, 0.2};    // vx
  m.fields[2] = {0.0, 0.4, pi, 0.7, 2 * pi, 0.0, pi, 0.5};    // vy
  m.fields[3] = {0.1, 0.3, pi, 1.1, pi, 0.9, 2 * pi, 0.3};    // vz
  m.fields[4] = {1.0, 0.25, pi, 0.2, pi, 0.6, pi, 0.8};       // P
  m.fields[5] = {0.5, 0.4, pi, 0.5, 2 * pi, 0.3, pi, 0.1};    // Bx
  m.fields[6] = {-0.3, 0.4, 2 * pi, 0.1, pi, 0.2, pi, 0.6};   // By
  m.fields[7] = {0.2, 0.3, pi, 0.4, pi, 1.0, 2 * pi, 0.7};    // Bz
  return m;
}

ManufacturedParams ManufacturedParams::constant(const PrimitiveState& state, const PhysParams& phys) {
  ManufacturedParams m;
  m.phys = phys;
  for (std::size_t f = 0; f < kNumFields; ++f) m.fields[f].mean = state[f];
  return m;
}

ManufacturedSolution manufactured(const ManufacturedParams& params) {
  params.phys.validate();
  const auto fields = params.fields;
  AnalyticSolution sol("manufactured", [fields](const Point& p) {
    const Jet<double> x = Jet<double>::coordinate(Axis::x, p.x);
    const Jet<double> y = Jet<double>::coordinate(Axis::y, p.y);
    const Jet<double> t = Jet<double>::coordinate(Axis::t, p.t);
    StateJet st;
    for (std::size_t f = 0; f < kNumFields; ++f) {
      const SinusoidProduct& q = fields[f];
      st[f] = q.mean + q.amplitude * (sin(q.kx * x + q.px) * cos(q.ky * y + q.py) * cos(q.w * t + q.pt));
    }
    return st;
  });
  const PhysParams phys = params.phys;
  Forcing forcing = [sol, phys](const Point& p) { return residuals(sol.jet(p), phys); };
  return {std::move(sol), std::move(forcing)};
}

// ---------------------------------------------------------------------------

namespace {

double node_coord(double lo, double hi, std::uint64_t n, std::uint64_t i) {
  if (n <= 1) return lo;
  if (i + 1 == n) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

Point SolutionCube::node(std::uint64_t ix, std::uint64_t iy, std::uint64_t it) const {
  return {node_coord(domain.x_min, domain.x_max, dims.nx, ix),
          node_coord(domain.y_min, domain.y_max, dims.ny, iy),
          node_coord(domain.t_min, domain.t_max, dims.nt, it)};
}

PrimitiveState SolutionCube::at(std::uint64_t ix, std::uint64_t iy, std::uint64_t it) const {
  PrimitiveState s;
  const std::size_t base = index(ix, iy, it);
  for (std::size_t f = 0; f < kNumFields; ++f) s[f] = data[base + f];
  return s;
}

std::vector<Point> SolutionCube::nodes() const {
  std::vector<Point> pts;
  pts.reserve(dims.nodes());
  for (std::uint64_t it = 0; it < dims.nt; ++it)
    for (std::uint64_t iy = 0; iy < dims.ny; ++iy)
      for (std::uint64_t ix = 0; ix < dims.nx; ++ix) pts.push_back(node(ix, iy, it));
  return pts;
}

void SolutionCube::validate() const {
  if (dims.nx == 0 || dims.ny == 0 || dims.nt == 0) throw CubeLoadError("cube has a zero dimension", 0);
  const std::size_t expected = dims.nodes() * kNumFields;
  if (data.size() != expected) {
    throw CubeLoadError("cube payload has " + std::to_string(data.size()) + " values, dims need " +
                            std::to_string(expected),
                        std::min(data.size(), expected));
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double v = data[i];
    const std::size_t f = i % kNumFields;
    if (!std::isfinite(v)) throw CubeLoadError("non-finite cube value at index " + std::to_string(i), i);
    if ((f == static_cast<std::size_t>(Field::rho) || f == static_cast<std::size_t>(Field::p)) && !(v > 0.0)) {
      throw CubeLoadError("non-positive " + std::string(kFieldNames[f]) + " at index " + std::to_string(i), i);
    }
  }
}

SolutionCube rasterize(const AnalyticSolution& solution, const Domain& domain, const CubeDims& dims,
                       double gamma) {
  SolutionCube cube;
  cube.domain = domain;
  cube.dims = dims;
  cube.name = solution.name();
  cube.gamma = gamma;
  cube.provenance = "rasterized:" + solution.name();
  cube.data.resize(dims.nodes() * kNumFields);
  for (std::uint64_t it = 0; it < dims.nt; ++it)
    for (std::uint64_t iy = 0; iy < dims.ny; ++iy)
      for (std::uint64_t ix = 0; ix < dims.nx; ++ix) {
        const PrimitiveState s = solution.state(cube.node(ix, iy, it));
        const std::size_t base = cube.index(ix, iy, it);
        for (std::size_t f = 0; f < kNumFields; ++f) cube.data[base + f] = s[f];
      }
  return cube;
}

namespace {

struct Bracket {
  std::uint64_t i0;
  double w;
};

Bracket bracket(double v, double lo, double hi, std::uint64_t n) {
  if (n <= 1 || hi <= lo) return {0, 0.0};
  double u = (v - lo) / (hi - lo) * static_cast<double>(n - 1);
  const double r = std::round(u);
  if (std::abs(u - r) < 1e-9) u = r;
  auto i0 = static_cast<std::uint64_t>(std::floor(u));
  if (i0 > n - 2) i0 = n - 2;
  return {i0, u - static_cast<double>(i0)};
}

}  // namespace

PrimitiveState sample_cube(const SolutionCube& cube, const Point& p) {
  if (!cube.domain.contains(p)) {
    throw DomainError("cube query (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
                      std::to_string(p.t) + ") outside the cube domain");
  }
  const Domain& d = cube.domain;
  const Bracket bx = bracket(p.x, d.x_min, d.x_max, cube.dims.nx);
  const Bracket by = bracket(p.y, d.y_min, d.y_max, cube.dims.ny);
  const Bracket bt = bracket(p.t, d.t_min, d.t_max, cube.dims.nt);
  PrimitiveState out{};
  for (int ct = 0; ct < 2; ++ct) {
    const double wt = ct ? bt.w : 1.0 - bt.w;
    if (wt == 0.0) continue;
    for (int cy = 0; cy < 2; ++cy) {
      const double wy = cy ? by.w : 1.0 - by.w;
      if (wy == 0.0) continue;
      for (int cx = 0; cx < 2; ++cx) {
        const double wx = cx ? bx.w : 1.0 - bx.w;
        if (wx == 0.0) continue;
        const PrimitiveState s = cube.at(bx.i0 + cx, by.i0 + cy, bt.i0 + ct);
        const double w = wt * wy * wx;
        for (std::size_t f = 0; f < kNumFields; ++f) out[f] += w * s[f];
      }
    }
  }
  return out;
}

double cube_mse(const SolutionCube& cube, const std::vector<PrimitiveState>& prediction) {
  if (prediction.size() != cube.dims.nodes()) {
    throw PreconditionError("prediction count does not match cube node count");
  }
  double sum = 0.0;
  for (std::size_t n = 0; n < prediction.size(); ++n) {
    const std::size_t base = n * kNumFields;
    for (std::size_t f = 0; f < kNumFields; ++f) {
      const double e = prediction[n][f] - cube.data[base + f];
      sum += e * e;
    }
  }
  return sum / static_cast<double>(prediction.size() * kNumFields);
}

}  // namespace mhdpinn
