#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mhdpinn/domain.hpp"
#include "mhdpinn/mhd.hpp"
#include "mhdpinn/state.hpp"

namespace mhdpinn {

/// Closed-form ground truth: values and analytic jets at any point.
class AnalyticSolution {
 public:
  using JetFn = std::function<StateJet(const Point&)>;

  AnalyticSolution(std::string name, JetFn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  const std::string& name() const { return name_; }
  StateJet jet(const Point& p) const { return fn_(p); }
  PrimitiveState state(const Point& p) const { return values_of(fn_(p)); }

 private:
  std::string name_;
  JetFn fn_;
};

/// Circularly polarized Alfven wave on a uniform background. The wave
/// vector must be parallel (or antiparallel) to the in-plane background field.
struct AlfvenParams {
  double rho0 = 1.0;
  double p0 = 1.0;
  double b0x = 1.0;
  double b0y = 0.0;
  double kx = 2.0 * 3.141592653589793;
  double ky = 0.0;
  double amplitude = 0.5;
  double phase = 0.0;
};

/// Signed Alfven speed along the wave vector, B0.k_hat / sqrt(rho0).
double alfven_speed(const AlfvenParams& p);
/// Time for the phase to advance by 2 pi at a fixed position.
double alfven_period(const AlfvenParams& p);

/// Throws PreconditionError for rho0 <= 0, p0 <= 0, B0 = 0, k = 0 or a
/// wave vector not aligned with B0.
AnalyticSolution alfven_wave(const AlfvenParams& params);

/// One field of the manufactured ansatz:
/// mean + amplitude * sin(kx x + px) * cos(ky y + py) * cos(w t + pt).
struct SinusoidProduct {
  double mean = 0.0;
  double amplitude = 0.0;
  double kx = 0.0, px = 0.0;
  double ky = 0.0, py = 0.0;
  double w = 0.0, pt = 0.0;
};

struct ManufacturedParams {
  std::array<SinusoidProduct, kNumFields> fields{};
  PhysParams phys;

  /// Smooth positive-rho/P ansatz on the unit box used by the desk preset.
  static ManufacturedParams desk_default(const PhysParams& phys);
  /// All fields constant (amplitude 0).
  static ManufacturedParams constant(const PrimitiveState& state, const PhysParams& phys);
};

struct ManufacturedSolution {
  AnalyticSolution solution;
  Forcing forcing;  // residuals(solution.jet(p), phys)
};

ManufacturedSolution manufactured(const ManufacturedParams& params);

// ---------------------------------------------------------------------------

struct CubeDims {
  std::uint64_t nx = 0, ny = 0, nt = 0;
  std::uint64_t nodes() const { return nx * ny * nt; }
  friend bool operator==(const CubeDims&, const CubeDims&) = default;
};

/// Gridded reference solution. Nodes cover the closed domain:
/// x_i = x_min + i * (x_max - x_min) / (nx - 1) (a single node sits at x_min).
/// Storage is row-major [t][y][x][field].
struct SolutionCube {
  Domain domain;
  CubeDims dims;
  std::vector<double> data;
  std::string name;
  double gamma = 5.0 / 3.0;
  std::string provenance;

  std::size_t index(std::uint64_t ix, std::uint64_t iy, std::uint64_t it) const {
    return static_cast<std::size_t>(((it * dims.ny + iy) * dims.nx + ix) * kNumFields);
  }
  Point node(std::uint64_t ix, std::uint64_t iy, std::uint64_t it) const;
  PrimitiveState at(std::uint64_t ix, std::uint64_t iy, std::uint64_t it) const;
  std::vector<Point> nodes() const;

  /// Throws CubeLoadError naming the first offending flat index.
  void validate() const;
};

SolutionCube rasterize(const AnalyticSolution& solution, const Domain& domain, const CubeDims& dims,
                       double gamma);

/// Trilinear interpolation; exact at nodes. Throws DomainError outside the domain.
PrimitiveState sample_cube(const SolutionCube& cube, const Point& p);

/// Mean over all nodes and all 8 fields of the squared difference.
double cube_mse(const SolutionCube& cube, const std::vector<PrimitiveState>& prediction);

void save_cube(const std::filesystem::path& path, const SolutionCube& cube);
SolutionCube load_cube(const std::filesystem::path& path);

inline constexpr std::uint32_t kCubeFormatVersion = 1;

}  // namespace mhdpinn
