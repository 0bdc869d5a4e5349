#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mhdpinn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

/// Bias-corrected Adam. Moments start at zero, timestep at 0.
class Adam {
 public:
  Adam(std::size_t n, AdamConfig config);

  /// Throws TrainingFault on a non-finite gradient entry (params untouched).
  void step(std::span<double> params, std::span<const double> grad, double lr);

  long timestep() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  long t_ = 0;
};

/// Piecewise-constant decay: the base rate times `decay` for every boundary
/// (given as fractions of the run) that the epoch has reached.
struct LrSchedule {
  double decay = 0.5;
  std::vector<double> boundary_fractions{0.4, 0.7, 0.9};
  friend bool operator==(const LrSchedule&, const LrSchedule&) = default;
};

std::vector<long> lr_boundaries(const LrSchedule& schedule, long total_epochs);
double lr_at(long epoch, double lr0, const LrSchedule& schedule, long total_epochs);

}  // namespace mhdpinn
