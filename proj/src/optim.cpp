#include "mhdpinn/optim.hpp"

#include <cmath>
#include <string>

#include "mhdpinn/errors.hpp"

namespace mhdpinn {

Adam::Adam(std::size_t n, AdamConfig config) : config_(config), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad, double lr) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw PreconditionError("adam state size does not match parameters");
  }
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw TrainingFault("non-finite gradient entry " + std::to_string(i), -1);
    }
  }
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.eps);
  }
}

std::vector<long> lr_boundaries(const LrSchedule& schedule, long total_epochs) {
  std::vector<long> out;
  for (double f : schedule.boundary_fractions) {
    out.push_back(std::lround(f * static_cast<double>(total_epochs)));
  }
  return out;
}

double lr_at(long epoch, double lr0, const LrSchedule& schedule, long total_epochs) {
  double lr = lr0;
  for (long b : lr_boundaries(schedule, total_epochs)) {
    if (epoch >= b) lr *= schedule.decay;
  }
  return lr;
}

}  // namespace mhdpinn
