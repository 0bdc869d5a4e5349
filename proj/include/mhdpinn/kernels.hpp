#pragma once

#include <span>
#include <vector>

#include "mhdpinn/mhd.hpp"
#include "mhdpinn/network.hpp"
#include "mhdpinn/param_gradient.hpp"
#include "mhdpinn/sampling.hpp"

namespace mhdpinn {

/// Everything one epoch's blended loss needs besides the network.
/// `forcing`, when non-empty, holds one source vector per collocation point.
struct LossProblem {
  std::span<const Point> colloc;
  std::span<const LabeledSample> data;
  std::span<const ResidualVector> forcing;
  PhysParams phys;
  double lambda = 1.0;
};

struct LossTerms {
  double data = 0.0;
  double phys = 0.0;
  double total = 0.0;
};

struct LossAndGradient {
  LossTerms loss;
  ParamGradient grad;
};

/// (L_data + lambda * L_phys) / (1 + lambda).
double combined_loss(double l_data, double l_phys, double lambda);

/// Mean over samples of the mean squared error across the 8 fields.
/// Throws PreconditionError without samples.
double data_loss(const Network& net, const Normalizer& norm, std::span<const LabeledSample> data);

/// Residual head: value and d/d(jet) of sum_i (r_i - f_i)^2 at one point.
double squared_residual_adjoint(const StateJet& state, const PhysParams& phys,
                                const ResidualVector* forcing, StateJet& adjoint);

namespace serial {

/// Point-by-point reference: one forward/backward per point through plain
/// loops, accumulated in point order.
LossAndGradient loss_gradient(const Network& net, const Normalizer& norm, const LossProblem& problem);
LossAndGradient physical_loss_gradient(const Network& net, const Normalizer& norm,
                                       std::span<const Point> colloc, const PhysParams& phys,
                                       std::span<const ResidualVector> forcing = {});
std::vector<PrimitiveState> predict(const Network& net, const Normalizer& norm, std::span<const Point> points);

}  // namespace serial

namespace parallel {

/// Points per chunk. Chunk results are reduced in chunk order, so results
/// do not depend on the worker count.
inline constexpr std::size_t kChunk = 32;

LossAndGradient loss_gradient(const Network& net, const Normalizer& norm, const LossProblem& problem,
                              int workers);
LossAndGradient physical_loss_gradient(const Network& net, const Normalizer& norm,
                                       std::span<const Point> colloc, const PhysParams& phys,
                                       std::span<const ResidualVector> forcing, int workers);
std::vector<PrimitiveState> predict(const Network& net, const Normalizer& norm,
                                    std::span<const Point> points, int workers);

}  // namespace parallel

}  // namespace mhdpinn
