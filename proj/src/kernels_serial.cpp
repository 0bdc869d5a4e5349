#include <cmath>

#include "mhdpinn/errors.hpp"
#include "mhdpinn/kernels.hpp"
#include "mhdpinn/tape.hpp"

namespace mhdpinn {

double combined_loss(double l_data, double l_phys, double lambda) {
  return (l_data + lambda * l_phys) / (1.0 + lambda);
}

double data_loss(const Network& net, const Normalizer& norm, std::span<const LabeledSample> data) {
  if (data.empty()) throw PreconditionError("data loss without labeled samples");
  double sum = 0.0;
  for (const LabeledSample& s : data) {
    const PrimitiveState u = forward_value(net, s.point, norm);
    double point = 0.0;
    for (std::size_t f = 0; f < kNumFields; ++f) {
      const double e = u[f] - s.label[f];
      point += e * e;
    }
    sum += point / static_cast<double>(kNumFields);
  }
  return sum / static_cast<double>(data.size());
}

double squared_residual_adjoint(const StateJet& state, const PhysParams& phys,
                                const ResidualVector* forcing, StateJet& adjoint) {
  thread_local Tape tape;
  tape.clear();
  BasicStateJet<TapeVar> leaves;
  for (std::size_t f = 0; f < kNumFields; ++f) {
    const Jet<double>& j = state[f];
    leaves[f] = Jet<TapeVar>{tape.variable(j.value), tape.variable(j.d_x),  tape.variable(j.d_y),
                             tape.variable(j.d_t),   tape.variable(j.d_xx), tape.variable(j.d_yy)};
  }
  const TapeVar loss = squared_residual(leaves, phys, forcing);
  tape.backward(loss);
  for (std::size_t f = 0; f < kNumFields; ++f) {
    const Jet<TapeVar>& l = leaves[f];
    adjoint[f] = Jet<double>{tape.adjoint(l.value), tape.adjoint(l.d_x),  tape.adjoint(l.d_y),
                             tape.adjoint(l.d_t),   tape.adjoint(l.d_xx), tape.adjoint(l.d_yy)};
  }
  return loss.value();
}

namespace serial {

namespace {

void scale(StateJet& s, double w) {
  for (std::size_t f = 0; f < kNumFields; ++f) s[f] = w * s[f];
}

double accumulate_physical(const Network& net, const Normalizer& norm, std::span<const Point> colloc,
                           const PhysParams& phys, std::span<const ResidualVector> forcing,
                           double weight, ParamGradient& grad) {
  if (colloc.empty()) throw PreconditionError("physical loss of an empty collocation batch");
  if (!forcing.empty() && forcing.size() != colloc.size()) {
    throw PreconditionError("forcing count does not match collocation count");
  }
  const double inv_n = 1.0 / static_cast<double>(colloc.size());
  double sum = 0.0;
  JetTrace trace;
  for (std::size_t i = 0; i < colloc.size(); ++i) {
    const StateJet s = forward_jet(net, colloc[i], norm, &trace).state;
    StateJet adj;
    sum += squared_residual_adjoint(s, phys, forcing.empty() ? nullptr : &forcing[i], adj);
    scale(adj, weight * inv_n);
    backward_jet(net, norm, trace, adj, grad);
  }
  return sum * inv_n;
}

}  // namespace

LossAndGradient loss_gradient(const Network& net, const Normalizer& norm, const LossProblem& problem) {
  if (problem.data.empty()) throw PreconditionError("data loss without labeled samples");
  LossAndGradient out{{}, ParamGradient(net.parameter_count(), 0.0)};
  const double lam = problem.lambda;
  out.loss.phys = accumulate_physical(net, norm, problem.colloc, problem.phys, problem.forcing,
                                      lam / (1.0 + lam), out.grad);

  const double inv_nd = 1.0 / static_cast<double>(problem.data.size());
  const double w_data = 1.0 / (1.0 + lam);
  ValueTrace trace;
  double sum = 0.0;
  for (const LabeledSample& s : problem.data) {
    const PrimitiveState u = forward_value(net, s.point, norm, &trace);
    PrimitiveState adj;
    double point = 0.0;
    for (std::size_t f = 0; f < kNumFields; ++f) {
      const double e = u[f] - s.label[f];
      point += e * e;
      adj[f] = w_data * inv_nd * 2.0 * e / static_cast<double>(kNumFields);
    }
    sum += point / static_cast<double>(kNumFields);
    backward_value(net, norm, trace, adj, out.grad);
  }
  out.loss.data = sum * inv_nd;
  out.loss.total = combined_loss(out.loss.data, out.loss.phys, lam);
  return out;
}

LossAndGradient physical_loss_gradient(const Network& net, const Normalizer& norm,
                                       std::span<const Point> colloc, const PhysParams& phys,
                                       std::span<const ResidualVector> forcing) {
  LossAndGradient out{{}, ParamGradient(net.parameter_count(), 0.0)};
  out.loss.phys = accumulate_physical(net, norm, colloc, phys, forcing, 1.0, out.grad);
  out.loss.total = out.loss.phys;
  return out;
}

std::vector<PrimitiveState> predict(const Network& net, const Normalizer& norm, std::span<const Point> points) {
  std::vector<PrimitiveState> out;
  out.reserve(points.size());
  for (const Point& p : points) out.push_back(forward_value(net, p, norm));
  return out;
}

}  // namespace serial
}  // namespace mhdpinn
