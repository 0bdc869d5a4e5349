#include "mhdpinn/param_gradient.hpp"

#include <cmath>
#include <string>

#include "mhdpinn/errors.hpp"

namespace mhdpinn {

struct NetworkEvaluator::Records {
  struct JetRecord {
    JetTrace trace;
    BasicStateJet<TapeVar> leaves;
  };
  struct ValueRecord {
    ValueTrace trace;
    FieldArray<TapeVar> leaves;
  };
  std::vector<JetRecord> jets;
  std::vector<ValueRecord> values;
  std::vector<std::pair<std::size_t, TapeVar>> params;
};

NetworkEvaluator::NetworkEvaluator(const Network& net, const Normalizer& norm, Tape& tape)
    : net_(net), norm_(norm), tape_(tape), records_(std::make_unique<Records>()) {}

NetworkEvaluator::~NetworkEvaluator() = default;

BasicStateJet<TapeVar> NetworkEvaluator::jet(const Point& p) {
  Records::JetRecord rec;
  const StateJet s = forward_jet(net_, p, norm_, &rec.trace).state;
  for (std::size_t f = 0; f < kNumFields; ++f) {
    rec.leaves[f] = Jet<TapeVar>{tape_.variable(s[f].value), tape_.variable(s[f].d_x),
                                 tape_.variable(s[f].d_y),   tape_.variable(s[f].d_t),
                                 tape_.variable(s[f].d_xx),  tape_.variable(s[f].d_yy)};
  }
  records_->jets.push_back(std::move(rec));
  return records_->jets.back().leaves;
}

FieldArray<TapeVar> NetworkEvaluator::value(const Point& p) {
  Records::ValueRecord rec;
  const PrimitiveState s = forward_value(net_, p, norm_, &rec.trace);
  for (std::size_t f = 0; f < kNumFields; ++f) rec.leaves[f] = tape_.variable(s[f]);
  records_->values.push_back(std::move(rec));
  return records_->values.back().leaves;
}

TapeVar NetworkEvaluator::parameter(std::size_t k) {
  TapeVar v = tape_.variable(net_.parameters()[k]);
  records_->params.emplace_back(k, v);
  return v;
}

void NetworkEvaluator::accumulate(ParamGradient& grad) const {
  for (const auto& rec : records_->jets) {
    StateJet adj;
    for (std::size_t f = 0; f < kNumFields; ++f) {
      const Jet<TapeVar>& l = rec.leaves[f];
      adj[f] = Jet<double>{tape_.adjoint(l.value), tape_.adjoint(l.d_x),  tape_.adjoint(l.d_y),
                           tape_.adjoint(l.d_t),   tape_.adjoint(l.d_xx), tape_.adjoint(l.d_yy)};
    }
    backward_jet(net_, norm_, rec.trace, adj, grad);
  }
  for (const auto& rec : records_->values) {
    PrimitiveState adj;
    for (std::size_t f = 0; f < kNumFields; ++f) adj[f] = tape_.adjoint(rec.leaves[f]);
    backward_value(net_, norm_, rec.trace, adj, grad);
  }
  for (const auto& [k, v] : records_->params) grad[k] += tape_.adjoint(v);
}

LossGradient loss_param_gradient(const Network& net, const Normalizer& norm,
                                 const LossClosure& closure, long epoch) {
  Tape tape;
  NetworkEvaluator eval(net, norm, tape);
  const TapeVar loss = closure(eval);
  if (!std::isfinite(loss.value())) {
    throw TrainingFault("non-finite loss " + std::to_string(loss.value()) +
                            (epoch >= 0 ? " at epoch " + std::to_string(epoch) : std::string{}),
                        epoch);
  }
  tape.backward(loss);
  LossGradient out{loss.value(), ParamGradient(net.parameter_count(), 0.0)};
  eval.accumulate(out.grad);
  return out;
}

}  // namespace mhdpinn
