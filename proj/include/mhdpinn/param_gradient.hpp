#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mhdpinn/network.hpp"
#include "mhdpinn/state.hpp"
#include "mhdpinn/tape.hpp"

namespace mhdpinn {

/// Flat d(loss)/d(theta) in the network's canonical parameter order.
using ParamGradient = std::vector<double>;

struct LossGradient {
  double loss = 0.0;
  ParamGradient grad;
};

/// Hands a loss closure network outputs as tape variables. Each evaluation
/// runs the network forward in plain doubles, keeps its trace, and exposes
/// the outputs as tape leaves; after the tape sweep the leaf adjoints are
/// pushed back through the network.
class NetworkEvaluator {
 public:
  NetworkEvaluator(const Network& net, const Normalizer& norm, Tape& tape);
  ~NetworkEvaluator();
  NetworkEvaluator(const NetworkEvaluator&) = delete;
  NetworkEvaluator& operator=(const NetworkEvaluator&) = delete;

  BasicStateJet<TapeVar> jet(const Point& p);
  FieldArray<TapeVar> value(const Point& p);
  /// Parameter k as a tape leaf, for losses that read weights directly.
  TapeVar parameter(std::size_t k);

  Tape& tape() { return tape_; }

  /// Pushes leaf adjoints back through the network in evaluation order.
  void accumulate(ParamGradient& grad) const;

 private:
  struct Records;
  const Network& net_;
  const Normalizer& norm_;
  Tape& tape_;
  std::unique_ptr<Records> records_;
};

using LossClosure = std::function<TapeVar(NetworkEvaluator&)>;

/// Loss value and its exact gradient wrt every network parameter. A
/// non-finite loss raises TrainingFault tagged with `epoch`.
LossGradient loss_param_gradient(const Network& net, const Normalizer& norm,
                                 const LossClosure& closure, long epoch = -1);

}  // namespace mhdpinn
