#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mhdpinn/domain.hpp"
#include "mhdpinn/state.hpp"

namespace mhdpinn {

enum class Activation : std::uint32_t { tanh = 0 };

struct MlpConfig {
  static constexpr std::size_t input_dim = 3;
  static constexpr std::size_t output_dim = kNumFields;

  std::size_t hidden_layers = 5;
  std::size_t hidden_width = 64;
  Activation activation = Activation::tanh;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t parameter_count() const;

  friend bool operator==(const MlpConfig&, const MlpConfig&) = default;
};

/// Offsets of one dense layer inside the flat parameter vector. Weights are
/// row-major (out x in) followed by the `out` biases.
struct LayerShape {
  std::size_t in;
  std::size_t out;
  std::size_t weight_offset;
  std::size_t bias_offset;
  bool activated;  // false for the linear output layer
};

/// Affine map of one axis onto [-1, 1]: normalized = (v - center) / half_range.
struct AxisMap {
  double center = 0.0;
  double half_range = 1.0;

  double forward(double v) const { return (v - center) / half_range; }
  double inverse(double n) const { return n * half_range + center; }

  friend bool operator==(const AxisMap&, const AxisMap&) = default;
};

/// Input and output conditioning of the network. Physical outputs are
/// `outputs[i].inverse(raw_i)`; since inputs are seeded with physical-unit
/// derivatives (1 / half_range), every jet slot leaves the network in
/// physical coordinates.
struct Normalizer {
  std::array<AxisMap, 3> inputs{};
  std::array<AxisMap, kNumFields> outputs{};

  static Normalizer identity() { return {}; }

  /// Inputs from the domain bounds; outputs from mean and half-range of the
  /// labels. A field whose half-range is below 1e-12 keeps unit scale.
  static Normalizer fit(const Domain& domain, std::span<const PrimitiveState> labels);

  friend bool operator==(const Normalizer&, const Normalizer&) = default;
};

/// Dense tanh MLP from (x, y, t) to the 8 primitive variables.
class Network {
 public:
  /// Glorot-uniform weights from the seeded RNG, zero biases.
  explicit Network(const MlpConfig& config);
  Network(const MlpConfig& config, std::vector<double> parameters);

  const MlpConfig& config() const { return config_; }
  const std::vector<LayerShape>& layers() const { return layers_; }
  std::size_t parameter_count() const { return params_.size(); }
  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }

 private:
  MlpConfig config_;
  std::vector<LayerShape> layers_;
  std::vector<double> params_;
};

std::vector<LayerShape> layer_shapes(const MlpConfig& config);

/// Intermediate jets of one point, kept for the reverse sweep. For every
/// layer `l`, `inputs[l]` holds 6 channels x in and `pre[l]` 6 channels x out
/// (channel-major: value, d_x, d_y, d_t, d_xx, d_yy).
struct JetTrace {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> pre;
};

struct ValueTrace {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> pre;
};

inline constexpr std::size_t kJetChannels = 6;

/// Out-of-domain points are still evaluated; `outside_domain` is set.
struct JetEvaluation {
  StateJet state;
  bool outside_domain = false;
};

/// Value + 5 derivatives of every output at one point, physical units.
/// Throws TrainingFault on non-finite output.
JetEvaluation forward_jet(const Network& net, const Point& p, const Normalizer& norm,
                          JetTrace* trace = nullptr);

/// Derivative-free forward pass; bit-identical to forward_jet's value slot.
PrimitiveState forward_value(const Network& net, const Point& p, const Normalizer& norm,
                             ValueTrace* trace = nullptr);

/// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output jet).
void backward_jet(const Network& net, const Normalizer& norm, const JetTrace& trace,
                  const StateJet& output_adjoint, std::span<double> grad);

void backward_value(const Network& net, const Normalizer& norm, const ValueTrace& trace,
                    const PrimitiveState& output_adjoint, std::span<double> grad);

}  // namespace mhdpinn
