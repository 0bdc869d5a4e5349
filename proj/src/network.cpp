#include "mhdpinn/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mhdpinn/errors.hpp"

namespace mhdpinn {

void MlpConfig::validate() const {
  if (hidden_layers < 1) throw PreconditionError("hidden_layers must be >= 1");
  if (hidden_width < 1) throw PreconditionError("hidden_width must be >= 1");
}

std::size_t MlpConfig::parameter_count() const {
  const std::size_t w = hidden_width;
  return (input_dim * w + w) + (hidden_layers - 1) * (w * w + w) + (w * output_dim + output_dim);
}

std::vector<LayerShape> layer_shapes(const MlpConfig& config) {
  config.validate();
  std::vector<LayerShape> shapes;
  std::size_t offset = 0;
  std::size_t in = MlpConfig::input_dim;
  for (std::size_t l = 0; l <= config.hidden_layers; ++l) {
    const bool last = l == config.hidden_layers;
    const std::size_t out = last ? MlpConfig::output_dim : config.hidden_width;
    shapes.push_back({in, out, offset, offset + in * out, !last});
    offset += in * out + out;
    in = out;
  }
  return shapes;
}

Network::Network(const MlpConfig& config)
    : config_(config), layers_(layer_shapes(config)), params_(config.parameter_count(), 0.0) {
  std::mt19937_64 rng(config.seed);
  for (const LayerShape& layer : layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t k = 0; k < layer.in * layer.out; ++k) {
      params_[layer.weight_offset + k] = dist(rng);
    }
  }
}

Network::Network(const MlpConfig& config, std::vector<double> parameters)
    : config_(config), layers_(layer_shapes(config)), params_(std::move(parameters)) {
  if (params_.size() != config_.parameter_count()) {
    throw PreconditionError("parameter vector has " + std::to_string(params_.size()) +
                            " entries, config needs " +
                            std::to_string(config_.parameter_count()));
  }
}

Normalizer Normalizer::fit(const Domain& domain, std::span<const PrimitiveState> labels) {
  Normalizer n;
  for (Axis a : {Axis::x, Axis::y, Axis::t}) {
    const double half = 0.5 * domain.extent(a);
    n.inputs[static_cast<std::size_t>(a)] = {0.5 * (domain.min(a) + domain.max(a)),
                                             half > 0.0 ? half : 1.0};
  }
  if (labels.empty()) return n;
  for (std::size_t f = 0; f < kNumFields; ++f) {
    double lo = labels[0][f], hi = labels[0][f], sum = 0.0;
    for (const PrimitiveState& s : labels) {
      lo = std::min(lo, s[f]);
      hi = std::max(hi, s[f]);
      sum += s[f];
    }
    const double half = 0.5 * (hi - lo);
    n.outputs[f] = {sum / static_cast<double>(labels.size()), half > 1e-12 ? half : 1.0};
  }
  return n;
}

namespace {

constexpr std::size_t V = 0, DX = 1, DY = 2, DT = 3, DXX = 4, DYY = 5;

std::vector<double> input_jets(const Point& p, const Normalizer& norm) {
  std::vector<double> a(kJetChannels * 3, 0.0);
  const double coords[3] = {p.x, p.y, p.t};
  for (std::size_t i = 0; i < 3; ++i) {
    a[V * 3 + i] = norm.inputs[i].forward(coords[i]);
    a[(DX + i) * 3 + i] = 1.0 / norm.inputs[i].half_range;
  }
  return a;
}

void check_finite(const StateJet& s, const Point& p) {
  for (std::size_t f = 0; f < kNumFields; ++f) {
    const Jet<double>& j = s[f];
    for (double v : {j.value, j.d_x, j.d_y, j.d_t, j.d_xx, j.d_yy}) {
      if (!std::isfinite(v)) {
        throw TrainingFault("non-finite network output " + std::string(kFieldNames[f]) +
                                " at (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                ", " + std::to_string(p.t) + ")",
                            -1);
      }
    }
  }
}

}  // namespace

JetEvaluation forward_jet(const Network& net, const Point& p, const Normalizer& norm,
                          JetTrace* trace) {
  const auto w = net.parameters();
  std::vector<double> a = input_jets(p, norm);
  if (trace) {
    trace->inputs.clear();
    trace->pre.clear();
  }
  for (const LayerShape& layer : net.layers()) {
    std::vector<double> z(kJetChannels * layer.out);
    for (std::size_t c = 0; c < kJetChannels; ++c) {
      const double* ac = &a[c * layer.in];
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double* row = &w[layer.weight_offset + o * layer.in];
        double acc = 0.0;
        for (std::size_t i = 0; i < layer.in; ++i) acc += row[i] * ac[i];
        z[c * layer.out + o] = c == V ? acc + w[layer.bias_offset + o] : acc;
      }
    }
    std::vector<double> h = z;
    if (layer.activated) {
      const std::size_t n = layer.out;
      for (std::size_t o = 0; o < n; ++o) {
        const double t = std::tanh(z[V * n + o]);
        const double t1 = 1.0 - t * t;
        const double t2 = -2.0 * t * t1;
        const double zx = z[DX * n + o], zy = z[DY * n + o];
        h[V * n + o] = t;
        h[DX * n + o] = t1 * zx;
        h[DY * n + o] = t1 * zy;
        h[DT * n + o] = t1 * z[DT * n + o];
        h[DXX * n + o] = t2 * (zx * zx) + t1 * z[DXX * n + o];
        h[DYY * n + o] = t2 * (zy * zy) + t1 * z[DYY * n + o];
      }
    }
    if (trace) {
      trace->inputs.push_back(std::move(a));
      trace->pre.push_back(std::move(z));
    }
    a = std::move(h);
  }

  JetEvaluation out;
  constexpr std::size_t n = kNumFields;
  for (std::size_t f = 0; f < n; ++f) {
    const AxisMap& m = norm.outputs[f];
    out.state[f] = Jet<double>{m.inverse(a[V * n + f]),    a[DX * n + f] * m.half_range,
                               a[DY * n + f] * m.half_range, a[DT * n + f] * m.half_range,
                               a[DXX * n + f] * m.half_range, a[DYY * n + f] * m.half_range};
  }
  out.outside_domain = std::abs(norm.inputs[0].forward(p.x)) > 1.0 ||
                       std::abs(norm.inputs[1].forward(p.y)) > 1.0 ||
                       std::abs(norm.inputs[2].forward(p.t)) > 1.0;
  check_finite(out.state, p);
  return out;
}

PrimitiveState forward_value(const Network& net, const Point& p, const Normalizer& norm,
                             ValueTrace* trace) {
  const auto w = net.parameters();
  std::vector<double> a = {norm.inputs[0].forward(p.x), norm.inputs[1].forward(p.y),
                           norm.inputs[2].forward(p.t)};
  if (trace) {
    trace->inputs.clear();
    trace->pre.clear();
  }
  for (const LayerShape& layer : net.layers()) {
    std::vector<double> z(layer.out);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double* row = &w[layer.weight_offset + o * layer.in];
      double acc = 0.0;
      for (std::size_t i = 0; i < layer.in; ++i) acc += row[i] * a[i];
      z[o] = acc + w[layer.bias_offset + o];
    }
    std::vector<double> h = z;
    if (layer.activated) {
      for (double& v : h) v = std::tanh(v);
    }
    if (trace) {
      trace->inputs.push_back(std::move(a));
      trace->pre.push_back(std::move(z));
    }
    a = std::move(h);
  }
  PrimitiveState out;
  for (std::size_t f = 0; f < kNumFields; ++f) out[f] = norm.outputs[f].inverse(a[f]);
  return out;
}

void backward_jet(const Network& net, const Normalizer& norm, const JetTrace& trace,
                  const StateJet& output_adjoint, std::span<double> grad) {
  const auto w = net.parameters();
  const auto& layers = net.layers();
  constexpr std::size_t nf = kNumFields;
  std::vector<double> hb(kJetChannels * nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const double s = norm.outputs[f].half_range;
    const Jet<double>& j = output_adjoint[f];
    hb[V * nf + f] = j.value * s;
    hb[DX * nf + f] = j.d_x * s;
    hb[DY * nf + f] = j.d_y * s;
    hb[DT * nf + f] = j.d_t * s;
    hb[DXX * nf + f] = j.d_xx * s;
    hb[DYY * nf + f] = j.d_yy * s;
  }

  for (std::size_t l = layers.size(); l-- > 0;) {
    const LayerShape& layer = layers[l];
    const std::vector<double>& z = trace.pre[l];
    const std::vector<double>& a = trace.inputs[l];
    const std::size_t n = layer.out;
    std::vector<double> zb = hb;
    if (layer.activated) {
      for (std::size_t o = 0; o < n; ++o) {
        const double t = std::tanh(z[V * n + o]);
        const double t1 = 1.0 - t * t;
        const double t2 = -2.0 * t * t1;
        const double t3 = -2.0 * (t1 * t1 + t * t2);
        const double zx = z[DX * n + o], zy = z[DY * n + o], zt = z[DT * n + o];
        const double bx = hb[DX * n + o], by = hb[DY * n + o], bt = hb[DT * n + o];
        const double bxx = hb[DXX * n + o], byy = hb[DYY * n + o];
        zb[V * n + o] = hb[V * n + o] * t1 + (bx * zx + by * zy + bt * zt) * t2 +
                        bxx * (t3 * zx * zx + t2 * z[DXX * n + o]) +
                        byy * (t3 * zy * zy + t2 * z[DYY * n + o]);
        zb[DX * n + o] = bx * t1 + 2.0 * bxx * t2 * zx;
        zb[DY * n + o] = by * t1 + 2.0 * byy * t2 * zy;
        zb[DT * n + o] = bt * t1;
        zb[DXX * n + o] = bxx * t1;
        zb[DYY * n + o] = byy * t1;
      }
    }
    for (std::size_t o = 0; o < n; ++o) {
      double* grow = &grad[layer.weight_offset + o * layer.in];
      for (std::size_t c = 0; c < kJetChannels; ++c) {
        const double g = zb[c * n + o];
        if (g == 0.0) continue;
        const double* ac = &a[c * layer.in];
        for (std::size_t i = 0; i < layer.in; ++i) grow[i] += g * ac[i];
      }
      grad[layer.bias_offset + o] += zb[V * n + o];
    }
    if (l == 0) break;
    std::vector<double> ab(kJetChannels * layer.in, 0.0);
    for (std::size_t c = 0; c < kJetChannels; ++c) {
      for (std::size_t o = 0; o < n; ++o) {
        const double g = zb[c * n + o];
        if (g == 0.0) continue;
        const double* row = &w[layer.weight_offset + o * layer.in];
        double* abc = &ab[c * layer.in];
        for (std::size_t i = 0; i < layer.in; ++i) abc[i] += row[i] * g;
      }
    }
    hb = std::move(ab);
  }
}

void backward_value(const Network& net, const Normalizer& norm, const ValueTrace& trace,
                    const PrimitiveState& output_adjoint, std::span<double> grad) {
  const auto w = net.parameters();
  const auto& layers = net.layers();
  std::vector<double> hb(kNumFields);
  for (std::size_t f = 0; f < kNumFields; ++f) hb[f] = output_adjoint[f] * norm.outputs[f].half_range;

  for (std::size_t l = layers.size(); l-- > 0;) {
    const LayerShape& layer = layers[l];
    const std::vector<double>& z = trace.pre[l];
    const std::vector<double>& a = trace.inputs[l];
    std::vector<double> zb = hb;
    if (layer.activated) {
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double t = std::tanh(z[o]);
        zb[o] *= 1.0 - t * t;
      }
    }
    for (std::size_t o = 0; o < layer.out; ++o) {
      double* grow = &grad[layer.weight_offset + o * layer.in];
      for (std::size_t i = 0; i < layer.in; ++i) grow[i] += zb[o] * a[i];
      grad[layer.bias_offset + o] += zb[o];
    }
    if (l == 0) break;
    std::vector<double> ab(layer.in, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double* row = &w[layer.weight_offset + o * layer.in];
      for (std::size_t i = 0; i < layer.in; ++i) ab[i] += row[i] * zb[o];
    }
    hb = std::move(ab);
  }
}

}  // namespace mhdpinn
