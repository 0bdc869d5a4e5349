#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "mhdpinn/mhd.hpp"
#include "mhdpinn/network.hpp"
#include "mhdpinn/sampling.hpp"

namespace mhdpinn::testing {

/// max(1e-5 relative, 1e-7 absolute), measured against the reference value.
inline bool fd_close(double value, double reference) {
  return std::abs(value - reference) <= std::max(1e-5 * std::abs(reference), 1e-7);
}

inline Domain odd_domain() { return {-0.5, 1.5, 0.0, 2.0, 0.0, 3.0}; }

inline Point random_point(const Domain& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {d.x_min + u(rng) * (d.x_max - d.x_min), d.y_min + u(rng) * (d.y_max - d.y_min),
          d.t_min + u(rng) * (d.t_max - d.t_min)};
}

/// Network with randomized (non-zero) biases so bias gradients are exercised.
inline Network random_network(std::size_t layers, std::size_t width, std::uint64_t seed) {
  MlpConfig cfg;
  cfg.hidden_layers = layers;
  cfg.hidden_width = width;
  cfg.seed = seed;
  Network net(cfg);
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (const LayerShape& l : net.layers()) {
    for (std::size_t i = 0; i < l.out; ++i) net.parameters()[l.bias_offset + i] = u(rng);
  }
  return net;
}

/// Normalizer with non-trivial output scales.
inline Normalizer random_normalizer(const Domain& d, std::mt19937_64& rng) {
  std::vector<PrimitiveState> labels(2);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (std::size_t f = 0; f < kNumFields; ++f) {
    labels[0][f] = u(rng);
    labels[1][f] = labels[0][f] + u(rng);
  }
  return Normalizer::fit(d, labels);
}

inline PrimitiveState random_state(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  PrimitiveState s;
  for (std::size_t f = 0; f < kNumFields; ++f) s[f] = u(rng);
  return s;
}

}  // namespace mhdpinn::testing
