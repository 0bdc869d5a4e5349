#pragma once

#include <filesystem>

#include "mhdpinn/network.hpp"

namespace mhdpinn {

/// Network checkpoint, all little-endian:
///   "MLPK" | u32 version | u64 hidden_layers | u64 hidden_width
///   | u32 activation | u64 input_dim | u64 output_dim | u64 seed
///   | u64 parameter_count
///   | normalizer: 3 x (f64 center, f64 half_range) inputs x, y, t,
///                 8 x (f64 center, f64 half_range) outputs in field order
///   | f64 parameters[parameter_count] (canonical order)
struct Checkpoint {
  Network network;
  Normalizer normalizer;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const Network& net, const Normalizer& norm);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mhdpinn
