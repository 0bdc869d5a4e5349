#include "mhdpinn/checkpoint.hpp"

#include <fstream>
#include <string>

#include "binary_io.hpp"
#include "mhdpinn/errors.hpp"

namespace mhdpinn {

using namespace detail;

void save_checkpoint(const std::filesystem::path& path, const Network& net, const Normalizer& norm) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  const MlpConfig& c = net.config();
  os.write("MLPK", 4);
  put_u32(os, kCheckpointVersion);
  put_u64(os, c.hidden_layers);
  put_u64(os, c.hidden_width);
  put_u32(os, static_cast<std::uint32_t>(c.activation));
  put_u64(os, MlpConfig::input_dim);
  put_u64(os, MlpConfig::output_dim);
  put_u64(os, c.seed);
  put_u64(os, net.parameter_count());
  for (const AxisMap& m : norm.inputs) put_f64(os, m.center), put_f64(os, m.half_range);
  for (const AxisMap& m : norm.outputs) put_f64(os, m.center), put_f64(os, m.half_range);
  for (double v : net.parameters()) put_f64(os, v);
  if (!os) throw FormatError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open checkpoint " + path.string());
  char magic[4] = {};
  if (!is.read(magic, 4) || std::string(magic, 4) != "MLPK") throw FormatError("bad checkpoint magic");
  std::uint32_t version = 0, activation = 0;
  std::uint64_t layers = 0, width = 0, in = 0, out = 0, seed = 0, count = 0;
  bool ok = get_u32(is, version) && get_u64(is, layers) && get_u64(is, width) &&
            get_u32(is, activation) && get_u64(is, in) && get_u64(is, out) && get_u64(is, seed) &&
            get_u64(is, count);
  if (!ok) throw FormatError("truncated checkpoint header");
  if (version != kCheckpointVersion) throw FormatError("unsupported checkpoint version");
  if (activation != static_cast<std::uint32_t>(Activation::tanh)) throw FormatError("unknown activation");
  if (in != MlpConfig::input_dim || out != MlpConfig::output_dim) throw FormatError("checkpoint io dims mismatch");
  MlpConfig config;
  config.hidden_layers = layers;
  config.hidden_width = width;
  config.seed = seed;
  config.validate();
  if (count != config.parameter_count()) throw FormatError("checkpoint parameter count mismatch");
  Normalizer norm;
  for (AxisMap& m : norm.inputs) ok = ok && get_f64(is, m.center) && get_f64(is, m.half_range);
  for (AxisMap& m : norm.outputs) ok = ok && get_f64(is, m.center) && get_f64(is, m.half_range);
  std::vector<double> params(count);
  for (double& v : params) ok = ok && get_f64(is, v);
  if (!ok) throw FormatError("truncated checkpoint body");
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in checkpoint");
  return {Network(config, std::move(params)), norm};
}

}  // namespace mhdpinn
