#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mhdpinn/reference.hpp"
#include "mhdpinn/trainer.hpp"

namespace mhdpinn {

/// Unknown key or bad value in a config file; `key()` names the culprit.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Target { alfven, manufactured, cube };

std::string_view to_string(Target t);

/// Grid and transport coefficients of one of the simulation datasets.
struct DatasetInfo {
  std::string name;
  Domain domain;
  CubeDims dims;
  PhysParams phys;
};

/// GEM, LW3 and OT with their tuned nu/eta.
const std::vector<DatasetInfo>& known_datasets();
const DatasetInfo* find_dataset(std::string_view name);
nlohmann::json datasets_manifest();

struct ExperimentConfig {
  std::string preset = "alfven-desk";
  std::string dataset;  // optional DatasetInfo name supplying nu/eta/gamma
  Target target = Target::alfven;
  Domain domain;
  CubeDims eval_dims{64, 64, 11};
  AlfvenParams alfven;
  std::string cube_path;
  double trajectory_frac = 0.25;
  std::size_t samples_per_line = 25;
  TrainConfig train;
};

std::vector<std::string> preset_names();
/// Throws ConfigError("preset", ...) for unknown names.
ExperimentConfig preset(std::string_view name);

/// Applies a flat JSON object on top of the preset it names (key "preset",
/// default alfven-desk). Throws ConfigError naming the first bad key.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& c);

/// Ground truth for an experiment: labels, the evaluation cube and (for
/// manufactured targets) the forcing.
struct Truth {
  std::function<PrimitiveState(const Point&)> state;
  std::shared_ptr<const SolutionCube> eval_cube;
  Forcing forcing;
};

Truth make_truth(const ExperimentConfig& c);
RunInputs make_run_inputs(const ExperimentConfig& c, const Truth& truth, std::uint64_t seed);

/// 64-bit FNV-1a over a file's bytes, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace mhdpinn
