// mhdpinn: generate reference data, train, compare sampling strategies and
// evaluate checkpoints.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 bad config, 3 missing input
// file, 4 checksum mismatch, 5 training aborted on a non-finite loss.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mhdpinn/checkpoint.hpp"
#include "mhdpinn/config.hpp"
#include "mhdpinn/csv_io.hpp"
#include "mhdpinn/errors.hpp"
#include "mhdpinn/kernels.hpp"
#include "mhdpinn/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mhdpinn;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kMissing = 3, kChecksum = 4, kAborted = 5 };

struct CliError : std::runtime_error {
  CliError(int code, const std::string& kind, const std::string& what)
      : std::runtime_error(what), code(code), kind(kind) {}
  int code;
  std::string kind;
};

void report(const std::string& kind, const std::string& what) {
  std::cerr << "mhdpinn: error kind=" << kind << " msg=\"" << what << "\"\n";
}

struct Overrides {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string strategy;
  std::optional<long> epochs;
  std::optional<std::size_t> n_colloc;
  std::optional<double> lambda;
  std::optional<std::size_t> steps;
  std::optional<int> workers;
};

void add_config_flags(CLI::App* cmd, Overrides& o, bool with_training) {
  cmd->add_option("--config", o.config, "JSON config file (flat keys)");
  cmd->add_option("--preset", o.preset, "preset name, overrides the file's preset");
  cmd->add_option("--seed", o.seed, "RNG seed");
  if (!with_training) return;
  cmd->add_option("--strategy", o.strategy, "random | density | cuboid | cylinder");
  cmd->add_option("--epochs", o.epochs, "total training epochs");
  cmd->add_option("--n-colloc", o.n_colloc, "collocation points per epoch");
  cmd->add_option("--lambda", o.lambda, "physics loss weight");
  cmd->add_option("--steps", o.steps, "curriculum steps for cuboid and cylinder");
  cmd->add_option("--workers", o.workers, "threads inside one training run");
}

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw CliError(kMissing, "missing_file", "no such file: " + p.string());
}

// Precedence: preset < config file < command-line flags.
ExperimentConfig resolve_config(const Overrides& o) {
  json j = json::object();
  if (!o.config.empty()) {
    require_file(o.config);
    std::ifstream is(o.config);
    try {
      j = json::parse(is, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw ConfigError("<syntax>", e.what());
    }
    if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  }
  if (!o.preset.empty()) j["preset"] = o.preset;
  if (o.seed) j["seed"] = *o.seed;
  if (!o.strategy.empty()) j["strategy"] = o.strategy;
  if (o.epochs) j["total_epochs"] = *o.epochs;
  if (o.n_colloc) j["n_colloc"] = *o.n_colloc;
  if (o.lambda) j["lambda"] = *o.lambda;
  if (o.steps) {
    j["cuboid_steps"] = *o.steps;
    j["cylinder_steps"] = *o.steps;
  }
  if (o.workers) j["workers"] = *o.workers;
  return parse_config(j);
}

fs::path output_dir(const std::string& out, const std::string& fallback) {
  fs::path p = out.empty() ? fs::path(fallback) : fs::path(out);
  if (p.is_relative()) {
    if (const char* root = std::getenv("MHDPINN_OUT_ROOT"); root && *root) p = fs::path(root) / p;
  }
  fs::create_directories(p);
  return p;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
}

json dataset_manifest_entry(const ExperimentConfig& c) {
  json d = {{"target", std::string(to_string(c.target))},
            {"nu", c.train.phys.nu},
            {"eta", c.train.phys.eta},
            {"gamma", c.train.phys.gamma}};
  if (!c.dataset.empty()) d["dataset"] = c.dataset;
  return d;
}

// ---------------------------------------------------------------------------

int cmd_gen(const Overrides& o, const std::string& out) {
  const ExperimentConfig c = resolve_config(o);
  if (c.target == Target::cube) throw ConfigError("target", "gen needs an analytic or manufactured target");
  const fs::path dir = output_dir(out, "data");
  const Truth truth = make_truth(c);
  const RunInputs in = make_run_inputs(c, truth, c.train.seed);

  const fs::path cube_path = dir / "cube.mhdc";
  const fs::path traj_path = dir / "trajectories.csv";
  save_cube(cube_path, *truth.eval_cube);
  write_trajectories(traj_path, in.trajectories);
  write_json(dir / "config.json", to_json(c));

  json m = {{"code_version", MHDPINN_VERSION},
            {"seed", c.train.seed},
            {"dataset", dataset_manifest_entry(c)},
            {"files",
             {{"cube", {{"path", cube_path.filename().string()}, {"checksum", file_checksum(cube_path)}}},
              {"trajectories", {{"path", traj_path.filename().string()}, {"checksum", file_checksum(traj_path)}}}}},
            {"config", to_json(c)}};
  write_json(dir / "manifest.json", m);
  std::cout << "wrote " << cube_path.string() << " (" << truth.eval_cube->dims.nx << "x" << truth.eval_cube->dims.ny
            << "x" << truth.eval_cube->dims.nt << ") and " << traj_path.string() << '\n';
  return kOk;
}

struct LoadedData {
  RunInputs inputs;
  json identity;
};

// Loads gen output from `data_dir`, checking file checksums against its
// manifest; without a data dir the inputs are regenerated in memory.
LoadedData load_inputs(const ExperimentConfig& c, const std::string& data_dir) {
  LoadedData d;
  const Truth truth = make_truth(c);
  if (data_dir.empty()) {
    d.inputs = make_run_inputs(c, truth, c.train.seed);
    d.identity = {{"source", "generated"}, {"seed", c.train.seed}};
    return d;
  }
  const fs::path dir(data_dir);
  const fs::path manifest_path = dir / "manifest.json";
  require_file(manifest_path);
  json m;
  {
    std::ifstream is(manifest_path);
    try {
      m = json::parse(is);
    } catch (const json::parse_error& e) {
      throw FormatError("unreadable manifest " + manifest_path.string() + ": " + e.what());
    }
  }
  json files = json::object();
  for (const char* name : {"cube", "trajectories"}) {
    const json& entry = m.at("files").at(name);
    const fs::path p = dir / entry.at("path").get<std::string>();
    require_file(p);
    const std::string sum = file_checksum(p);
    if (sum != entry.at("checksum").get<std::string>()) {
      throw CliError(kChecksum, "checksum_mismatch",
                     p.string() + " has checksum " + sum + ", manifest says " + entry.at("checksum").get<std::string>());
    }
    files[name] = {{"path", fs::absolute(p).string()}, {"checksum", sum}};
  }
  auto cube = std::make_shared<SolutionCube>(load_cube(dir / m["files"]["cube"]["path"].get<std::string>()));
  cube->validate();
  d.inputs.eval_cube = cube;
  d.inputs.trajectories = read_trajectories(dir / m["files"]["trajectories"]["path"].get<std::string>());
  d.inputs.forcing = truth.forcing;
  d.identity = {{"source", fs::absolute(dir).string()}, {"files", files}};
  return d;
}

void write_run(const fs::path& dir, const ExperimentConfig& c, const json& identity) {
  json m = {{"code_version", MHDPINN_VERSION},
            {"seed", c.train.seed},
            {"strategy", std::string(to_string(c.train.strategy))},
            {"dataset", dataset_manifest_entry(c)},
            {"inputs", identity},
            {"outputs", {{"config", "config.json"}, {"metrics", "metrics.csv"}, {"checkpoint", "checkpoint.bin"}}},
            {"config", to_json(c)}};
  write_json(dir / "manifest.json", m);
  write_json(dir / "config.json", to_json(c));
}

int cmd_train(const Overrides& o, const std::string& out, const std::string& data_dir) {
  const ExperimentConfig c = resolve_config(o);
  const LoadedData data = load_inputs(c, data_dir);
  const fs::path dir = output_dir(out, "run");
  write_run(dir, c, data.identity);

  try {
    const TrainResult r = train(c.train, data.inputs.trajectories, *data.inputs.eval_cube, data.inputs.forcing);
    write_metrics(dir / "metrics.csv", r.history);
    save_checkpoint(dir / "checkpoint.bin", r.network, r.normalizer);
    std::cout << "final full-grid MSE " << format_double(final_mse(r.history)) << ", convergence epoch "
              << convergence_epoch(r.history) << '\n';
  } catch (const TrainingAborted& e) {
    write_metrics(dir / "metrics.csv", e.last_good().history);
    save_checkpoint(dir / "checkpoint.bin", e.last_good().network, e.last_good().normalizer);
    throw CliError(kAborted, "training_aborted", std::string(e.what()) + " (epoch " + std::to_string(e.epoch()) + ")");
  }
  return kOk;
}

int cmd_compare(const Overrides& o, const std::string& out, const std::string& strategies_arg, std::size_t n_seeds,
                int jobs) {
  const ExperimentConfig c = resolve_config(o);
  std::vector<Strategy> strategies;
  std::stringstream ss(strategies_arg);
  for (std::string name; std::getline(ss, name, ',');) {
    const auto s = parse_strategy(name);
    if (!s) throw ConfigError("strategies", "unknown strategy '" + name + "'");
    strategies.push_back(*s);
  }
  if (strategies.empty()) throw ConfigError("strategies", "need at least one strategy");
  if (n_seeds == 0) throw ConfigError("seeds", "need at least one seed");

  const fs::path dir = output_dir(out, "compare");
  const Truth truth = make_truth(c);
  const InputFactory factory = [&](std::uint64_t seed) { return make_run_inputs(c, truth, seed); };

  const RunCallback on_run = [&](const RunOutcome& run, const TrainResult& result) {
    ExperimentConfig rc = c;
    rc.train.strategy = run.strategy;
    rc.train.seed = run.seed;
    const fs::path rd = dir / std::string(to_string(run.strategy)) / ("seed_" + std::to_string(run.seed));
    fs::create_directories(rd);
    write_run(rd, rc, {{"source", "generated"}, {"seed", run.seed}});
    write_metrics(rd / "metrics.csv", run.history);
    save_checkpoint(rd / "checkpoint.bin", result.network, result.normalizer);
    std::cout << to_string(run.strategy) << " seed " << run.seed << ": final MSE " << format_double(run.final_mse)
              << ", convergence epoch " << run.convergence_epoch << '\n';
  };

  const Comparison table = compare_strategies(c.train, strategies, n_seeds, factory, jobs, on_run);
  write_comparison(dir / "comparison.csv", table);
  const std::string summary = comparison_summary(table);
  std::ofstream(dir / "summary.txt") << summary;
  std::cout << summary;
  return kOk;
}

int cmd_eval(const Overrides& o, const std::string& checkpoint, const std::string& data_dir) {
  require_file(checkpoint);
  const ExperimentConfig c = resolve_config(o);
  const LoadedData data = load_inputs(c, data_dir);
  const Checkpoint ck = load_checkpoint(checkpoint);
  const SolutionCube& cube = *data.inputs.eval_cube;
  const std::vector<PrimitiveState> pred = parallel::predict(ck.network, ck.normalizer, cube.nodes(), c.train.workers);
  std::cout << format_double(cube_mse(cube, pred)) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curriculum-sampled PINN reconstruction of 2D MHD fields"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MHDPINN_VERSION);

  Overrides o;
  std::string out, data_dir, checkpoint, strategies = "random,cuboid,cylinder";
  std::size_t n_seeds = 5;
  int jobs = 1;

  CLI::App* gen = app.add_subcommand("gen", "write an MHDC cube and a trajectory file");
  add_config_flags(gen, o, false);
  gen->add_option("--out", out, "output directory");

  CLI::App* tr = app.add_subcommand("train", "train one network");
  add_config_flags(tr, o, true);
  tr->add_option("--data", data_dir, "directory written by gen (default: regenerate in memory)");
  tr->add_option("--out", out, "run directory");

  CLI::App* cmp = app.add_subcommand("compare", "train every strategy over several seeds");
  add_config_flags(cmp, o, true);
  cmp->add_option("--strategies", strategies, "comma-separated strategy list");
  cmp->add_option("--seeds", n_seeds, "number of seeds, starting at --seed");
  cmp->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);
  cmp->add_option("--out", out, "output directory");

  CLI::App* ev = app.add_subcommand("eval", "full-grid MSE of a checkpoint");
  add_config_flags(ev, o, false);
  ev->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  ev->add_option("--data", data_dir, "directory written by gen (default: regenerate in memory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*gen) return cmd_gen(o, out);
    if (*tr) return cmd_train(o, out, data_dir);
    if (*cmp) return cmd_compare(o, out, strategies, n_seeds, jobs);
    if (*ev) return cmd_eval(o, checkpoint, data_dir);
  } catch (const ConfigError& e) {
    std::cerr << "mhdpinn: error kind=config key=" << e.key() << " msg=\"" << e.what() << "\"\n";
    return kConfig;
  } catch (const CliError& e) {
    report(e.kind, e.what());
    return e.code;
  } catch (const TrainingFault& e) {
    report("training_aborted", e.what());
    return kAborted;
  } catch (const std::exception& e) {
    report("failure", e.what());
    return kFailure;
  }
  return kFailure;
}
