#include "mhdpinn/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>

#include "mhdpinn/errors.hpp"

namespace mhdpinn {

using nlohmann::json;

std::string_view to_string(Target t) {
  switch (t) {
    case Target::alfven: return "alfven";
    case Target::manufactured: return "manufactured";
    case Target::cube: return "cube";
  }
  return "unknown";
}

const std::vector<DatasetInfo>& known_datasets() {
  static const std::vector<DatasetInfo> sets = {
      {"GEM", {-25.6, 25.56, -7.68, 7.64, 0.0, 90.0}, {1280, 384, 201}, {5.0 / 3.0, 1.24e-4, 1.88e-3}},
      {"LW3", {0.0, 1.0 - 1.0 / 2048, 0.0, 1.0 - 1.0 / 2048, 0.0, 0.35}, {2048, 2048, 71}, {1.4, 1.58e-3, 6.87e-3}},
      {"OT", {0.0, 1.0 - 1.0 / 1024, 0.0, 1.0 - 1.0 / 1024, 0.0, 0.98}, {1024, 1024, 50}, {5.0 / 3.0, 2.76e-3, 5.59e-3}},
  };
  return sets;
}

const DatasetInfo* find_dataset(std::string_view name) {
  for (const DatasetInfo& d : known_datasets()) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

json datasets_manifest() {
  json j = json::object();
  for (const DatasetInfo& d : known_datasets()) {
    j[d.name] = {{"nu", d.phys.nu},
                 {"eta", d.phys.eta},
                 {"gamma", d.phys.gamma},
                 {"domain", {d.domain.x_min, d.domain.x_max, d.domain.y_min, d.domain.y_max, d.domain.t_min, d.domain.t_max}},
                 {"dims", {d.dims.nx, d.dims.ny, d.dims.nt}}};
  }
  return j;
}

// ---------------------------------------------------------------------------

std::vector<std::string> preset_names() { return {"alfven-desk", "manufactured-desk", "GEM", "LW3", "OT"}; }

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  c.preset = std::string(name);
  c.train.total_epochs = 2000;
  c.train.n_colloc = 100;
  c.train.eval_every = 50;
  c.train.mlp = MlpConfig{};
  c.train.lambda = 0.01;
  if (name == "alfven-desk") {
    c.target = Target::alfven;
    c.domain = {0.0, 1.0, 0.0, 1.0, 0.0, 1.0};
    c.alfven = AlfvenParams{};
    c.train.phys = {5.0 / 3.0, 0.0, 0.0};
    return c;
  }
  if (name == "manufactured-desk") {
    c.target = Target::manufactured;
    c.domain = {0.0, 1.0, 0.0, 1.0, 0.0, 1.0};
    c.train.phys = {5.0 / 3.0, 2.76e-3, 5.59e-3};
    return c;
  }
  if (const DatasetInfo* d = find_dataset(name)) {
    c.target = Target::cube;
    c.dataset = d->name;
    c.domain = d->domain;
    c.eval_dims = d->dims;
    c.train.phys = d->phys;
    c.train.total_epochs = 5000;
    c.train.lambda = 1.0;
    return c;
  }
  throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
}

namespace {

struct Key {
  const char* name;
  std::function<json(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const json&)> set;
};

template <class T>
T as(const json& v) {
  return v.get<T>();
}

Axis parse_axis(const std::string& s) {
  if (s == "x") return Axis::x;
  if (s == "y") return Axis::y;
  if (s == "t") return Axis::t;
  throw std::invalid_argument("axis must be x, y or t");
}

std::string axis_name(Axis a) { return a == Axis::x ? "x" : a == Axis::y ? "y" : "t"; }

Target parse_target(const std::string& s) {
  for (Target t : {Target::alfven, Target::manufactured, Target::cube}) {
    if (to_string(t) == s) return t;
  }
  throw std::invalid_argument("target must be alfven, manufactured or cube");
}

Strategy strategy_from(const std::string& s) {
  const auto st = parse_strategy(s);
  if (!st) throw std::invalid_argument("unknown strategy '" + s + "'");
  return *st;
}

#define MHD_KEY(NAME, TYPE, FIELD)                                        \
  Key {                                                                   \
    NAME, [](const ExperimentConfig& c) { return json(c.FIELD); },        \
        [](ExperimentConfig& c, const json& v) { c.FIELD = as<TYPE>(v); } \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      Key{"preset", [](const ExperimentConfig& c) { return json(c.preset); }, [](ExperimentConfig&, const json&) {}},
      Key{"dataset", [](const ExperimentConfig& c) { return json(c.dataset); },
          [](ExperimentConfig& c, const json& v) {
            c.dataset = as<std::string>(v);
            if (c.dataset.empty()) return;
            const DatasetInfo* d = find_dataset(c.dataset);
            if (!d) throw std::invalid_argument("unknown dataset '" + c.dataset + "'");
            c.train.phys = d->phys;
          }},
      Key{"target", [](const ExperimentConfig& c) { return json(std::string(to_string(c.target))); },
          [](ExperimentConfig& c, const json& v) { c.target = parse_target(as<std::string>(v)); }},
      Key{"domain",
          [](const ExperimentConfig& c) {
            const Domain& d = c.domain;
            return json{d.x_min, d.x_max, d.y_min, d.y_max, d.t_min, d.t_max};
          },
          [](ExperimentConfig& c, const json& v) {
            const auto b = as<std::vector<double>>(v);
            if (b.size() != 6) throw std::invalid_argument("domain needs 6 bounds");
            c.domain = {b[0], b[1], b[2], b[3], b[4], b[5]};
            c.domain.validate();
          }},
      Key{"eval_dims", [](const ExperimentConfig& c) { return json{c.eval_dims.nx, c.eval_dims.ny, c.eval_dims.nt}; },
          [](ExperimentConfig& c, const json& v) {
            const auto d = as<std::vector<std::uint64_t>>(v);
            if (d.size() != 3 || d[0] == 0 || d[1] == 0 || d[2] == 0) throw std::invalid_argument("eval_dims needs 3 positive counts");
            c.eval_dims = {d[0], d[1], d[2]};
          }},
      MHD_KEY("cube_path", std::string, cube_path),
      MHD_KEY("trajectory_frac", double, trajectory_frac),
      MHD_KEY("samples_per_line", std::size_t, samples_per_line),
      MHD_KEY("alfven_rho0", double, alfven.rho0),
      MHD_KEY("alfven_p0", double, alfven.p0),
      MHD_KEY("alfven_b0x", double, alfven.b0x),
      MHD_KEY("alfven_b0y", double, alfven.b0y),
      MHD_KEY("alfven_kx", double, alfven.kx),
      MHD_KEY("alfven_ky", double, alfven.ky),
      MHD_KEY("alfven_amplitude", double, alfven.amplitude),
      MHD_KEY("alfven_phase", double, alfven.phase),
      MHD_KEY("total_epochs", long, train.total_epochs),
      MHD_KEY("lambda", double, train.lambda),
      MHD_KEY("n_colloc", std::size_t, train.n_colloc),
      Key{"strategy", [](const ExperimentConfig& c) { return json(std::string(to_string(c.train.strategy))); },
          [](ExperimentConfig& c, const json& v) { c.train.strategy = strategy_from(as<std::string>(v)); }},
      MHD_KEY("curriculum_fraction", double, train.schedule.curriculum_fraction),
      MHD_KEY("cuboid_steps", std::size_t, train.schedule.cuboid_steps),
      MHD_KEY("cylinder_steps", std::size_t, train.schedule.cylinder_steps),
      Key{"cuboid_axis", [](const ExperimentConfig& c) { return json(axis_name(c.train.schedule.cuboid_axis)); },
          [](ExperimentConfig& c, const json& v) { c.train.schedule.cuboid_axis = parse_axis(as<std::string>(v)); }},
      MHD_KEY("initial_radius_fraction", double, train.schedule.initial_radius_fraction),
      MHD_KEY("resample_every_epoch", bool, train.schedule.resample_every_epoch),
      MHD_KEY("density_k_min", std::size_t, train.density.k_min),
      MHD_KEY("density_k_max", std::size_t, train.density.k_max),
      MHD_KEY("density_max_points", std::size_t, train.density.max_points),
      MHD_KEY("lr", double, train.adam.lr),
      MHD_KEY("beta1", double, train.adam.beta1),
      MHD_KEY("beta2", double, train.adam.beta2),
      MHD_KEY("eps", double, train.adam.eps),
      MHD_KEY("lr_decay", double, train.lr_schedule.decay),
      MHD_KEY("lr_boundaries", std::vector<double>, train.lr_schedule.boundary_fractions),
      MHD_KEY("seed", std::uint64_t, train.seed),
      MHD_KEY("eval_every", long, train.eval_every),
      MHD_KEY("gamma", double, train.phys.gamma),
      MHD_KEY("nu", double, train.phys.nu),
      MHD_KEY("eta", double, train.phys.eta),
      MHD_KEY("hidden_layers", std::size_t, train.mlp.hidden_layers),
      MHD_KEY("hidden_width", std::size_t, train.mlp.hidden_width),
      MHD_KEY("workers", int, train.workers),
  };
  return table;
}

#undef MHD_KEY

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  std::string name = "alfven-desk";
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) throw ConfigError("preset", "must be a string");
    name = j["preset"].get<std::string>();
  }
  ExperimentConfig c = preset(name);
  // dataset first so explicit nu/eta/gamma keys override it
  std::vector<std::string> order;
  if (j.contains("dataset")) order.push_back("dataset");
  for (const auto& [k, v] : j.items()) {
    if (k != "dataset") order.push_back(k);
  }
  for (const std::string& k : order) {
    const auto it = std::find_if(keys().begin(), keys().end(), [&](const Key& key) { return k == key.name; });
    if (it == keys().end()) throw ConfigError(k, "unknown key");
    try {
      it->set(c, j.at(k));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(k, e.what());
    }
  }
  try {
    c.train.validate();
    c.train.schedule.validate();
  } catch (const std::exception& e) {
    throw ConfigError("<train>", e.what());
  }
  if (!(c.trajectory_frac >= 0.0 && c.trajectory_frac <= 1.0)) throw ConfigError("trajectory_frac", "must lie in [0, 1]");
  if (c.samples_per_line < 2) throw ConfigError("samples_per_line", "must be >= 2");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(is, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<syntax>", e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j = json::object();
  for (const Key& k : keys()) j[k.name] = k.get(c);
  return j;
}

// ---------------------------------------------------------------------------

Truth make_truth(const ExperimentConfig& c) {
  Truth t;
  switch (c.target) {
    case Target::alfven: {
      const AnalyticSolution sol = alfven_wave(c.alfven);
      t.state = [sol](const Point& p) { return sol.state(p); };
      t.eval_cube = std::make_shared<SolutionCube>(rasterize(sol, c.domain, c.eval_dims, c.train.phys.gamma));
      break;
    }
    case Target::manufactured: {
      ManufacturedSolution m = manufactured(ManufacturedParams::desk_default(c.train.phys));
      const AnalyticSolution sol = m.solution;
      t.state = [sol](const Point& p) { return sol.state(p); };
      t.eval_cube = std::make_shared<SolutionCube>(rasterize(sol, c.domain, c.eval_dims, c.train.phys.gamma));
      t.forcing = m.forcing;
      break;
    }
    case Target::cube: {
      if (c.cube_path.empty()) throw ConfigError("cube_path", "cube target needs a cube file");
      auto cube = std::make_shared<SolutionCube>(load_cube(c.cube_path));
      t.state = [cube](const Point& p) { return sample_cube(*cube, p); };
      t.eval_cube = cube;
      break;
    }
  }
  return t;
}

RunInputs make_run_inputs(const ExperimentConfig& c, const Truth& truth, std::uint64_t seed) {
  RunInputs in;
  in.trajectories = gen_trajectories(truth.eval_cube->domain, c.trajectory_frac, c.samples_per_line, seed);
  label_trajectories(in.trajectories, truth.state);
  in.eval_cube = truth.eval_cube;
  in.forcing = truth.forcing;
  return in;
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string() + " for checksum");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) {
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace mhdpinn
