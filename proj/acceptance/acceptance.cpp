// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. `mhdpinn_acceptance 2 5` runs a subset.
//
// Artifacts for the plotting tool (criterion 6 runs and cylinder batch
// snapshots) go to $MHDPINN_ACCEPTANCE_OUT, default ./acceptance_out.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../tests/residual_oracle.hpp"
#include "../tests/support.hpp"
#include "mhdpinn/config.hpp"
#include "mhdpinn/csv_io.hpp"
#include "mhdpinn/kernels.hpp"
#include "mhdpinn/reference.hpp"
#include "mhdpinn/trainer.hpp"

using namespace mhdpinn;
using namespace mhdpinn::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

fs::path artifact_dir() {
  const char* env = std::getenv("MHDPINN_ACCEPTANCE_OUT");
  fs::path p = env && *env ? fs::path(env) : fs::path("acceptance_out");
  fs::create_directories(p);
  return p;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. derivative correctness

double pair_loss(const Network& net, const Normalizer& norm, const Point& p, const PrimitiveState& label,
                 const ResidualVector& forcing, const PhysParams& phys) {
  const PrimitiveState v = forward_value(net, p, norm);
  double ld = 0.0;
  for (std::size_t f = 0; f < kNumFields; ++f) ld += (v[f] - label[f]) * (v[f] - label[f]);
  ld /= kNumFields;
  const double lp = squared_residual(forward_jet(net, p, norm).state, phys, &forcing);
  return 0.5 * (ld + lp);
}

Verdict criterion_derivatives() {
  std::mt19937_64 rng(2024);
  const Domain d = odd_domain();
  const PhysParams phys{5.0 / 3.0, 0.02, 0.03};
  const double h = 1e-4;
  std::size_t slots = 0, grads = 0, bad_slots = 0, bad_grads = 0;
  for (int pair = 0; pair < 100; ++pair) {
    const Network net_template = random_network(1 + pair % 3, 4 + pair % 7, 100 + pair);
    Network net = net_template;
    const Normalizer norm = random_normalizer(d, rng);
    const Point p = random_point(d, rng);

    const StateJet j = forward_jet(net, p, norm).state;
    auto f = [&](double dx, double dy, double dt) { return forward_value(net, {p.x + dx, p.y + dy, p.t + dt}, norm); };
    const PrimitiveState f0 = f(0, 0, 0), xp = f(h, 0, 0), xm = f(-h, 0, 0), yp = f(0, h, 0), ym = f(0, -h, 0),
                         tp = f(0, 0, h), tm = f(0, 0, -h);
    for (std::size_t k = 0; k < kNumFields; ++k) {
      const double fd[5] = {(xp[k] - xm[k]) / (2 * h), (yp[k] - ym[k]) / (2 * h), (tp[k] - tm[k]) / (2 * h),
                            (xp[k] - 2 * f0[k] + xm[k]) / (h * h), (yp[k] - 2 * f0[k] + ym[k]) / (h * h)};
      const double ad[5] = {j[k].d_x, j[k].d_y, j[k].d_t, j[k].d_xx, j[k].d_yy};
      for (int s = 0; s < 5; ++s) {
        ++slots;
        bad_slots += !fd_close(ad[s], fd[s]);
      }
    }

    const PrimitiveState label = random_state(rng);
    ResidualVector forcing{};
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (double& v : forcing) v = u(rng);
    const std::vector<Point> colloc{p};
    std::vector<LabeledSample> data(1);
    data[0].point = p;
    data[0].label = label;
    const std::vector<ResidualVector> forcings{forcing};
    const LossProblem problem{colloc, data, forcings, phys, 1.0};
    const LossAndGradient lg = parallel::loss_gradient(net, norm, problem, 1);
    const LossAndGradient ls = serial::loss_gradient(net, norm, problem);
    for (std::size_t k = 0; k < net.parameter_count(); ++k) {
      const double keep = net.parameters()[k];
      net.parameters()[k] = keep + h;
      const double up = pair_loss(net, norm, p, label, forcing, phys);
      net.parameters()[k] = keep - h;
      const double down = pair_loss(net, norm, p, label, forcing, phys);
      net.parameters()[k] = keep;
      const double fd = (up - down) / (2 * h);
      grads += 2;
      bad_grads += !fd_close(lg.grad[k], fd);
      bad_grads += !fd_close(ls.grad[k], fd);
    }
  }
  Verdict v;
  v.pass = bad_slots == 0 && bad_grads == 0;
  v.detail = std::to_string(slots) + " jet slots (" + std::to_string(bad_slots) + " off), " + std::to_string(grads) +
             " gradient entries (" + std::to_string(bad_grads) + " off), tol max(1e-5 rel, 1e-7 abs)";
  return v;
}

// ---------------------------------------------------------------------------
// 2. residual oracle

Verdict criterion_residuals() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst_oracle = 0.0;
  for (int i = 0; i < 1000; ++i) {
    StateJet s;
    for (std::size_t f = 0; f < kNumFields; ++f) s[f] = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    const PhysParams p{1.0 + std::abs(u(rng)), std::abs(u(rng)) * 0.05, std::abs(u(rng)) * 0.05};
    const ResidualVector a = residuals(s, p);
    const auto b = oracle_residuals(s, p);
    for (std::size_t k = 0; k < kNumResiduals; ++k) worst_oracle = std::max(worst_oracle, std::abs(a[k] - b[k]));
  }
  const AnalyticSolution wave = alfven_wave(AlfvenParams{});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_wave = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const StateJet s = wave.jet({unit(rng), unit(rng), unit(rng)});
    for (double r : residuals(s, PhysParams{5.0 / 3.0, 0.0, 0.0})) worst_wave = std::max(worst_wave, std::abs(r));
  }
  Verdict v;
  v.pass = worst_oracle <= 1e-12 && worst_wave < 1e-10;
  v.detail = "max |residual - oracle| " + fmt("%.2e", worst_oracle) + " (tol 1e-12), Alfven max residual " +
             fmt("%.2e", worst_wave) + " (tol 1e-10)";
  return v;
}

// ---------------------------------------------------------------------------
// 3. loss identity

Verdict criterion_loss_identity() {
  std::size_t records = 0;
  double worst = 0.0;
  const fs::path tmp = fs::temp_directory_path() / "mhdpinn_acceptance_metrics.csv";
  for (const std::string& name : {std::string("alfven-desk"), std::string("manufactured-desk")}) {
    for (Strategy st : {Strategy::random, Strategy::density, Strategy::cuboid, Strategy::cylinder}) {
      for (double lambda : {0.0, 0.01, 1.0, 7.5}) {
        ExperimentConfig c = preset(name);
        c.eval_dims = {16, 16, 5};
        c.train.total_epochs = 60;
        c.train.strategy = st;
        c.train.lambda = lambda;
        c.train.density.k_max = 6;
        const Truth truth = make_truth(c);
        const RunInputs in = make_run_inputs(c, truth, 3);
        const TrainResult r = train(c.train, in.trajectories, *in.eval_cube, in.forcing);
        write_metrics(tmp, r.history);
        const auto reread = read_metrics(tmp);
        for (const auto* h : {&r.history, &reread}) {
          for (const MetricsRecord& m : *h) {
            const double want = (m.l_data + lambda * m.l_phys) / (1.0 + lambda);
            worst = std::max(worst, std::abs(m.l_pinn - want) / std::max(1.0, std::abs(want)));
            ++records;
          }
        }
      }
    }
  }
  fs::remove(tmp);
  Verdict v;
  v.pass = worst <= 1e-12;
  v.detail = std::to_string(records) + " records (in memory and re-read from CSV), max deviation " + fmt("%.2e", worst);
  return v;
}

// ---------------------------------------------------------------------------
// 4. scaling

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return num / den;
}

// Minimum over repetitions of the per-epoch collocation cost: batch draw plus
// physical loss and gradient.
double epoch_seconds(const CollocationSampler& sampler, const Network& net, const Normalizer& norm,
                     const PhysParams& phys, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    const CollocationBatch b = sampler.batch(1000 + r);
    const LossAndGradient g = parallel::physical_loss_gradient(net, norm, b.points, phys, {}, 1);
    best = std::min(best, seconds_since(t0));
    if (!std::isfinite(g.loss.phys)) return std::nan("");
  }
  return best;
}

Verdict criterion_scaling() {
  const ExperimentConfig c = preset("alfven-desk");
  const Truth truth = make_truth(c);
  const RunInputs in = make_run_inputs(c, truth, 0);
  const Network net(c.train.mlp);
  const Normalizer norm = Normalizer::fit(c.domain, in.trajectories.labels());
  Verdict v;
  const std::vector<double> ns{100, 400, 1600, 6400};
  for (Strategy st : {Strategy::random, Strategy::cuboid, Strategy::cylinder}) {
    std::vector<double> times;
    for (double n : ns) {
      SamplerConfig sc;
      sc.strategy = st;
      sc.n_colloc = static_cast<std::size_t>(n);
      sc.schedule.total_epochs = 5000;
      const CollocationSampler sampler(sc, c.domain, in.trajectories.lines);
      times.push_back(epoch_seconds(sampler, net, norm, c.train.phys, n < 1000 ? 15 : 5));
    }
    const double s = slope(ns, times);
    v.pass = v.pass && std::abs(s - 1.0) <= 0.15;
    v.detail += std::string(to_string(st)) + " slope " + fmt("%.3f", s) + ", ";
  }
  const std::vector<double> ks{4, 8, 16, 32};
  std::vector<double> times;
  for (double k : ks) {
    SamplerConfig sc;
    sc.strategy = Strategy::density;
    sc.density.total_epochs = 10;
    sc.density.k_min = sc.density.k_max = static_cast<std::size_t>(k);
    const CollocationSampler sampler(sc, c.domain, in.trajectories.lines);
    times.push_back(epoch_seconds(sampler, net, norm, c.train.phys, k < 20 ? 7 : 3));
  }
  const double s = slope(ks, times);
  v.pass = v.pass && std::abs(s - 3.0) <= 0.2;
  v.detail += "density slope vs k " + fmt("%.3f", s) + " (want 1.0 +- 0.15 and 3.0 +- 0.2)";
  return v;
}

// ---------------------------------------------------------------------------
// 5. curriculum geometry

Verdict criterion_geometry() {
  const Domain d = odd_domain();
  const TrajectorySet set = gen_trajectories(d, 0.25, 25, 11);
  const double r_max = max_line_distance(d, set.lines);
  std::mt19937_64 rng(5);
  std::vector<Point> probes;
  for (int i = 0; i < 2000; ++i) probes.push_back(random_point(d, rng));

  std::size_t failures = 0;
  std::string why;
  auto fail = [&](const std::string& w) {
    if (failures++ == 0) why = w;
  };
  for (long total : {5000L, 2000L, 777L}) {
    for (Strategy st : {Strategy::random, Strategy::cuboid, Strategy::cylinder}) {
      SamplerConfig sc;
      sc.strategy = st;
      sc.n_colloc = 100;
      sc.schedule.total_epochs = total;
      sc.seed = 1;
      const CollocationSampler sampler(sc, d, set.lines);
      const long full_from = static_cast<long>(std::ceil(0.30 * static_cast<double>(total) - 1e-9));
      std::vector<char> inside_prev(probes.size(), 0);
      for (long e = 0; e < total; ++e) {
        const CollocationBatch b = sampler.batch(e);
        if (b.points.size() != 100) fail("batch size at epoch " + std::to_string(e));
        for (const Point& p : b.points)
          if (!d.contains(p)) fail("point outside domain");
        if (st == Strategy::random) continue;
        const std::size_t steps = st == Strategy::cuboid ? sc.schedule.cuboid_steps : sc.schedule.cylinder_steps;
        if (e >= full_from && b.step != steps) fail("region not full at epoch " + std::to_string(e));
        if (e > 0 && b.step != sampler.step_at(e - 1) && total == 5000 && e % (st == Strategy::cuboid ? 300 : 100) != 0)
          fail("step change off the 300/100 grid at epoch " + std::to_string(e));
        if (total == 5000 && e > 0 && e <= 1500 && e % (st == Strategy::cuboid ? 300 : 100) == 0 &&
            b.step == sampler.step_at(e - 1))
          fail("missing step change at epoch " + std::to_string(e));
        if (e > 0 && b.step == sampler.step_at(e - 1)) continue;
        // region changed (or first epoch): membership of probes may only grow
        std::function<bool(const Point&)> contains;
        if (st == Strategy::cuboid) {
          const CuboidRegion r = CuboidRegion::at_step(d, sc.schedule.cuboid_axis, b.step, steps);
          contains = [r](const Point& p) { return r.contains(p); };
          if (b.step == steps && !(r.box() == d)) fail("final cuboid is not the domain");
        } else {
          const CylinderRegion r = CylinderRegion::at_step(d, set.lines, sc.schedule.initial_radius_fraction, b.step, steps, r_max);
          contains = [r](const Point& p) { return r.contains(p); };
        }
        for (std::size_t i = 0; i < probes.size(); ++i) {
          const bool in = contains(probes[i]);
          if (inside_prev[i] && !in) fail("region shrank at epoch " + std::to_string(e));
          if (b.step == steps && !in) fail("final region misses a domain point");
          inside_prev[i] = in;
        }
        for (const Point& p : b.points)
          if (!contains(p)) fail("batch point outside its region at epoch " + std::to_string(e));
      }
    }
  }
  Verdict v;
  v.pass = failures == 0;
  v.detail = v.pass ? "3 schedules x 3 strategies, every epoch: |batch| = 100, nested regions, full from ceil(0.3 total), "
                      "steps every 300/100 epochs at total 5000"
                    : std::to_string(failures) + " violations, first: " + why;
  return v;
}

// ---------------------------------------------------------------------------
// 6. desk comparison

Verdict criterion_desk_comparison() {
  ExperimentConfig c = preset("alfven-desk");
  c.train.total_epochs = 2000;
  c.train.n_colloc = 100;
  c.eval_dims = {64, 64, 11};
  c.samples_per_line = 25;
  const Truth truth = make_truth(c);
  const fs::path out = artifact_dir() / "criterion6";
  fs::create_directories(out);
  const std::vector<Strategy> strategies{Strategy::random, Strategy::cylinder};
  const InputFactory inputs = [&](std::uint64_t seed) { return make_run_inputs(c, truth, seed); };
  const Comparison cmp = compare_strategies(
      c.train, strategies, 5, inputs, 1, [&](const RunOutcome& run, const TrainResult&) {
        const fs::path rd = out / std::string(to_string(run.strategy)) / ("seed_" + std::to_string(run.seed));
        fs::create_directories(rd);
        write_metrics(rd / "metrics.csv", run.history);
      });
  write_comparison(out / "comparison.csv", cmp);
  std::ofstream(out / "summary.txt") << comparison_summary(cmp);

  // cylinder batch snapshots at steps 0, 7 and 15 for the collocation plot
  const RunInputs in = inputs(c.train.seed);
  const TrainConfig tc = c.train.resolved(in.trajectories.samples.size());
  SamplerConfig sc{Strategy::cylinder, tc.n_colloc, tc.schedule, tc.density, tc.seed};
  const CollocationSampler sampler(sc, c.domain, in.trajectories.lines);
  const long C = tc.schedule.curriculum_epochs();
  const long S = static_cast<long>(tc.schedule.cylinder_steps);
  std::ofstream snap(out / "cylinder_batches.csv");
  bool header = true;
  for (long step : {0L, 7L, 15L}) {
    // first epoch of the step
    write_batch(snap, sampler.batch((step * C + S - 1) / S), header);
    header = false;
  }
  write_trajectories(out / "trajectories.csv", in.trajectories);

  const ComparisonRow& rnd = cmp.rows[0];
  const ComparisonRow& cyl = cmp.rows[1];
  Verdict v;
  v.pass = cyl.median_mse <= rnd.median_mse && cyl.median_epoch <= rnd.median_epoch;
  v.detail = "median MSE cylinder " + fmt("%.4e", cyl.median_mse) + " vs random " + fmt("%.4e", rnd.median_mse) +
             " (" + fmt("%+.1f", cyl.mse_improvement_pct) + "%, paper ~32%), median convergence epoch " +
             fmt("%.0f", cyl.median_epoch) + " vs " + fmt("%.0f", rnd.median_epoch) + " (" +
             fmt("%+.1f", cyl.epoch_improvement_pct) + "%, paper ~35%)";
  return v;
}

// ---------------------------------------------------------------------------
// 7. manufactured training

Verdict criterion_manufactured() {
  ExperimentConfig c = preset("manufactured-desk");
  c.train.total_epochs = 2000;
  const Truth truth = make_truth(c);
  const std::vector<Strategy> strategies{Strategy::random};
  const Comparison cmp = compare_strategies(
      c.train, strategies, 5, [&](std::uint64_t seed) { return make_run_inputs(c, truth, seed); }, 1);
  std::string each;
  for (const RunOutcome& r : cmp.runs) each += fmt("%.2e", r.final_mse) + " ";
  Verdict v;
  v.pass = cmp.rows[0].median_mse < 1e-2;
  v.detail = "nu " + fmt("%.3g", c.train.phys.nu) + ", eta " + fmt("%.3g", c.train.phys.eta) + ", median final MSE " +
             fmt("%.3e", cmp.rows[0].median_mse) + " (tol 1e-2); per seed " + each;
  return v;
}

// ---------------------------------------------------------------------------
// 8. determinism

Verdict criterion_determinism() {
  ExperimentConfig c = preset("alfven-desk");
  c.train.total_epochs = 300;
  c.train.strategy = Strategy::cylinder;
  c.eval_dims = {32, 32, 6};
  const Truth truth = make_truth(c);
  const RunInputs in = make_run_inputs(c, truth, 1);
  auto run = [&](int workers) {
    TrainConfig tc = c.train;
    tc.workers = workers;
    return train(tc, in.trajectories, *in.eval_cube, in.forcing);
  };
  const TrainResult a = run(1), b = run(1), m = run(4);
  bool identical = a.history.size() == b.history.size();
  double worst = 0.0;
  for (std::size_t i = 0; identical && i < a.history.size(); ++i) {
    const MetricsRecord &x = a.history[i], &y = b.history[i], &z = m.history[i];
    identical = x.l_data == y.l_data && x.l_phys == y.l_phys && x.l_pinn == y.l_pinn && x.lr == y.lr &&
                x.full_grid_mse == y.full_grid_mse && x.curriculum_step == y.curriculum_step;
    for (double diff : {x.l_data - z.l_data, x.l_phys - z.l_phys, x.l_pinn - z.l_pinn})
      worst = std::max(worst, std::abs(diff));
    if (x.full_grid_mse) worst = std::max(worst, std::abs(*x.full_grid_mse - *z.full_grid_mse));
  }
  identical = identical && std::equal(a.network.parameters().begin(), a.network.parameters().end(),
                                      b.network.parameters().begin());
  for (std::size_t k = 0; k < a.network.parameter_count(); ++k)
    worst = std::max(worst, std::abs(a.network.parameters()[k] - m.network.parameters()[k]));
  Verdict v;
  v.pass = identical && worst <= 1e-12;
  v.detail = std::string("single-worker reruns ") + (identical ? "bit-identical" : "DIFFER") +
             ", 4 workers vs 1 max deviation " + fmt("%.2e", worst) + " (tol 1e-12)";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    Verdict (*fn)();
  };
  const Criterion all[] = {
      {1, "derivative correctness", criterion_derivatives},
      {2, "residual oracle", criterion_residuals},
      {3, "loss formula identity", criterion_loss_identity},
      {4, "scaling slopes", criterion_scaling},
      {5, "curriculum geometry", criterion_geometry},
      {6, "desk directional reproduction", criterion_desk_comparison},
      {7, "manufactured-solution training", criterion_manufactured},
      {8, "determinism", criterion_determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("[%s] criterion %d %s (%.1fs): %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0),
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
