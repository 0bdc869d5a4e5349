#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "mhdpinn/errors.hpp"
#include "mhdpinn/trainer.hpp"

namespace mhdpinn {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw PreconditionError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(values.size() - 1, lo + 1);
  const double w = pos - static_cast<double>(lo);
  return values[lo] + w * (values[hi] - values[lo]);
}

namespace {

double improvement(double baseline, double value) {
  return baseline == 0.0 ? 0.0 : 100.0 * (baseline - value) / baseline;
}

}  // namespace

Comparison summarize(std::span<const Strategy> strategies, std::vector<RunOutcome> runs) {
  if (strategies.empty()) throw PreconditionError("comparison needs at least one strategy");
  Comparison out;
  out.baseline = std::find(strategies.begin(), strategies.end(), Strategy::random) != strategies.end()
                     ? Strategy::random
                     : strategies.front();
  for (Strategy s : strategies) {
    std::vector<double> mse, epochs;
    for (const RunOutcome& r : runs) {
      if (r.strategy != s) continue;
      mse.push_back(r.final_mse);
      epochs.push_back(static_cast<double>(r.convergence_epoch));
    }
    ComparisonRow row;
    row.strategy = s;
    row.n_seeds = mse.size();
    if (!mse.empty()) {
      row.median_mse = quantile(mse, 0.5);
      row.iqr_mse = quantile(mse, 0.75) - quantile(mse, 0.25);
      row.median_epoch = quantile(epochs, 0.5);
      row.iqr_epoch = quantile(epochs, 0.75) - quantile(epochs, 0.25);
    }
    out.rows.push_back(row);
  }
  const auto base = std::find_if(out.rows.begin(), out.rows.end(),
                                 [&](const ComparisonRow& r) { return r.strategy == out.baseline; });
  for (ComparisonRow& row : out.rows) {
    row.mse_improvement_pct = improvement(base->median_mse, row.median_mse);
    row.epoch_improvement_pct = improvement(base->median_epoch, row.median_epoch);
  }
  out.runs = std::move(runs);
  return out;
}

Comparison compare_strategies(const TrainConfig& base, std::span<const Strategy> strategies,
                              std::size_t n_seeds, const InputFactory& inputs, int jobs,
                              const RunCallback& on_run) {
  if (n_seeds < 1) throw PreconditionError("comparison needs at least one seed");
  if (strategies.empty()) throw PreconditionError("comparison needs at least one strategy");
  std::vector<RunInputs> per_seed;
  for (std::size_t i = 0; i < n_seeds; ++i) per_seed.push_back(inputs(base.seed + i));

  struct Task {
    Strategy strategy;
    std::size_t seed_index;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < n_seeds; ++i)
    for (Strategy s : strategies) tasks.push_back({s, i});

  std::vector<RunOutcome> outcomes(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;

  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      const Task& task = tasks[k];
      try {
        TrainConfig cfg = base;
        cfg.strategy = task.strategy;
        cfg.seed = base.seed + task.seed_index;
        const RunInputs& in = per_seed[task.seed_index];
        TrainResult res = train(cfg, in.trajectories, *in.eval_cube, in.forcing);
        RunOutcome& out = outcomes[k];
        out.strategy = task.strategy;
        out.seed = cfg.seed;
        out.history = res.history;
        out.final_mse = final_mse(res.history);
        out.convergence_epoch = convergence_epoch(res.history);
        if (on_run) {
          std::lock_guard lock(callback_mutex);
          on_run(out, res);
        }
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return summarize(strategies, std::move(outcomes));
}

}  // namespace mhdpinn
