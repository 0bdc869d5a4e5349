#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mhdpinn/kernels.hpp"
#include "mhdpinn/mhd.hpp"
#include "mhdpinn/network.hpp"
#include "mhdpinn/optim.hpp"
#include "mhdpinn/reference.hpp"
#include "mhdpinn/sampling.hpp"

namespace mhdpinn {

struct TrainConfig {
  long total_epochs = 5000;
  double lambda = 1.0;
  std::size_t n_colloc = 0;  // 0: one collocation point per labeled sample
  Strategy strategy = Strategy::random;
  CurriculumSchedule schedule;
  DensitySchedule density;
  AdamConfig adam;
  LrSchedule lr_schedule;
  std::uint64_t seed = 0;
  long eval_every = 50;
  PhysParams phys;
  MlpConfig mlp;
  int workers = 1;

  void validate() const;
  /// Copies with total_epochs and seed pushed into the nested schedules.
  TrainConfig resolved(std::size_t labeled_samples) const;
};

struct MetricsRecord {
  long epoch = 0;
  double l_data = 0.0;
  double l_phys = 0.0;
  double l_pinn = 0.0;
  double lr = 0.0;
  std::optional<double> full_grid_mse;
  double wall_time_ms = 0.0;
  std::size_t curriculum_step = 0;
};

struct TrainResult {
  Network network;
  Normalizer normalizer;
  std::vector<MetricsRecord> history;
};

/// Non-finite loss during training. Holds the parameters from before the
/// offending epoch and the metrics recorded so far.
class TrainingAborted : public TrainingFault {
 public:
  TrainingAborted(const std::string& what, long epoch, TrainResult last_good)
      : TrainingFault(what, epoch), last_good_(std::make_shared<TrainResult>(std::move(last_good))) {}
  const TrainResult& last_good() const { return *last_good_; }

 private:
  std::shared_ptr<TrainResult> last_good_;
};

/// Called after every epoch with the freshly appended record.
using EpochObserver = std::function<void(const MetricsRecord&)>;

/// One epoch = draw batch, evaluate blended loss and gradient, one Adam
/// step. Losses in a record are those of the pre-update parameters; the
/// full-grid MSE (every eval_every epochs and at the last epoch) is taken
/// after the update.
TrainResult train(const TrainConfig& config, const TrajectorySet& trajectories,
                  const SolutionCube& eval_cube, const Forcing& forcing = {},
                  const EpochObserver& observer = {});

/// Earliest evaluated epoch with MSE <= (1 + tol) * min MSE of the run.
long convergence_epoch(std::span<const MetricsRecord> history, double tol = 0.02);

/// MSE of the last evaluated record.
double final_mse(std::span<const MetricsRecord> history);

// ---------------------------------------------------------------------------

struct RunInputs {
  TrajectorySet trajectories;
  std::shared_ptr<const SolutionCube> eval_cube;
  Forcing forcing;
};

using InputFactory = std::function<RunInputs(std::uint64_t seed)>;

struct RunOutcome {
  Strategy strategy = Strategy::random;
  std::uint64_t seed = 0;
  std::vector<MetricsRecord> history;
  double final_mse = 0.0;
  long convergence_epoch = 0;
};

struct ComparisonRow {
  Strategy strategy = Strategy::random;
  std::size_t n_seeds = 0;
  double median_mse = 0.0;
  double iqr_mse = 0.0;
  double median_epoch = 0.0;
  double iqr_epoch = 0.0;
  double mse_improvement_pct = 0.0;    // vs baseline, positive = lower MSE
  double epoch_improvement_pct = 0.0;  // vs baseline, positive = fewer epochs
};

struct Comparison {
  Strategy baseline = Strategy::random;
  std::vector<ComparisonRow> rows;
  std::vector<RunOutcome> runs;
};

/// Linear-interpolation quantile (q in [0, 1]) of a non-empty sample.
double quantile(std::vector<double> values, double q);

/// Rows in strategy order; the baseline is `random` when present, else the
/// first strategy.
Comparison summarize(std::span<const Strategy> strategies, std::vector<RunOutcome> runs);

using RunCallback = std::function<void(const RunOutcome&, const TrainResult&)>;

/// Trains every (strategy, seed) pair, seeds base.seed .. base.seed + n - 1.
/// Inputs are built once per seed and shared by all strategies. Up to
/// `jobs` runs execute concurrently; `on_run` is serialized.
Comparison compare_strategies(const TrainConfig& base, std::span<const Strategy> strategies,
                              std::size_t n_seeds, const InputFactory& inputs, int jobs = 1,
                              const RunCallback& on_run = {});

}  // namespace mhdpinn
