#include "mhdpinn/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "mhdpinn/errors.hpp"

namespace mhdpinn {

void TrainConfig::validate() const {
  if (total_epochs < 1) throw PreconditionError("total_epochs must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw PreconditionError("lambda must be finite and >= 0");
  if (eval_every < 1) throw PreconditionError("eval_every must be >= 1");
  if (workers < 1) throw PreconditionError("workers must be >= 1");
  phys.validate();
  mlp.validate();
}

TrainConfig TrainConfig::resolved(std::size_t labeled_samples) const {
  TrainConfig c = *this;
  c.schedule.total_epochs = total_epochs;
  c.density.total_epochs = total_epochs;
  c.mlp.seed = seed;
  if (c.n_colloc == 0) c.n_colloc = labeled_samples;
  return c;
}

namespace {

bool finite_terms(const LossTerms& t) {
  return std::isfinite(t.data) && std::isfinite(t.phys) && std::isfinite(t.total);
}

}  // namespace

TrainResult train(const TrainConfig& raw_config, const TrajectorySet& trajectories,
                  const SolutionCube& eval_cube, const Forcing& forcing, const EpochObserver& observer) {
  raw_config.validate();
  if (trajectories.samples.empty()) throw PreconditionError("training needs labeled trajectory samples");
  if (!(trajectories.domain == eval_cube.domain)) {
    throw PreconditionError("trajectory domain and evaluation cube domain differ");
  }
  const TrainConfig config = raw_config.resolved(trajectories.samples.size());
  const std::vector<PrimitiveState> labels = trajectories.labels();

  TrainResult result{Network(config.mlp), Normalizer::fit(trajectories.domain, labels), {}};
  Network& net = result.network;
  const Normalizer& norm = result.normalizer;
  Adam adam(net.parameter_count(), config.adam);

  SamplerConfig sc;
  sc.strategy = config.strategy;
  sc.n_colloc = config.n_colloc;
  sc.schedule = config.schedule;
  sc.density = config.density;
  sc.seed = config.seed;
  const CollocationSampler sampler(sc, trajectories.domain, trajectories.lines);

  const std::vector<Point> eval_nodes = eval_cube.nodes();
  std::vector<double> last_good(net.parameters().begin(), net.parameters().end());
  std::vector<ResidualVector> forcing_values;

  using Clock = std::chrono::steady_clock;
  for (long epoch = 0; epoch < config.total_epochs; ++epoch) {
    const auto start = Clock::now();
    const CollocationBatch batch = sampler.batch(epoch);
    forcing_values.clear();
    if (forcing) {
      forcing_values.reserve(batch.points.size());
      for (const Point& p : batch.points) forcing_values.push_back(forcing(p));
    }
    const LossProblem problem{batch.points, trajectories.samples, forcing_values, config.phys, config.lambda};

    auto abort = [&](const std::string& why) {
      std::copy(last_good.begin(), last_good.end(), net.parameters().begin());
      throw TrainingAborted(why + " at epoch " + std::to_string(epoch), epoch, result);
    };

    LossAndGradient lg;
    try {
      lg = parallel::loss_gradient(net, norm, problem, config.workers);
    } catch (const TrainingFault& e) {
      abort(e.what());
    }
    if (!finite_terms(lg.loss)) abort("non-finite loss");

    const double lr = lr_at(epoch, config.adam.lr, config.lr_schedule, config.total_epochs);
    std::copy(net.parameters().begin(), net.parameters().end(), last_good.begin());
    try {
      adam.step(net.parameters(), lg.grad, lr);
    } catch (const TrainingFault& e) {
      abort(e.what());
    }
    const double elapsed = std::chrono::duration<double, std::milli>(Clock::now() - start).count();

    MetricsRecord rec;
    rec.epoch = epoch;
    rec.l_data = lg.loss.data;
    rec.l_phys = lg.loss.phys;
    rec.l_pinn = lg.loss.total;
    rec.lr = lr;
    rec.wall_time_ms = elapsed;
    rec.curriculum_step = batch.step;
    if ((epoch + 1) % config.eval_every == 0 || epoch + 1 == config.total_epochs) {
      rec.full_grid_mse = cube_mse(eval_cube, parallel::predict(net, norm, eval_nodes, config.workers));
    }
    result.history.push_back(rec);
    if (observer) observer(result.history.back());
  }
  return result;
}

long convergence_epoch(std::span<const MetricsRecord> history, double tol) {
  double best = std::numeric_limits<double>::infinity();
  for (const MetricsRecord& r : history) {
    if (r.full_grid_mse) best = std::min(best, *r.full_grid_mse);
  }
  if (!std::isfinite(best)) throw PreconditionError("history has no evaluated MSE");
  for (const MetricsRecord& r : history) {
    if (r.full_grid_mse && *r.full_grid_mse <= (1.0 + tol) * best) return r.epoch;
  }
  return history.back().epoch;
}

double final_mse(std::span<const MetricsRecord> history) {
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->full_grid_mse) return *it->full_grid_mse;
  }
  throw PreconditionError("history has no evaluated MSE");
}

}  // namespace mhdpinn
