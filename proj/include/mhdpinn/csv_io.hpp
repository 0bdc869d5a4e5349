#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mhdpinn/sampling.hpp"
#include "mhdpinn/trainer.hpp"

namespace mhdpinn {

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

inline constexpr const char* kMetricsHeader =
    "epoch,l_data,l_phys,l_pinn,lr,full_grid_mse,wall_time_ms,curriculum_step";

/// One row per record; full_grid_mse is blank on non-evaluation epochs.
void write_metrics(std::ostream& os, const std::vector<MetricsRecord>& history);
void write_metrics(const std::filesystem::path& path, const std::vector<MetricsRecord>& history);
std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path);

inline constexpr const char* kTrajectoryHeader = "line,s,x,y,t,rho,vx,vy,vz,P,Bx,By,Bz";

/// A `# domain,x_min,x_max,y_min,y_max,t_min,t_max` line, the header, then
/// one row per labeled sample. Lines are rebuilt from each line's s=0 and
/// s=1 samples.
void write_trajectories(const std::filesystem::path& path, const TrajectorySet& set);
TrajectorySet read_trajectories(const std::filesystem::path& path);

inline constexpr const char* kBatchHeader = "epoch,x,y,t";
void write_batch(std::ostream& os, const CollocationBatch& batch, bool header = true);

inline constexpr const char* kComparisonHeader =
    "strategy,n_seeds,median_final_mse,iqr_final_mse,median_convergence_epoch,"
    "iqr_convergence_epoch,mse_improvement_pct,epoch_improvement_pct";

void write_comparison(const std::filesystem::path& path, const Comparison& table);
std::string comparison_summary(const Comparison& table);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace mhdpinn
