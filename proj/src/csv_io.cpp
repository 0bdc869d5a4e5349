#include "mhdpinn/csv_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mhdpinn/errors.hpp"

namespace mhdpinn {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

namespace {

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw FormatError("bad number '" + s + "' in " + what);
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw FormatError("bad integer '" + s + "' in " + what);
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  return os;
}

}  // namespace

void write_metrics(std::ostream& os, const std::vector<MetricsRecord>& history) {
  os << kMetricsHeader << '\n';
  for (const MetricsRecord& r : history) {
    os << r.epoch << ',' << format_double(r.l_data) << ',' << format_double(r.l_phys) << ','
       << format_double(r.l_pinn) << ',' << format_double(r.lr) << ','
       << (r.full_grid_mse ? format_double(*r.full_grid_mse) : std::string{}) << ','
       << format_double(r.wall_time_ms) << ',' << r.curriculum_step << '\n';
  }
}

void write_metrics(const std::filesystem::path& path, const std::vector<MetricsRecord>& history) {
  std::ofstream os = open_out(path);
  write_metrics(os, history);
}

std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open metrics file " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != kMetricsHeader) throw FormatError("unexpected metrics header in " + path.string());
  std::vector<MetricsRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 8) throw FormatError("metrics row with " + std::to_string(c.size()) + " columns");
    MetricsRecord r;
    r.epoch = parse_long(c[0], "epoch");
    r.l_data = parse_double(c[1], "l_data");
    r.l_phys = parse_double(c[2], "l_phys");
    r.l_pinn = parse_double(c[3], "l_pinn");
    r.lr = parse_double(c[4], "lr");
    if (!c[5].empty()) r.full_grid_mse = parse_double(c[5], "full_grid_mse");
    r.wall_time_ms = parse_double(c[6], "wall_time_ms");
    r.curriculum_step = static_cast<std::size_t>(parse_long(c[7], "curriculum_step"));
    out.push_back(r);
  }
  return out;
}

void write_trajectories(const std::filesystem::path& path, const TrajectorySet& set) {
  std::ofstream os = open_out(path);
  const Domain& d = set.domain;
  os << "# domain";
  for (double v : {d.x_min, d.x_max, d.y_min, d.y_max, d.t_min, d.t_max}) os << ',' << format_double(v);
  os << '\n' << kTrajectoryHeader << '\n';
  for (const LabeledSample& s : set.samples) {
    os << s.line << ',' << format_double(s.s) << ',' << format_double(s.point.x) << ','
       << format_double(s.point.y) << ',' << format_double(s.point.t);
    for (std::size_t f = 0; f < kNumFields; ++f) os << ',' << format_double(s.label[f]);
    os << '\n';
  }
}

TrajectorySet read_trajectories(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open trajectory file " + path.string());
  std::string line;
  TrajectorySet set;
  if (!std::getline(is, line) || line.rfind("# domain,", 0) != 0) throw FormatError("missing domain line in " + path.string());
  const auto dom = split_csv_line(line.substr(2));
  if (dom.size() != 7) throw FormatError("bad domain line in " + path.string());
  double* bounds[6] = {&set.domain.x_min, &set.domain.x_max, &set.domain.y_min,
                       &set.domain.y_max, &set.domain.t_min, &set.domain.t_max};
  for (int i = 0; i < 6; ++i) *bounds[i] = parse_double(dom[i + 1], "domain");
  if (!std::getline(is, line) || line != kTrajectoryHeader) throw FormatError("unexpected trajectory header in " + path.string());

  std::map<std::size_t, std::pair<std::optional<Point>, std::optional<Point>>> ends;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 5 + kNumFields) throw FormatError("trajectory row with wrong column count");
    LabeledSample s;
    s.line = static_cast<std::size_t>(parse_long(c[0], "line"));
    s.s = parse_double(c[1], "s");
    s.point = {parse_double(c[2], "x"), parse_double(c[3], "y"), parse_double(c[4], "t")};
    for (std::size_t f = 0; f < kNumFields; ++f) s.label[f] = parse_double(c[5 + f], "label");
    if (s.s == 0.0) ends[s.line].first = s.point;
    if (s.s == 1.0) ends[s.line].second = s.point;
    set.samples.push_back(s);
  }
  for (std::size_t l = 0; l < ends.size(); ++l) {
    const auto it = ends.find(l);
    if (it == ends.end() || !it->second.first || !it->second.second) {
      throw FormatError("trajectory line " + std::to_string(l) + " lacks its s=0 or s=1 sample");
    }
    set.lines.push_back({*it->second.first, *it->second.second});
  }
  return set;
}

void write_batch(std::ostream& os, const CollocationBatch& batch, bool header) {
  if (header) os << kBatchHeader << '\n';
  for (const Point& p : batch.points) {
    os << batch.epoch << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
       << format_double(p.t) << '\n';
  }
}

void write_comparison(const std::filesystem::path& path, const Comparison& table) {
  std::ofstream os = open_out(path);
  os << kComparisonHeader << '\n';
  for (const ComparisonRow& r : table.rows) {
    os << to_string(r.strategy) << ',' << r.n_seeds << ',' << format_double(r.median_mse) << ','
       << format_double(r.iqr_mse) << ',' << format_double(r.median_epoch) << ','
       << format_double(r.iqr_epoch) << ',' << format_double(r.mse_improvement_pct) << ','
       << format_double(r.epoch_improvement_pct) << '\n';
  }
}

std::string comparison_summary(const Comparison& table) {
  std::ostringstream os;
  os << "baseline: " << to_string(table.baseline) << "\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %6s %14s %12s %12s %10s %10s\n", "strategy", "seeds",
                "median MSE", "IQR MSE", "median conv", "MSE gain", "epoch gain");
  os << buf;
  for (const ComparisonRow& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%-10s %6zu %14.6e %12.4e %12.1f %9.1f%% %9.1f%%\n",
                  std::string(to_string(r.strategy)).c_str(), r.n_seeds, r.median_mse, r.iqr_mse,
                  r.median_epoch, r.mse_improvement_pct, r.epoch_improvement_pct);
    os << buf;
  }
  return os.str();
}

}  // namespace mhdpinn
