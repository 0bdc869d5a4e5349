#include <Eigen/Dense>
#include <cmath>
#include <exception>
#include <string>

#include "mhdpinn/errors.hpp"
#include "mhdpinn/kernels.hpp"

namespace mhdpinn::parallel {

namespace {

using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstWeights = Eigen::Map<const RowMat>;
using Vec = Eigen::VectorXd;

constexpr std::size_t kGroup = 64;
constexpr Eigen::Index C = static_cast<Eigen::Index>(kJetChannels);

enum class ChunkKind { jet, value };

struct Chunk {
  ChunkKind kind;
  std::size_t begin;
  std::size_t end;
};

struct Weights {
  std::vector<ConstWeights> w;
  std::vector<Eigen::Map<const Vec>> b;
};

Weights weight_maps(const Network& net) {
  Weights m;
  const double* base = net.parameters().data();
  for (const LayerShape& l : net.layers()) {
    m.w.emplace_back(base + l.weight_offset, l.out, l.in);
    m.b.emplace_back(base + l.bias_offset, l.out);
  }
  return m;
}

void tanh_jet_forward(const Mat& z, Mat& h, Eigen::Index points) {
  h.resize(z.rows(), z.cols());
  for (Eigen::Index p = 0; p < points; ++p) {
    const Eigen::Index c0 = p * C;
    for (Eigen::Index o = 0; o < z.rows(); ++o) {
      const double t = std::tanh(z(o, c0));
      const double t1 = 1.0 - t * t;
      const double t2 = -2.0 * t * t1;
      const double zx = z(o, c0 + 1), zy = z(o, c0 + 2);
      h(o, c0) = t;
      h(o, c0 + 1) = t1 * zx;
      h(o, c0 + 2) = t1 * zy;
      h(o, c0 + 3) = t1 * z(o, c0 + 3);
      h(o, c0 + 4) = t2 * (zx * zx) + t1 * z(o, c0 + 4);
      h(o, c0 + 5) = t2 * (zy * zy) + t1 * z(o, c0 + 5);
    }
  }
}

void tanh_jet_backward(const Mat& z, const Mat& hb, Mat& zb, Eigen::Index points) {
  zb.resize(z.rows(), z.cols());
  for (Eigen::Index p = 0; p < points; ++p) {
    const Eigen::Index c0 = p * C;
    for (Eigen::Index o = 0; o < z.rows(); ++o) {
      const double t = std::tanh(z(o, c0));
      const double t1 = 1.0 - t * t;
      const double t2 = -2.0 * t * t1;
      const double t3 = -2.0 * (t1 * t1 + t * t2);
      const double zx = z(o, c0 + 1), zy = z(o, c0 + 2), zt = z(o, c0 + 3);
      const double bx = hb(o, c0 + 1), by = hb(o, c0 + 2), bt = hb(o, c0 + 3);
      const double bxx = hb(o, c0 + 4), byy = hb(o, c0 + 5);
      zb(o, c0) = hb(o, c0) * t1 + (bx * zx + by * zy + bt * zt) * t2 +
                  bxx * (t3 * zx * zx + t2 * z(o, c0 + 4)) + byy * (t3 * zy * zy + t2 * z(o, c0 + 5));
      zb(o, c0 + 1) = bx * t1 + 2.0 * bxx * t2 * zx;
      zb(o, c0 + 2) = by * t1 + 2.0 * byy * t2 * zy;
      zb(o, c0 + 3) = bt * t1;
      zb(o, c0 + 4) = bxx * t1;
      zb(o, c0 + 5) = byy * t1;
    }
  }
}

// Products are formed in Eigen-owned storage first. Writing them straight
// into the caller's buffer lets its heap alignment pick the kernel path,
// which changes rounding between otherwise identical calls.
void add_layer_gradient(const RowMat& gw, const Vec& gb, const LayerShape& shape, std::span<double> grad) {
  double* w = grad.data() + shape.weight_offset;
  for (Eigen::Index i = 0; i < gw.size(); ++i) w[i] += gw.data()[i];
  double* b = grad.data() + shape.bias_offset;
  for (Eigen::Index i = 0; i < gb.size(); ++i) b[i] += gb[i];
}

[[noreturn]] void non_finite(const Point& p) {
  throw TrainingFault("non-finite network output at (" + std::to_string(p.x) + ", " +
                          std::to_string(p.y) + ", " + std::to_string(p.t) + ")",
                      -1);
}

/// Sum over the chunk's points of the residual head; adds weight * d/dtheta
/// of that sum into grad.
double jet_chunk(const Network& net, const Weights& wm, const Normalizer& norm,
                 std::span<const Point> pts, std::span<const ResidualVector> forcing,
                 const PhysParams& phys, double weight, std::span<double> grad) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  const auto& layers = net.layers();
  std::vector<Mat> acts(layers.size() + 1), pres(layers.size());
  Mat& a0 = acts[0];
  a0.setZero(3, n * C);
  for (Eigen::Index p = 0; p < n; ++p) {
    const double coords[3] = {pts[p].x, pts[p].y, pts[p].t};
    for (Eigen::Index i = 0; i < 3; ++i) {
      a0(i, p * C) = norm.inputs[i].forward(coords[i]);
      a0(i, p * C + 1 + i) = 1.0 / norm.inputs[i].half_range;
    }
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Mat& z = pres[l];
    z.noalias() = wm.w[l] * acts[l];
    for (Eigen::Index p = 0; p < n; ++p) z.col(p * C) += wm.b[l];
    if (layers[l].activated) {
      tanh_jet_forward(z, acts[l + 1], n);
    } else {
      acts[l + 1] = z;
    }
  }

  const Mat& raw = acts.back();
  Mat hb(raw.rows(), raw.cols());
  double sum = 0.0;
  for (Eigen::Index p = 0; p < n; ++p) {
    StateJet s;
    for (std::size_t f = 0; f < kNumFields; ++f) {
      const auto r = static_cast<Eigen::Index>(f);
      const AxisMap& m = norm.outputs[f];
      s[f] = Jet<double>{m.inverse(raw(r, p * C)),        raw(r, p * C + 1) * m.half_range,
                         raw(r, p * C + 2) * m.half_range, raw(r, p * C + 3) * m.half_range,
                         raw(r, p * C + 4) * m.half_range, raw(r, p * C + 5) * m.half_range};
      for (double v : {s[f].value, s[f].d_x, s[f].d_y, s[f].d_t, s[f].d_xx, s[f].d_yy}) {
        if (!std::isfinite(v)) non_finite(pts[p]);
      }
    }
    StateJet adj;
    sum += squared_residual_adjoint(s, phys, forcing.empty() ? nullptr : &forcing[p], adj);
    for (std::size_t f = 0; f < kNumFields; ++f) {
      const auto r = static_cast<Eigen::Index>(f);
      const double k = weight * norm.outputs[f].half_range;
      hb(r, p * C) = adj[f].value * k;
      hb(r, p * C + 1) = adj[f].d_x * k;
      hb(r, p * C + 2) = adj[f].d_y * k;
      hb(r, p * C + 3) = adj[f].d_t * k;
      hb(r, p * C + 4) = adj[f].d_xx * k;
      hb(r, p * C + 5) = adj[f].d_yy * k;
    }
  }

  Mat zb;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const LayerShape& shape = layers[l];
    if (shape.activated) {
      tanh_jet_backward(pres[l], hb, zb, n);
    } else {
      zb = hb;
    }
    Vec gb = Vec::Zero(shape.out);
    for (Eigen::Index p = 0; p < n; ++p) gb += zb.col(p * C);
    add_layer_gradient(zb * acts[l].transpose(), gb, shape, grad);
    if (l > 0) hb.noalias() = wm.w[l].transpose() * zb;
  }
  return sum;
}

/// Sum over the chunk of the per-point mean squared field error; adds
/// weight * d/dtheta of that sum into grad.
double value_chunk(const Network& net, const Weights& wm, const Normalizer& norm,
                   std::span<const LabeledSample> samples, double weight, std::span<double> grad) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  const auto& layers = net.layers();
  std::vector<Mat> acts(layers.size() + 1), pres(layers.size());
  acts[0].resize(3, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    const Point& q = samples[p].point;
    acts[0](0, p) = norm.inputs[0].forward(q.x);
    acts[0](1, p) = norm.inputs[1].forward(q.y);
    acts[0](2, p) = norm.inputs[2].forward(q.t);
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    pres[l].noalias() = wm.w[l] * acts[l];
    pres[l].colwise() += wm.b[l];
    acts[l + 1] = layers[l].activated ? Mat(pres[l].array().tanh()) : pres[l];
  }
  const Mat& raw = acts.back();
  Mat hb(raw.rows(), n);
  double sum = 0.0;
  constexpr double inv_f = 1.0 / static_cast<double>(kNumFields);
  for (Eigen::Index p = 0; p < n; ++p) {
    double point = 0.0;
    for (std::size_t f = 0; f < kNumFields; ++f) {
      const auto r = static_cast<Eigen::Index>(f);
      const double u = norm.outputs[f].inverse(raw(r, p));
      if (!std::isfinite(u)) non_finite(samples[p].point);
      const double e = u - samples[p].label[f];
      point += e * e;
      hb(r, p) = weight * 2.0 * e * inv_f * norm.outputs[f].half_range;
    }
    sum += point * inv_f;
  }
  Mat zb;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const LayerShape& shape = layers[l];
    if (shape.activated) {
      zb = hb.array() * (1.0 - acts[l + 1].array().square());
    } else {
      zb = hb;
    }
    add_layer_gradient(zb * acts[l].transpose(), zb.rowwise().sum(), shape, grad);
    if (l > 0) hb.noalias() = wm.w[l].transpose() * zb;
  }
  return sum;
}

std::vector<Chunk> make_chunks(ChunkKind kind, std::size_t count) {
  std::vector<Chunk> chunks;
  for (std::size_t b = 0; b < count; b += kChunk) chunks.push_back({kind, b, std::min(count, b + kChunk)});
  return chunks;
}

struct Sums {
  double jet = 0.0;
  double value = 0.0;
};

/// Runs chunks in fixed-size groups; inside a group chunks run concurrently
/// into private buffers which are then added in chunk order.
Sums run_chunks(const Network& net, const Normalizer& norm, const std::vector<Chunk>& chunks,
                std::span<const Point> colloc, std::span<const ResidualVector> forcing,
                const PhysParams& phys, double jet_weight, std::span<const LabeledSample> data,
                double value_weight, int workers, ParamGradient& grad) {
  const Weights wm = weight_maps(net);
  const std::size_t np = net.parameter_count();
  const std::size_t buffers = std::min(kGroup, chunks.size());
  std::vector<std::vector<double>> local(buffers, std::vector<double>(np));
  std::vector<double> sums(buffers);
  std::vector<std::exception_ptr> errors(buffers);
  Sums total;
  for (std::size_t g = 0; g < chunks.size(); g += kGroup) {
    const auto m = static_cast<long>(std::min(kGroup, chunks.size() - g));
#pragma omp parallel for num_threads(workers) schedule(static)
    for (long j = 0; j < m; ++j) {
      const Chunk& c = chunks[g + static_cast<std::size_t>(j)];
      std::vector<double>& buf = local[j];
      std::fill(buf.begin(), buf.end(), 0.0);
      try {
        if (c.kind == ChunkKind::jet) {
          const auto f = forcing.empty() ? forcing : forcing.subspan(c.begin, c.end - c.begin);
          sums[j] = jet_chunk(net, wm, norm, colloc.subspan(c.begin, c.end - c.begin), f, phys, jet_weight,
                             buf);
        } else {
          sums[j] = value_chunk(net, wm, norm, data.subspan(c.begin, c.end - c.begin), value_weight, buf);
        }
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
    for (long j = 0; j < m; ++j) {
      if (errors[j]) std::rethrow_exception(errors[j]);
    }
    for (long j = 0; j < m; ++j) {
      const std::vector<double>& buf = local[j];
      for (std::size_t k = 0; k < np; ++k) grad[k] += buf[k];
      (chunks[g + static_cast<std::size_t>(j)].kind == ChunkKind::jet ? total.jet : total.value) += sums[j];
    }
  }
  return total;
}

}  // namespace

LossAndGradient loss_gradient(const Network& net, const Normalizer& norm, const LossProblem& problem,
                              int workers) {
  if (problem.colloc.empty()) throw PreconditionError("physical loss of an empty collocation batch");
  if (problem.data.empty()) throw PreconditionError("data loss without labeled samples");
  if (!problem.forcing.empty() && problem.forcing.size() != problem.colloc.size()) {
    throw PreconditionError("forcing count does not match collocation count");
  }
  const double lam = problem.lambda;
  const double nc = static_cast<double>(problem.colloc.size());
  const double nd = static_cast<double>(problem.data.size());
  std::vector<Chunk> chunks = make_chunks(ChunkKind::jet, problem.colloc.size());
  for (const Chunk& c : make_chunks(ChunkKind::value, problem.data.size())) chunks.push_back(c);

  LossAndGradient out{{}, ParamGradient(net.parameter_count(), 0.0)};
  const Sums s = run_chunks(net, norm, chunks, problem.colloc, problem.forcing, problem.phys,
                            lam / (1.0 + lam) / nc, problem.data, 1.0 / (1.0 + lam) / nd, workers, out.grad);
  out.loss.phys = s.jet / nc;
  out.loss.data = s.value / nd;
  out.loss.total = combined_loss(out.loss.data, out.loss.phys, lam);
  return out;
}

LossAndGradient physical_loss_gradient(const Network& net, const Normalizer& norm,
                                       std::span<const Point> colloc, const PhysParams& phys,
                                       std::span<const ResidualVector> forcing, int workers) {
  if (colloc.empty()) throw PreconditionError("physical loss of an empty collocation batch");
  const double nc = static_cast<double>(colloc.size());
  LossAndGradient out{{}, ParamGradient(net.parameter_count(), 0.0)};
  const Sums s = run_chunks(net, norm, make_chunks(ChunkKind::jet, colloc.size()), colloc, forcing, phys,
                            1.0 / nc, {}, 0.0, workers, out.grad);
  out.loss.phys = s.jet / nc;
  out.loss.total = out.loss.phys;
  return out;
}

std::vector<PrimitiveState> predict(const Network& net, const Normalizer& norm,
                                    std::span<const Point> points, int workers) {
  constexpr std::size_t chunk = 256;
  const Weights wm = weight_maps(net);
  const auto& layers = net.layers();
  std::vector<PrimitiveState> out(points.size());
  const auto nchunks = static_cast<long>((points.size() + chunk - 1) / chunk);
#pragma omp parallel for num_threads(workers) schedule(static)
  for (long c = 0; c < nchunks; ++c) {
    const std::size_t b = static_cast<std::size_t>(c) * chunk;
    const std::size_t e = std::min(points.size(), b + chunk);
    const auto n = static_cast<Eigen::Index>(e - b);
    Mat a(3, n);
    for (Eigen::Index p = 0; p < n; ++p) {
      const Point& q = points[b + static_cast<std::size_t>(p)];
      a(0, p) = norm.inputs[0].forward(q.x);
      a(1, p) = norm.inputs[1].forward(q.y);
      a(2, p) = norm.inputs[2].forward(q.t);
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
      Mat z = wm.w[l] * a;
      z.colwise() += wm.b[l];
      a = layers[l].activated ? Mat(z.array().tanh()) : z;
    }
    for (Eigen::Index p = 0; p < n; ++p) {
      PrimitiveState& s = out[b + static_cast<std::size_t>(p)];
      for (std::size_t f = 0; f < kNumFields; ++f) s[f] = norm.outputs[f].inverse(a(static_cast<Eigen::Index>(f), p));
    }
  }
  return out;
}

}  // namespace mhdpinn::parallel
