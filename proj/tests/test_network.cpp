#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "mhdpinn/checkpoint.hpp"
#include "mhdpinn/errors.hpp"
#include "mhdpinn/network.hpp"
#include "support.hpp"

using namespace mhdpinn;
using namespace mhdpinn::testing;

TEST(Network, DefaultParameterCount) {
  const MlpConfig cfg;
  const std::size_t closed_form = 3 * 64 + 64 + 4 * (64 * 64 + 64) + 64 * 8 + 8;
  EXPECT_EQ(closed_form, 17416u);
  EXPECT_EQ(cfg.parameter_count(), closed_form);
  EXPECT_EQ(Network(cfg).parameter_count(), closed_form);
}

TEST(Network, LayoutIsLayerMajorWeightsThenBiases) {
  MlpConfig cfg;
  cfg.hidden_layers = 2;
  cfg.hidden_width = 4;
  const auto shapes = layer_shapes(cfg);
  ASSERT_EQ(shapes.size(), 3u);
  EXPECT_EQ(shapes[0].weight_offset, 0u);
  EXPECT_EQ(shapes[0].bias_offset, 12u);
  EXPECT_EQ(shapes[1].weight_offset, 16u);
  EXPECT_EQ(shapes[2].in, 4u);
  EXPECT_EQ(shapes[2].out, 8u);
  EXPECT_FALSE(shapes[2].activated);
  EXPECT_EQ(shapes[2].bias_offset + 8, cfg.parameter_count());
}

TEST(Network, GlorotInitIsSeededAndBounded) {
  MlpConfig cfg;
  cfg.seed = 42;
  const Network a(cfg), b(cfg);
  EXPECT_TRUE(std::equal(a.parameters().begin(), a.parameters().end(), b.parameters().begin()));
  cfg.seed = 43;
  const Network c(cfg);
  EXPECT_FALSE(std::equal(a.parameters().begin(), a.parameters().end(), c.parameters().begin()));
  for (const LayerShape& l : a.layers()) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    for (std::size_t i = 0; i < l.in * l.out; ++i) EXPECT_LE(std::abs(a.parameters()[l.weight_offset + i]), limit);
    for (std::size_t i = 0; i < l.out; ++i) EXPECT_EQ(a.parameters()[l.bias_offset + i], 0.0);
  }
}

TEST(Network, RejectsBadConfigs) {
  MlpConfig cfg;
  cfg.hidden_layers = 0;
  EXPECT_THROW(cfg.validate(), PreconditionError);
  cfg = MlpConfig{};
  EXPECT_THROW(Network(cfg, std::vector<double>(10)), PreconditionError);
}

TEST(Network, ValuePassIsBitIdenticalToJetValue) {
  std::mt19937_64 rng(3);
  const Domain d = odd_domain();
  const Network net = random_network(3, 16, 5);
  const Normalizer norm = random_normalizer(d, rng);
  for (int i = 0; i < 200; ++i) {
    const Point p = random_point(d, rng);
    const PrimitiveState v = forward_value(net, p, norm);
    const PrimitiveState j = values_of(forward_jet(net, p, norm).state);
    EXPECT_EQ(v, j);
  }
}

TEST(Network, JetSlotsMatchFiniteDifferences) {
  std::mt19937_64 rng(9);
  const Domain d = odd_domain();
  const double h = 1e-4;
  for (int trial = 0; trial < 30; ++trial) {
    const Network net = random_network(2, 12, trial);
    const Normalizer norm = random_normalizer(d, rng);
    const Point p = random_point(d, rng);
    const StateJet j = forward_jet(net, p, norm).state;
    auto f = [&](double dx, double dy, double dt) { return forward_value(net, {p.x + dx, p.y + dy, p.t + dt}, norm); };
    const PrimitiveState f0 = f(0, 0, 0), xp = f(h, 0, 0), xm = f(-h, 0, 0), yp = f(0, h, 0), ym = f(0, -h, 0),
                         tp = f(0, 0, h), tm = f(0, 0, -h);
    for (std::size_t k = 0; k < kNumFields; ++k) {
      EXPECT_PRED2(fd_close, j[k].d_x, (xp[k] - xm[k]) / (2 * h));
      EXPECT_PRED2(fd_close, j[k].d_y, (yp[k] - ym[k]) / (2 * h));
      EXPECT_PRED2(fd_close, j[k].d_t, (tp[k] - tm[k]) / (2 * h));
      EXPECT_PRED2(fd_close, j[k].d_xx, (xp[k] - 2 * f0[k] + xm[k]) / (h * h));
      EXPECT_PRED2(fd_close, j[k].d_yy, (yp[k] - 2 * f0[k] + ym[k]) / (h * h));
    }
  }
}

TEST(Network, OutsideDomainIsFlaggedNotRejected) {
  const Domain d = odd_domain();
  const Network net = random_network(1, 4, 1);
  const Normalizer norm = Normalizer::fit(d, std::vector<PrimitiveState>{});
  EXPECT_FALSE(forward_jet(net, {0.0, 1.0, 1.0}, norm).outside_domain);
  EXPECT_TRUE(forward_jet(net, {10.0, 1.0, 1.0}, norm).outside_domain);
}

TEST(Network, NonFiniteOutputIsTrainingFault) {
  MlpConfig cfg;
  cfg.hidden_layers = 1;
  cfg.hidden_width = 2;
  std::vector<double> params(cfg.parameter_count(), 0.0);
  params.back() = std::numeric_limits<double>::quiet_NaN();
  const Network net(cfg, params);
  EXPECT_THROW(forward_jet(net, {0, 0, 0}, Normalizer::identity()), TrainingFault);
}

TEST(Normalizer, FitsDomainAndLabels) {
  const Domain d = odd_domain();
  std::vector<PrimitiveState> labels(3);
  for (std::size_t i = 0; i < 3; ++i) {
    labels[i][Field::rho] = 1.0;  // constant field keeps unit scale
    labels[i][Field::vx] = static_cast<double>(i);
  }
  const Normalizer n = Normalizer::fit(d, labels);
  EXPECT_DOUBLE_EQ(n.inputs[0].center, 0.5);
  EXPECT_DOUBLE_EQ(n.inputs[0].half_range, 1.0);
  EXPECT_DOUBLE_EQ(n.inputs[2].half_range, 1.5);
  EXPECT_DOUBLE_EQ(n.outputs[0].center, 1.0);
  EXPECT_DOUBLE_EQ(n.outputs[0].half_range, 1.0);
  EXPECT_DOUBLE_EQ(n.outputs[1].center, 1.0);
  EXPECT_DOUBLE_EQ(n.outputs[1].half_range, 1.0);
  EXPECT_DOUBLE_EQ(n.inputs[1].forward(d.y_max), 1.0);
  EXPECT_DOUBLE_EQ(n.inputs[1].forward(d.y_min), -1.0);
}

TEST(Checkpoint, RoundTripsNetworkAndNormalizer) {
  std::mt19937_64 rng(1);
  const Network net = random_network(2, 6, 77);
  const Normalizer norm = random_normalizer(odd_domain(), rng);
  const auto path = std::filesystem::temp_directory_path() / "mhdpinn_ckpt_test.bin";
  save_checkpoint(path, net, norm);
  const Checkpoint c = load_checkpoint(path);
  EXPECT_EQ(c.network.config(), net.config());
  EXPECT_EQ(c.normalizer, norm);
  EXPECT_TRUE(std::equal(net.parameters().begin(), net.parameters().end(), c.network.parameters().begin()));
  {
    std::ofstream os(path, std::ios::binary | std::ios::app);
    os << 'x';
  }
  EXPECT_THROW(load_checkpoint(path), FormatError);
  std::filesystem::remove(path);
}
