#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mhdpinn/errors.hpp"
#include "mhdpinn/mhd.hpp"
#include "mhdpinn/reference.hpp"
#include "residual_oracle.hpp"
#include "support.hpp"

using namespace mhdpinn;
using namespace mhdpinn::testing;

namespace {

StateJet random_jet(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  StateJet s;
  for (std::size_t f = 0; f < kNumFields; ++f) s[f] = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
  s[Field::rho].value = std::abs(s[Field::rho].value) + 0.1;
  s[Field::p].value = std::abs(s[Field::p].value) + 0.1;
  return s;
}

}  // namespace

TEST(Residuals, MatchIndependentOracle) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const StateJet s = random_jet(rng);
    const PhysParams p{1.4, 0.03 * (i % 3), 0.05 * (i % 2)};
    const ResidualVector got = residuals(s, p);
    const auto want = oracle_residuals(s, p);
    for (std::size_t k = 0; k < kNumResiduals; ++k) EXPECT_NEAR(got[k], want[k], 1e-12) << "equation " << k;
  }
}

TEST(Residuals, SquaredResidualSubtractsForcing) {
  std::mt19937_64 rng(2);
  const StateJet s = random_jet(rng);
  const PhysParams p;
  const ResidualVector r = residuals(s, p);
  EXPECT_NEAR(squared_residual(s, p, &r), 0.0, 0.0);
  double sum = 0.0;
  for (double v : r) sum += v * v;
  EXPECT_DOUBLE_EQ(squared_residual<double>(s, p, nullptr), sum);
}

TEST(Residuals, UniformStateIsEquilibrium) {
  StateJet s;
  for (std::size_t f = 0; f < kNumFields; ++f) s[f] = Jet<double>::constant(1.0 + static_cast<double>(f));
  for (double r : residuals(s, PhysParams{5.0 / 3.0, 0.1, 0.1})) EXPECT_EQ(r, 0.0);
}

TEST(Residuals, AlfvenWaveIsExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const AlfvenParams cases[] = {
      AlfvenParams{},
      {1.3, 0.7, 0.6, 0.8, 3.0, 4.0, 0.2, 0.4},
      {0.5, 2.0, -1.0, 1.0, -2.0, 2.0, 0.9, 1.0},
  };
  for (const AlfvenParams& ap : cases) {
    const AnalyticSolution sol = alfven_wave(ap);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const StateJet s = sol.jet({u(rng), u(rng), u(rng)});
      for (double r : residuals(s, PhysParams{5.0 / 3.0, 0.0, 0.0})) worst = std::max(worst, std::abs(r));
      for (double r : oracle_residuals(s, PhysParams{5.0 / 3.0, 0.0, 0.0})) worst = std::max(worst, std::abs(r));
    }
    EXPECT_LT(worst, 1e-10);
  }
}

TEST(Residuals, AlfvenWaveIsNotTrivial) {
  const AnalyticSolution sol = alfven_wave(AlfvenParams{});
  const StateJet s = sol.jet({0.1, 0.2, 0.3});
  EXPECT_GT(std::abs(s[Field::vy].d_t), 1.0);
  EXPECT_GT(std::abs(s[Field::by].d_x), 1.0);
  // Viscosity and resistivity break exactness of the ideal wave.
  double sum = 0.0;
  for (double r : residuals(s, PhysParams{5.0 / 3.0, 0.01, 0.01})) sum += std::abs(r);
  EXPECT_GT(sum, 1e-3);
}

TEST(Residuals, PhysParamsValidation) {
  EXPECT_THROW((PhysParams{1.0, 0.0, 0.0}.validate()), PreconditionError);
  EXPECT_THROW((PhysParams{5.0 / 3.0, -1.0, 0.0}.validate()), PreconditionError);
  EXPECT_NO_THROW(PhysParams{}.validate());
}
