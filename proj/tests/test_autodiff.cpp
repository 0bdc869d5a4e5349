#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mhdpinn/errors.hpp"
#include "mhdpinn/jet.hpp"
#include "mhdpinn/tape.hpp"
#include "support.hpp"

using namespace mhdpinn;
using mhdpinn::testing::fd_close;

namespace {

// f(x, y, t) built from every jet operation.
template <class J>
J composite(const J& x, const J& y, const J& t) {
  using std::sin;
  using std::cos;
  using std::tanh;
  return tanh(x * y + 0.5) * sin(t - x) + cos(y) / (2.0 + x * x) - 3.0 * t * y + x / 1.5;
}

double composite_value(double x, double y, double t) { return composite(x, y, t); }

}  // namespace

TEST(Jet, CoordinateSeeds) {
  const Jet<double> x = Jet<double>::coordinate(Axis::x, 2.0);
  EXPECT_EQ(x.value, 2.0);
  EXPECT_EQ(x.d_x, 1.0);
  EXPECT_EQ(x.d_y, 0.0);
  EXPECT_EQ(x.d_t, 0.0);
  EXPECT_EQ(x.d_xx, 0.0);
  const Jet<double> c = Jet<double>::constant(4.0);
  EXPECT_EQ(c.d_x + c.d_y + c.d_t + c.d_xx + c.d_yy, 0.0);
}

TEST(Jet, ProductAndQuotientRules) {
  const auto x = Jet<double>::coordinate(Axis::x, 1.5);
  const auto y = Jet<double>::coordinate(Axis::y, -0.5);
  const Jet<double> p = x * x * y;  // x^2 y
  EXPECT_DOUBLE_EQ(p.d_x, 2 * 1.5 * -0.5);
  EXPECT_DOUBLE_EQ(p.d_xx, 2 * -0.5);
  EXPECT_DOUBLE_EQ(p.d_y, 1.5 * 1.5);
  EXPECT_DOUBLE_EQ(p.d_yy, 0.0);
  const Jet<double> q = 1.0 / x;
  EXPECT_DOUBLE_EQ(q.d_x, -1.0 / (1.5 * 1.5));
  EXPECT_DOUBLE_EQ(q.d_xx, 2.0 / (1.5 * 1.5 * 1.5));
}

TEST(Jet, DivisionByZeroIsDomainError) {
  const auto x = Jet<double>::coordinate(Axis::x, 0.0);
  EXPECT_THROW(1.0 / x, DomainError);
}

TEST(Jet, MatchesCentralDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-4;
  for (int trial = 0; trial < 200; ++trial) {
    const double x = u(rng), y = u(rng), t = u(rng);
    const Jet<double> j = composite(Jet<double>::coordinate(Axis::x, x), Jet<double>::coordinate(Axis::y, y),
                                    Jet<double>::coordinate(Axis::t, t));
    const double f0 = composite_value(x, y, t);
    EXPECT_EQ(j.value, f0);
    const double fxp = composite_value(x + h, y, t), fxm = composite_value(x - h, y, t);
    const double fyp = composite_value(x, y + h, t), fym = composite_value(x, y - h, t);
    const double ftp = composite_value(x, y, t + h), ftm = composite_value(x, y, t - h);
    EXPECT_PRED2(fd_close, j.d_x, (fxp - fxm) / (2 * h));
    EXPECT_PRED2(fd_close, j.d_y, (fyp - fym) / (2 * h));
    EXPECT_PRED2(fd_close, j.d_t, (ftp - ftm) / (2 * h));
    EXPECT_PRED2(fd_close, j.d_xx, (fxp - 2 * f0 + fxm) / (h * h));
    EXPECT_PRED2(fd_close, j.d_yy, (fyp - 2 * f0 + fym) / (h * h));
  }
}

TEST(Jet, ActivationDerivativeTable) {
  for (double v : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
    const Derivatives2 th = evaluate(SmoothFn::tanh, v);
    EXPECT_DOUBLE_EQ(th.f, std::tanh(v));
    EXPECT_DOUBLE_EQ(th.df, 1 - std::tanh(v) * std::tanh(v));
    EXPECT_NEAR(th.d2f, -2 * std::tanh(v) * (1 - std::tanh(v) * std::tanh(v)), 1e-15);
    const Derivatives2 s = evaluate(SmoothFn::sin, v);
    EXPECT_DOUBLE_EQ(s.df, std::cos(v));
    EXPECT_DOUBLE_EQ(s.d2f, -std::sin(v));
  }
}

TEST(Tape, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng);
    auto f = [](auto x, auto y, auto z) { return (x * y - z) / (x + 1.0) * z + -y * (x - 2.0); };
    Tape tape;
    const TapeVar x = tape.variable(a), y = tape.variable(b), z = tape.variable(c);
    const TapeVar out = f(x, y, z);
    EXPECT_DOUBLE_EQ(out.value(), f(a, b, c));
    tape.backward(out);
    const double h = 1e-6;
    EXPECT_PRED2(fd_close, tape.adjoint(x), (f(a + h, b, c) - f(a - h, b, c)) / (2 * h));
    EXPECT_PRED2(fd_close, tape.adjoint(y), (f(a, b + h, c) - f(a, b - h, c)) / (2 * h));
    EXPECT_PRED2(fd_close, tape.adjoint(z), (f(a, b, c + h) - f(a, b, c - h)) / (2 * h));
  }
}

TEST(Tape, ConstantsAndUnusedVariables) {
  Tape tape;
  const TapeVar x = tape.variable(3.0);
  const TapeVar unused = tape.variable(5.0);
  const TapeVar out = x * 2.0 + TapeVar(1.0);
  tape.backward(out);
  EXPECT_EQ(tape.adjoint(x), 2.0);
  EXPECT_EQ(tape.adjoint(unused), 0.0);
  EXPECT_EQ(tape.adjoint(TapeVar(4.0)), 0.0);
}

TEST(Tape, JetOverTapeVarAgreesWithDoubleJet) {
  Tape tape;
  const TapeVar a = tape.variable(0.8);
  Jet<TapeVar> x = Jet<TapeVar>::coordinate(Axis::x, a);
  Jet<TapeVar> y = Jet<TapeVar>::coordinate(Axis::y, TapeVar(0.3));
  const Jet<TapeVar> r = x * y / (x + y) - y * y;
  const Jet<double> xd = Jet<double>::coordinate(Axis::x, 0.8);
  const Jet<double> yd = Jet<double>::coordinate(Axis::y, 0.3);
  const Jet<double> rd = xd * yd / (xd + yd) - yd * yd;
  EXPECT_EQ(r.value.value(), rd.value);
  EXPECT_EQ(r.d_x.value(), rd.d_x);
  EXPECT_EQ(r.d_yy.value(), rd.d_yy);
}
