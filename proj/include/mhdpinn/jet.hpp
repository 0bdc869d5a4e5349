#pragma once

#include <cmath>
#include <stdexcept>

#include "mhdpinn/errors.hpp"

namespace mhdpinn {

enum class Axis { x, y, t };

/// Value of a scalar field together with the input derivatives the MHD
/// residual needs: first order in x, y, t and pure second order in x, y.
///
/// T is `double` for plain evaluation or `TapeVar` when the jet components
/// are themselves recorded for a reverse sweep.
template <class T>
struct Jet {
  T value{};
  T d_x{};
  T d_y{};
  T d_t{};
  T d_xx{};
  T d_yy{};

  static Jet constant(T v) { return Jet{v, T{}, T{}, T{}, T{}, T{}}; }

  /// Identity function of one coordinate, evaluated at `v`.
  static Jet coordinate(Axis axis, T v) {
    Jet j = constant(v);
    switch (axis) {
      case Axis::x: j.d_x = T{1.0}; break;
      case Axis::y: j.d_y = T{1.0}; break;
      case Axis::t: j.d_t = T{1.0}; break;
    }
    return j;
  }

  Jet operator-() const { return Jet{-value, -d_x, -d_y, -d_t, -d_xx, -d_yy}; }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(const Jet& a, const Jet& b) {
    return Jet{a.value + b.value, a.d_x + b.d_x, a.d_y + b.d_y,
               a.d_t + b.d_t,     a.d_xx + b.d_xx, a.d_yy + b.d_yy};
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    return Jet{a.value - b.value, a.d_x - b.d_x, a.d_y - b.d_y,
               a.d_t - b.d_t,     a.d_xx - b.d_xx, a.d_yy - b.d_yy};
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    return Jet{a.value * b.value,
               a.d_x * b.value + a.value * b.d_x,
               a.d_y * b.value + a.value * b.d_y,
               a.d_t * b.value + a.value * b.d_t,
               a.d_xx * b.value + T{2.0} * a.d_x * b.d_x + a.value * b.d_xx,
               a.d_yy * b.value + T{2.0} * a.d_y * b.d_y + a.value * b.d_yy};
  }
  // From a = q*b differentiated twice.
  friend Jet operator/(const Jet& a, const Jet& b) {
    if (scalar_value(b.value) == 0.0) {
      throw DomainError("jet division by a zero-valued jet");
    }
    Jet q;
    q.value = a.value / b.value;
    q.d_x = (a.d_x - q.value * b.d_x) / b.value;
    q.d_y = (a.d_y - q.value * b.d_y) / b.value;
    q.d_t = (a.d_t - q.value * b.d_t) / b.value;
    q.d_xx = (a.d_xx - T{2.0} * q.d_x * b.d_x - q.value * b.d_xx) / b.value;
    q.d_yy = (a.d_yy - T{2.0} * q.d_y * b.d_y - q.value * b.d_yy) / b.value;
    return q;
  }

  friend Jet operator*(double s, const Jet& a) {
    return Jet{s * a.value, s * a.d_x, s * a.d_y, s * a.d_t, s * a.d_xx, s * a.d_yy};
  }
  friend Jet operator*(const Jet& a, double s) { return s * a; }
  friend Jet operator+(const Jet& a, double s) {
    Jet r = a;
    r.value = r.value + s;
    return r;
  }
  friend Jet operator+(double s, const Jet& a) { return a + s; }
  friend Jet operator-(const Jet& a, double s) { return a + (-s); }
  friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
  friend Jet operator/(const Jet& a, double s) {
    if (s == 0.0) throw DomainError("jet division by zero");
    return Jet{a.value / s, a.d_x / s, a.d_y / s, a.d_t / s, a.d_xx / s, a.d_yy / s};
  }
  friend Jet operator/(double s, const Jet& a) { return constant(T{s}) / a; }

 private:
  static double scalar_value(double v) { return v; }
  template <class U>
  static double scalar_value(const U& v) { return v.value(); }
};

enum class JetOp { add, sub, mul, div };

template <class T>
Jet<T> jet_arith(const Jet<T>& a, const Jet<T>& b, JetOp op) {
  switch (op) {
    case JetOp::add: return a + b;
    case JetOp::sub: return a - b;
    case JetOp::mul: return a * b;
    case JetOp::div: return a / b;
  }
  throw std::invalid_argument("unknown jet operation");
}

/// f, f' and f'' of a smooth scalar function at one argument.
struct Derivatives2 {
  double f;
  double df;
  double d2f;
};

enum class SmoothFn { identity, tanh, sin, cos };

inline Derivatives2 evaluate(SmoothFn fn, double v) {
  switch (fn) {
    case SmoothFn::identity: return {v, 1.0, 0.0};
    case SmoothFn::tanh: {
      const double t = std::tanh(v);
      const double dt = 1.0 - t * t;
      return {t, dt, -2.0 * t * dt};
    }
    case SmoothFn::sin: return {std::sin(v), std::cos(v), -std::sin(v)};
    case SmoothFn::cos: return {std::cos(v), -std::sin(v), -std::cos(v)};
  }
  throw std::invalid_argument("unknown smooth function");
}

/// Chain rule through a scalar function given its first two derivatives.
template <class T>
Jet<T> compose(const Jet<T>& a, const Derivatives2& f) {
  return Jet<T>{T{f.f},
                f.df * a.d_x,
                f.df * a.d_y,
                f.df * a.d_t,
                f.d2f * (a.d_x * a.d_x) + f.df * a.d_xx,
                f.d2f * (a.d_y * a.d_y) + f.df * a.d_yy};
}

inline Jet<double> jet_activation(const Jet<double>& a, SmoothFn fn) {
  return compose(a, evaluate(fn, a.value));
}

inline Jet<double> tanh(const Jet<double>& a) { return jet_activation(a, SmoothFn::tanh); }
inline Jet<double> sin(const Jet<double>& a) { return jet_activation(a, SmoothFn::sin); }
inline Jet<double> cos(const Jet<double>& a) { return jet_activation(a, SmoothFn::cos); }

}  // namespace mhdpinn
