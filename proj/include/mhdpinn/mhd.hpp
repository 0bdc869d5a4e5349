#pragma once

#include <array>
#include <functional>
#include <span>

#include "mhdpinn/network.hpp"
#include "mhdpinn/state.hpp"

namespace mhdpinn {

struct PhysParams {
  double gamma = 5.0 / 3.0;
  double nu = 0.0;   // viscosity
  double eta = 0.0;  // resistivity

  void validate() const;
  friend bool operator==(const PhysParams&, const PhysParams&) = default;
};

inline constexpr std::size_t kNumResiduals = 9;

/// Continuity, x/y/z momentum, pressure, Bx/By/Bz induction, div B.
template <class T>
using BasicResidualVector = std::array<T, kNumResiduals>;
using ResidualVector = BasicResidualVector<double>;

/// Source term subtracted from the residual (manufactured solutions).
using Forcing = std::function<ResidualVector(const Point&)>;

/// Left-hand sides of the 2D resistive/viscous MHD system in primitive
/// variables, with d/dz = 0. Momentum rows keep the rho factor on dv/dt.
template <class T>
BasicResidualVector<T> residuals(const BasicStateJet<T>& s, const PhysParams& p) {
  const Jet<T>& rho = s[Field::rho];
  const Jet<T>& vx = s[Field::vx];
  const Jet<T>& vy = s[Field::vy];
  const Jet<T>& vz = s[Field::vz];
  const Jet<T>& P = s[Field::p];
  const Jet<T>& bx = s[Field::bx];
  const Jet<T>& by = s[Field::by];
  const Jet<T>& bz = s[Field::bz];
  const T nu{p.nu};
  const T eta{p.eta};
  const T gamma{p.gamma};

  const T jz = by.d_x - bx.d_y;  // z-current
  // Ez-like flux vx*By - vy*Bx and its spatial derivatives (product rule).
  const T flux_x = vx.d_x * by.value + vx.value * by.d_x - vy.d_x * bx.value - vy.value * bx.d_x;
  const T flux_y = vx.d_y * by.value + vx.value * by.d_y - vy.d_y * bx.value - vy.value * bx.d_y;
  // d/dx (vz Bx - vx Bz) and d/dy (vy Bz - vz By).
  const T bz_flux_x = vz.d_x * bx.value + vz.value * bx.d_x - vx.d_x * bz.value - vx.value * bz.d_x;
  const T bz_flux_y = vy.d_y * bz.value + vy.value * bz.d_y - vz.d_y * by.value - vz.value * by.d_y;

  BasicResidualVector<T> r;
  r[0] = rho.d_t + (rho.d_x * vx.value + rho.value * vx.d_x) +
         (rho.d_y * vy.value + rho.value * vy.d_y);
  r[1] = rho.value * vx.d_t + rho.value * vx.value * vx.d_x + rho.value * vy.value * vx.d_y +
         P.d_x + bz.value * bz.d_x + by.value * jz - rho.value * nu * (vx.d_xx + vx.d_yy);
  r[2] = rho.value * vy.d_t + rho.value * vx.value * vy.d_x + rho.value * vy.value * vy.d_y +
         P.d_y - bx.value * jz + bz.value * bz.d_y - rho.value * nu * (vy.d_xx + vy.d_yy);
  r[3] = rho.value * vz.d_t + rho.value * vx.value * vz.d_x + rho.value * vy.value * vz.d_y -
         by.value * bz.d_y - bx.value * bz.d_x - rho.value * nu * (vz.d_xx + vz.d_yy);
  r[4] = P.d_t + vx.value * P.d_x + vy.value * P.d_y + gamma * P.value * (vx.d_x + vy.d_y);
  r[5] = bx.d_t - flux_y - eta * (bx.d_xx + bx.d_yy);
  r[6] = by.d_t + flux_x - eta * (by.d_xx + by.d_yy);
  r[7] = bz.d_t - bz_flux_x + bz_flux_y - eta * (bz.d_xx + bz.d_yy);
  r[8] = bx.d_x + by.d_y;
  return r;
}

/// Sum of squared residuals (minus forcing when given) at one point.
template <class T>
T squared_residual(const BasicStateJet<T>& s, const PhysParams& p, const ResidualVector* forcing) {
  const BasicResidualVector<T> r = residuals(s, p);
  T acc{0.0};
  for (std::size_t i = 0; i < kNumResiduals; ++i) {
    const T e = forcing ? r[i] - T{(*forcing)[i]} : r[i];
    acc = acc + e * e;
  }
  return acc;
}

/// Mean over points of the summed squared residuals, all nine equations
/// equally weighted. Throws PreconditionError on an empty batch.
double physical_loss(std::span<const Point> points, const Network& net, const Normalizer& norm,
                     const PhysParams& params, const Forcing& forcing = {});

}  // namespace mhdpinn
