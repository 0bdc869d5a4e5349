#pragma once

#include "mhdpinn/jet.hpp"
#include "mhdpinn/state.hpp"

namespace mhdpinn {

/// Axis-aligned space-time box. Degenerate axes (min == max) are tolerated
/// by the samplers; `validate()` enforces the strict max > min form.
struct Domain {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  double t_min = 0.0, t_max = 1.0;

  double min(Axis a) const { return a == Axis::x ? x_min : a == Axis::y ? y_min : t_min; }
  double max(Axis a) const { return a == Axis::x ? x_max : a == Axis::y ? y_max : t_max; }
  double extent(Axis a) const { return max(a) - min(a); }

  bool contains(const Point& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max &&
           p.t >= t_min && p.t <= t_max;
  }

  void validate() const;

  friend bool operator==(const Domain&, const Domain&) = default;
};

}  // namespace mhdpinn
