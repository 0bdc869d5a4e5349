#include "mhdpinn/mhd.hpp"

#include "mhdpinn/errors.hpp"

namespace mhdpinn {

void PhysParams::validate() const {
  if (!(gamma > 1.0)) throw PreconditionError("gamma must be > 1");
  if (!(nu >= 0.0)) throw PreconditionError("nu must be >= 0");
  if (!(eta >= 0.0)) throw PreconditionError("eta must be >= 0");
}

double physical_loss(std::span<const Point> points, const Network& net, const Normalizer& norm,
                     const PhysParams& params, const Forcing& forcing) {
  if (points.empty()) throw PreconditionError("physical loss of an empty collocation batch");
  double sum = 0.0;
  for (const Point& p : points) {
    const StateJet s = forward_jet(net, p, norm).state;
    if (forcing) {
      const ResidualVector f = forcing(p);
      sum += squared_residual(s, params, &f);
    } else {
      sum += squared_residual(s, params, nullptr);
    }
  }
  return sum / static_cast<double>(points.size());
}

}  // namespace mhdpinn
