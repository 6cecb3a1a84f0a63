#pragma once

#include <array>

#include "argo/dataset.hpp"
#include "argo/geometry.hpp"

namespace argo {

// Local quadratic mean surface for one variable, centered at a reference
// point: beta0 + b1*dL + b2*dl + b3*dL^2 + b4*dl^2 + b5*dp + b6*dp^2 with
// dL = lat - ref.lat (degrees), dl = lon - ref.lon (degrees),
// dp = pres - ref.pres (dbar).
struct TrendSurface {
  GeoPoint ref;
  std::array<double, 7> coef{};

  double value(const GeoPoint& p) const;
};

struct TrendFit {
  TrendSurface temp;
  TrendSurface psal;
};

// Per-variable OLS fit of the quadratic surface.  Throws insufficient_data
// with fewer than 8 observations and degenerate_design when the design
// matrix is rank deficient.
TrendFit fit_trend_surfaces(const ProfileDataset& raw, const GeoPoint& ref);

// Convenience wrapper: fit both surfaces and return the residual dataset.
ProfileDataset fit_local_trend(const ProfileDataset& raw, const GeoPoint& ref);

}  // namespace argo
