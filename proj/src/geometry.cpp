#include "argo/geometry.hpp"

#include <cmath>
#include <string>

#include "argo/error.hpp"

namespace argo {

void validate_point(const GeoPoint& p) {
  if (!std::isfinite(p.lat) || !std::isfinite(p.lon) || !std::isfinite(p.pres))
    throw out_of_domain("GeoPoint has non-finite coordinate");
  if (p.lat < -90.0 || p.lat > 90.0)
    throw out_of_domain("latitude " + std::to_string(p.lat) +
                        " outside [-90, 90]");
  if (p.lon <= -180.0 || p.lon > 180.0)
    throw out_of_domain("longitude " + std::to_string(p.lon) +
                        " outside (-180, 180]");
  if (p.pres < 0.0 || p.pres > 2000.0)
    throw out_of_domain("pressure " + std::to_string(p.pres) +
                        " outside [0, 2000]");
}

double chordal_distance(const GeoPoint& p1, const GeoPoint& p2,
                        double radius_km) {
  if (!std::isfinite(p1.lat) || !std::isfinite(p1.lon) ||
      !std::isfinite(p2.lat) || !std::isfinite(p2.lon))
    throw std::invalid_argument("chordal_distance: non-finite input");
  if (!(radius_km > 0.0))
    throw std::invalid_argument("chordal_distance: radius must be positive");
  const double L1 = p1.lat * kDegToRad;
  const double L2 = p2.lat * kDegToRad;
  const double dL = 0.5 * (L1 - L2);
  const double dl = 0.5 * (p1.lon - p2.lon) * kDegToRad;
  const double sL = std::sin(dL);
  const double sl = std::sin(dl);
  const double under = sL * sL + std::cos(L1) * std::cos(L2) * sl * sl;
  return 2.0 * radius_km * std::sqrt(std::max(under, 0.0));
}

double squared_distance_h(const GeoPoint& p1, const GeoPoint& p2, double a_h,
                          double a_v) {
  if (!(a_h > 0.0) || !(a_v > 0.0))
    throw std::invalid_argument("squared_distance_h: scales must be positive");
  const double ch = chordal_distance(p1, p2);
  const double dp = p1.pres - p2.pres;
  return a_h * a_h * ch * ch + a_v * a_v * dp * dp;
}

}  // namespace argo
