#pragma once

#include <cmath>

namespace argo {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;

// A 3D location: latitude/longitude in decimal degrees, pressure in dbar
// (used interchangeably with depth in meters).
struct GeoPoint {
  double lat = 0.0;   // degrees, [-90, 90]
  double lon = 0.0;   // degrees, (-180, 180]
  double pres = 0.0;  // dbar, [0, 2000]

  bool operator==(const GeoPoint&) const = default;
};

// Throws argo::out_of_domain if the point violates the domain invariants.
void validate_point(const GeoPoint& p);

// Straight-line distance through the sphere between two surface locations,
// in km.  Longitude wrap-around is absorbed by the trig identities; no manual
// normalization of the longitude difference is required.
double chordal_distance(const GeoPoint& p1, const GeoPoint& p2,
                        double radius_km = kEarthRadiusKm);

// Scaled squared distance a_h^2 * chord^2 + a_v^2 * dpres^2 (dimensionless).
double squared_distance_h(const GeoPoint& p1, const GeoPoint& p2, double a_h,
                          double a_v);

}  // namespace argo
