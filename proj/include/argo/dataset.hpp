#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "argo/geometry.hpp"

namespace argo {

// One bivariate residual observation reported by a float.
struct Observation {
  std::string float_id;
  GeoPoint point;
  double temp = 0.0;  // temperature residual, degC
  double psal = 0.0;  // salinity residual, PSU

  bool operator==(const Observation&) const = default;
};

// Half-open index range [begin, end) into ProfileDataset::observations.
struct ObsRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Float-indexed, canonically ordered collection of observations.  Ordering
// contract: ascending (float_id, pres); each float's rows are contiguous.
class ProfileDataset {
 public:
  ProfileDataset() = default;

  // Sorts, validates, and indexes.  Throws data_error on duplicate
  // (float_id, point) keys or non-finite residuals.
  explicit ProfileDataset(std::vector<Observation> obs);

  const std::vector<Observation>& observations() const { return obs_; }
  const std::map<std::string, ObsRange>& float_index() const { return index_; }

  std::size_t size() const { return obs_.size(); }
  bool empty() const { return obs_.empty(); }
  std::size_t n_floats() const { return index_.size(); }

  // All points, in observation order.
  std::vector<GeoPoint> points() const;

  // New dataset without the given float; throws data_error if absent.
  ProfileDataset without_float(const std::string& float_id) const;

  // Observations belonging to one float.
  std::vector<Observation> float_obs(const std::string& float_id) const;

 private:
  std::vector<Observation> obs_;
  std::map<std::string, ObsRange> index_;
};

// All observations within the vertical cylinder around `center`:
// chordal distance <= radius_km and |pres difference| <= half_height_db
// (boundary included).  Output keeps the dataset's canonical order.
std::vector<Observation> cylinder_neighborhood(const GeoPoint& center,
                                               const ProfileDataset& data,
                                               double radius_km,
                                               double half_height_db);

}  // namespace argo
