#pragma once

#include <cstdint>
#include <vector>

#include "argo/dataset.hpp"
#include "argo/models.hpp"

namespace argo {

// Geographic sampling box with the analysis reference point.
struct Region {
  double lat_min = 35.0;
  double lat_max = 45.0;
  double lon_min = -180.0 + 1e-9;
  double lon_max = -170.0;
  GeoPoint ref{40.0, -175.0, 0.0};

  void validate() const;
};

struct SyntheticConfig {
  std::size_t n_floats = 16;
  std::vector<double> depths;  // strictly increasing, within [0, 2000]
  double depth_jitter_db = 0.0;  // uniform +- jitter applied per observation
  Region region;
  ModelSpec model;
  ParamVector theta_true;
  std::uint64_t seed = 0;
  std::size_t max_total_obs = 4000;

  void validate() const;
};

// Depth grid with the given number of levels per vertical zone:
// mixed layer 0-100, pycnocline 100-1000, intermediate 1000-2000 dbar.
std::vector<double> stratified_depths(std::size_t mlz, std::size_t pcz,
                                      std::size_t imz);

// Draws float positions uniformly in the region, lays each float's profile
// on the depth grid, and samples the bivariate field from a triangular (or,
// for semi-definite covariances, spectral) factor of the model covariance at
// theta_true.  Deterministic for a fixed config.
ProfileDataset simulate(const SyntheticConfig& cfg);

}  // namespace argo
