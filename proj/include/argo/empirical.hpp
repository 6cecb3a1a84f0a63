#pragma once

#include <vector>

#include "argo/dataset.hpp"
#include "argo/geometry.hpp"

namespace argo {

// Squared bandwidths of the smoothing kernel
// K(s1, s2) = exp[-{ch^2/lambda_h + dp^2/lambda_v}].
struct KernelBandwidths {
  double lambda_h = 300.0 * 300.0;  // km^2
  double lambda_v = 50.0 * 50.0;    // dbar^2

  void validate() const;
};

// Cylinder-local plug-in moments.
struct LocalMoments {
  double sigma2_T = 0.0;
  double sigma2_S = 0.0;
  double rho_TS = 0.0;
  std::size_t n = 0;  // observations in the cylinder
};

// Population moments over the cylinder neighborhood of `center`.  Throws
// insufficient_data if fewer than 2 observations fall inside, and
// insufficient_variance if either variable is constant there.
LocalMoments local_moments(const GeoPoint& center, const ProfileDataset& data,
                           double radius_km = 900.0,
                           double half_height_db = 5.0);

double smoothing_kernel(const GeoPoint& p1, const GeoPoint& p2,
                        const KernelBandwidths& bw);

// Kernel-smoothed squared-amplitude estimator of variable var (1=T, 2=S).
double smoothed_variance(const GeoPoint& s, int var, const ProfileDataset& data,
                         const KernelBandwidths& bw);

// Kernel-smoothed correlation seed between variables i at s1 and j at s2.
// Values outside [-1, 1] by < 1e-8 are clipped (counter in the return is not
// kept; callers needing diagnostics compare against raw_smoothed_beta).
double smoothed_beta(const GeoPoint& s1, const GeoPoint& s2, int i, int j,
                     const ProfileDataset& data, const KernelBandwidths& bw);

// Kernel-smoothed empirical cross-covariance between variable i at s1 and
// variable j at s2.
double smoothed_cross_cov(const GeoPoint& s1, const GeoPoint& s2, int i, int j,
                          const ProfileDataset& data,
                          const KernelBandwidths& bw);

// Precomputed per-location smoothing state against one dataset: the kernel
// weight vector, its sum, and the smoothed variances.  Lets WLS evaluate many
// cross-covariances against the same anchor set in O(n) each.
struct SmoothedLocation {
  GeoPoint s;
  std::vector<double> sqrt_w;  // sqrt K(s, data_t), one per observation
  double sum_w = 0.0;
  double sig_hat[2] = {0.0, 0.0};  // smoothed sigma_i(s), i = 1, 2
};

SmoothedLocation smooth_location(const GeoPoint& s, const ProfileDataset& data,
                                 const KernelBandwidths& bw);

// Ĉ_ij(a.s, b.s) from two precomputed locations over the shared dataset.
double smoothed_cross_cov(const SmoothedLocation& a, const SmoothedLocation& b,
                          int i, int j, const ProfileDataset& data);

// Regular lat x lon x pressure lattice of smoothed variances and the
// colocated correlation seed, with trilinear interpolation between nodes.
// Used by the semi-parametric models so that repeated covariance assemblies
// do not rescan the dataset.
class MomentsGrid {
 public:
  // Builds the lattice covering the data extent (padded by one step).
  MomentsGrid(const ProfileDataset& data, const KernelBandwidths& bw,
              double step_lat_deg = 1.0, double step_lon_deg = 1.0,
              double step_pres_db = 10.0);

  // Trilinearly interpolated smoothed sigma_i(s), var in {1, 2}.
  double sigma_hat(const GeoPoint& s, int var) const;
  // Trilinearly interpolated colocated correlation seed beta(s, s).
  double beta_hat(const GeoPoint& s) const;

  const KernelBandwidths& bandwidths() const { return bw_; }

  // Lattice dump rows: lat, lon, pres, sig2_T, sig2_S, beta.
  struct Node {
    GeoPoint s;
    double sig2_T, sig2_S, beta;
  };
  std::vector<Node> nodes() const;

 private:
  double interp(const GeoPoint& s, const std::vector<double>& field) const;

  KernelBandwidths bw_;
  std::vector<double> lat_, lon_, pres_;
  // field[(ilat * nlon + ilon) * npres + ipres]
  std::vector<double> sig_T_, sig_S_, beta_;
};

}  // namespace argo
