#include "argo/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "argo/error.hpp"

namespace argo {

namespace {

double obs_value(const Observation& o, int var) {
  if (var == 1) return o.temp;
  if (var == 2) return o.psal;
  throw std::invalid_argument("variable index must be 1 (T) or 2 (S)");
}

}  // namespace

void KernelBandwidths::validate() const {
  if (!(lambda_h > 0.0) || !(lambda_v > 0.0))
    throw config_error("KernelBandwidths: bandwidths must be > 0");
}

LocalMoments local_moments(const GeoPoint& center, const ProfileDataset& data,
                           double radius_km, double half_height_db) {
  const std::vector<Observation> cyl =
      cylinder_neighborhood(center, data, radius_km, half_height_db);
  if (cyl.size() < 2)
    throw insufficient_data("local_moments: cylinder holds " +
                            std::to_string(cyl.size()) +
                            " observations, need >= 2");
  const double n = static_cast<double>(cyl.size());
  double mT = 0.0, mS = 0.0;
  for (const Observation& o : cyl) {
    mT += o.temp;
    mS += o.psal;
  }
  mT /= n;
  mS /= n;
  double vT = 0.0, vS = 0.0, cTS = 0.0;
  for (const Observation& o : cyl) {
    const double dT = o.temp - mT;
    const double dS = o.psal - mS;
    vT += dT * dT;
    vS += dS * dS;
    cTS += dT * dS;
  }
  vT /= n;
  vS /= n;
  cTS /= n;
  if (!(vT > 0.0) || !(vS > 0.0))
    throw insufficient_variance(
        "local_moments: a variable is constant within the cylinder");
  LocalMoments m;
  m.sigma2_T = vT;
  m.sigma2_S = vS;
  m.rho_TS = std::clamp(cTS / std::sqrt(vT * vS), -1.0, 1.0);
  m.n = cyl.size();
  return m;
}

double smoothing_kernel(const GeoPoint& p1, const GeoPoint& p2,
                        const KernelBandwidths& bw) {
  bw.validate();
  const double ch = chordal_distance(p1, p2);
  const double dp = p1.pres - p2.pres;
  return std::exp(-(ch * ch / bw.lambda_h + dp * dp / bw.lambda_v));
}

SmoothedLocation smooth_location(const GeoPoint& s, const ProfileDataset& data,
                                 const KernelBandwidths& bw) {
  bw.validate();
  if (data.empty())
    throw insufficient_data("smooth_location: empty dataset");
  SmoothedLocation loc;
  loc.s = s;
  loc.sqrt_w.reserve(data.size());
  double sum_w = 0.0, num_T = 0.0, num_S = 0.0;
  for (const Observation& o : data.observations()) {
    const double w = smoothing_kernel(s, o.point, bw);
    loc.sqrt_w.push_back(std::sqrt(w));
    sum_w += w;
    num_T += w * o.temp * o.temp;
    num_S += w * o.psal * o.psal;
  }
  if (!(sum_w > 0.0))
    throw insufficient_data(
        "smooth_location: all kernel weights underflowed to zero");
  loc.sum_w = sum_w;
  loc.sig_hat[0] = std::sqrt(num_T / sum_w);
  loc.sig_hat[1] = std::sqrt(num_S / sum_w);
  return loc;
}

double smoothed_variance(const GeoPoint& s, int var, const ProfileDataset& data,
                         const KernelBandwidths& bw) {
  if (var != 1 && var != 2)
    throw std::invalid_argument("smoothed_variance: variable index");
  const SmoothedLocation loc = smooth_location(s, data, bw);
  const double sig = loc.sig_hat[var - 1];
  return sig * sig;
}

double smoothed_cross_cov(const SmoothedLocation& a, const SmoothedLocation& b,
                          int i, int j, const ProfileDataset& data) {
  if (a.sqrt_w.size() != data.size() || b.sqrt_w.size() != data.size())
    throw std::invalid_argument(
        "smoothed_cross_cov: location caches built against another dataset");
  double num = 0.0;
  const std::vector<Observation>& obs = data.observations();
  for (std::size_t t = 0; t < obs.size(); ++t)
    num += a.sqrt_w[t] * b.sqrt_w[t] * obs_value(obs[t], i) *
           obs_value(obs[t], j);
  return num / (std::sqrt(a.sum_w) * std::sqrt(b.sum_w));
}

double smoothed_cross_cov(const GeoPoint& s1, const GeoPoint& s2, int i, int j,
                          const ProfileDataset& data,
                          const KernelBandwidths& bw) {
  const SmoothedLocation a = smooth_location(s1, data, bw);
  const SmoothedLocation b = smooth_location(s2, data, bw);
  return smoothed_cross_cov(a, b, i, j, data);
}

double smoothed_beta(const GeoPoint& s1, const GeoPoint& s2, int i, int j,
                     const ProfileDataset& data, const KernelBandwidths& bw) {
  const SmoothedLocation a = smooth_location(s1, data, bw);
  const SmoothedLocation b = smooth_location(s2, data, bw);
  const double denom = a.sig_hat[i - 1] * b.sig_hat[j - 1];
  if (!(denom > 0.0))
    throw insufficient_variance(
        "smoothed_beta: zero smoothed standard deviation");
  const double beta = smoothed_cross_cov(a, b, i, j, data) / denom;
  // Cauchy-Schwarz bounds the ratio by 1; allow only rounding excursions.
  if (std::abs(beta) > 1.0 + 1e-8)
    throw numerical_error("smoothed_beta: estimator escaped [-1, 1]: " +
                          std::to_string(beta));
  return std::clamp(beta, -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// MomentsGrid
// ---------------------------------------------------------------------------

namespace {

std::vector<double> make_axis(double lo, double hi, double step) {
  // Pad by one step each side so interpolation covers the data hull.
  const double a = std::floor(lo / step) * step - step;
  const double b = std::ceil(hi / step) * step + step;
  std::vector<double> axis;
  for (double v = a; v <= b + 0.5 * step; v += step) axis.push_back(v);
  return axis;
}

}  // namespace

MomentsGrid::MomentsGrid(const ProfileDataset& data, const KernelBandwidths& bw,
                         double step_lat_deg, double step_lon_deg,
                         double step_pres_db)
    : bw_(bw) {
  bw_.validate();
  if (step_lat_deg <= 0.0 || step_lon_deg <= 0.0 || step_pres_db <= 0.0)
    throw config_error("MomentsGrid: lattice steps must be > 0");
  if (data.empty()) throw insufficient_data("MomentsGrid: empty dataset");
  double lat_lo = 90.0, lat_hi = -90.0, lon_lo = 180.0, lon_hi = -180.0,
         p_lo = 2000.0, p_hi = 0.0;
  for (const Observation& o : data.observations()) {
    lat_lo = std::min(lat_lo, o.point.lat);
    lat_hi = std::max(lat_hi, o.point.lat);
    lon_lo = std::min(lon_lo, o.point.lon);
    lon_hi = std::max(lon_hi, o.point.lon);
    p_lo = std::min(p_lo, o.point.pres);
    p_hi = std::max(p_hi, o.point.pres);
  }
  lat_ = make_axis(lat_lo, lat_hi, step_lat_deg);
  lon_ = make_axis(lon_lo, lon_hi, step_lon_deg);
  pres_ = make_axis(p_lo, p_hi, step_pres_db);

  const std::size_t total = lat_.size() * lon_.size() * pres_.size();
  sig_T_.resize(total);
  sig_S_.resize(total);
  beta_.resize(total);
  std::size_t idx = 0;
  for (double la : lat_)
    for (double lo : lon_)
      for (double pr : pres_) {
        // Lattice nodes may sit outside the admissible coordinate box after
        // padding; clamp to keep kernel geometry valid.
        const GeoPoint s{std::clamp(la, -90.0, 90.0),
                         std::clamp(lo, -179.999, 180.0),
                         std::clamp(pr, 0.0, 2000.0)};
        const SmoothedLocation loc = smooth_location(s, data, bw_);
        sig_T_[idx] = loc.sig_hat[0];
        sig_S_[idx] = loc.sig_hat[1];
        const double denom = loc.sig_hat[0] * loc.sig_hat[1];
        beta_[idx] = denom > 0.0
                         ? std::clamp(smoothed_cross_cov(loc, loc, 1, 2, data) /
                                          denom,
                                      -1.0, 1.0)
                         : 0.0;
        ++idx;
      }
}

double MomentsGrid::interp(const GeoPoint& s,
                           const std::vector<double>& field) const {
  auto locate = [](const std::vector<double>& axis, double v, std::size_t* i0,
                   double* frac) {
    if (v <= axis.front()) {
      *i0 = 0;
      *frac = 0.0;
      return;
    }
    if (v >= axis.back()) {
      *i0 = axis.size() - 2;
      *frac = 1.0;
      return;
    }
    const auto it = std::upper_bound(axis.begin(), axis.end(), v);
    *i0 = static_cast<std::size_t>(it - axis.begin()) - 1;
    *frac = (v - axis[*i0]) / (axis[*i0 + 1] - axis[*i0]);
  };
  std::size_t ia, io, ip;
  double fa, fo, fp;
  locate(lat_, s.lat, &ia, &fa);
  locate(lon_, s.lon, &io, &fo);
  locate(pres_, s.pres, &ip, &fp);
  const std::size_t nl = lon_.size(), np = pres_.size();
  auto at = [&](std::size_t a, std::size_t o, std::size_t p) {
    return field[(a * nl + o) * np + p];
  };
  double acc = 0.0;
  for (int da = 0; da < 2; ++da)
    for (int dl = 0; dl < 2; ++dl)
      for (int dp = 0; dp < 2; ++dp) {
        const double w = (da ? fa : 1.0 - fa) * (dl ? fo : 1.0 - fo) *
                         (dp ? fp : 1.0 - fp);
        acc += w * at(ia + da, io + dl, ip + dp);
      }
  return acc;
}

double MomentsGrid::sigma_hat(const GeoPoint& s, int var) const {
  if (var != 1 && var != 2)
    throw std::invalid_argument("MomentsGrid::sigma_hat: variable index");
  return interp(s, var == 1 ? sig_T_ : sig_S_);
}

double MomentsGrid::beta_hat(const GeoPoint& s) const {
  return interp(s, beta_);
}

std::vector<MomentsGrid::Node> MomentsGrid::nodes() const {
  std::vector<Node> out;
  out.reserve(sig_T_.size());
  std::size_t idx = 0;
  for (double la : lat_)
    for (double lo : lon_)
      for (double pr : pres_) {
        Node n;
        n.s = GeoPoint{la, lo, pr};
        n.sig2_T = sig_T_[idx] * sig_T_[idx];
        n.sig2_S = sig_S_[idx] * sig_S_[idx];
        n.beta = beta_[idx];
        out.push_back(n);
        ++idx;
      }
  return out;
}

}  // namespace argo
