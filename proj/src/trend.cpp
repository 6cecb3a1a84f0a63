#include "argo/trend.hpp"

#include <Eigen/Dense>

#include "argo/error.hpp"

namespace argo {

namespace {

constexpr int kTerms = 7;

Eigen::RowVectorXd design_row(const GeoPoint& p, const GeoPoint& ref) {
  const double dL = p.lat - ref.lat;
  const double dl = p.lon - ref.lon;
  const double dp = p.pres - ref.pres;
  Eigen::RowVectorXd row(kTerms);
  row << 1.0, dL, dl, dL * dL, dl * dl, dp, dp * dp;
  return row;
}

}  // namespace

double TrendSurface::value(const GeoPoint& p) const {
  const Eigen::RowVectorXd row = design_row(p, ref);
  double v = 0.0;
  for (int k = 0; k < kTerms; ++k) v += row[k] * coef[k];
  return v;
}

TrendFit fit_trend_surfaces(const ProfileDataset& raw, const GeoPoint& ref) {
  validate_point(ref);
  const std::size_t n = raw.size();
  if (n < kTerms + 1)
    throw insufficient_data(
        "trend fit needs at least 8 observations, got " + std::to_string(n));

  Eigen::MatrixXd X(n, kTerms);
  Eigen::VectorXd yT(n), yS(n);
  for (std::size_t a = 0; a < n; ++a) {
    const Observation& o = raw.observations()[a];
    X.row(a) = design_row(o.point, ref);
    yT[a] = o.temp;
    yS[a] = o.psal;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < kTerms)
    throw degenerate_design(
        "trend design matrix is rank deficient (rank " +
        std::to_string(qr.rank()) + " of " + std::to_string(kTerms) +
        "); observations do not span the quadratic surface");

  TrendFit fit;
  fit.temp.ref = ref;
  fit.psal.ref = ref;
  const Eigen::VectorXd bT = qr.solve(yT);
  const Eigen::VectorXd bS = qr.solve(yS);
  for (int k = 0; k < kTerms; ++k) {
    fit.temp.coef[k] = bT[k];
    fit.psal.coef[k] = bS[k];
  }
  return fit;
}

ProfileDataset fit_local_trend(const ProfileDataset& raw, const GeoPoint& ref) {
  const TrendFit fit = fit_trend_surfaces(raw, ref);
  std::vector<Observation> out = raw.observations();
  for (Observation& o : out) {
    o.temp -= fit.temp.value(o.point);
    o.psal -= fit.psal.value(o.point);
  }
  return ProfileDataset(std::move(out));
}

}  // namespace argo
