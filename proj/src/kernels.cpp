#include "argo/kernels.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <string>

#include "argo/error.hpp"

namespace argo {

namespace {

constexpr double kZeroLagH = 1e-30;   // below this, use analytic limits
constexpr double kUnderflowX = 700.0; // exp(-x) underflows well before this

}  // namespace

double matern_m_raw(double nu, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("matern_m_raw: x must be > 0");
  if (x > kUnderflowX) return 0.0;
  // K is even in its order.
  return std::pow(x, nu) * boost::math::cyl_bessel_k(std::abs(nu), x);
}

double matern_zero_limit(double nu) {
  if (!(nu > 0.0))
    throw std::invalid_argument("matern_zero_limit: nu must be > 0");
  return std::exp2(nu - 1.0) * std::tgamma(nu);
}

double matern_m(double nu, double x) {
  if (!(nu > 0.0)) throw std::invalid_argument("matern_m: nu must be > 0");
  if (x < 0.0) throw std::invalid_argument("matern_m: x must be >= 0");
  if (x * x < kZeroLagH) return matern_zero_limit(nu);
  return matern_m_raw(nu, x);
}

double rho_from_beta(double beta, double nu11, double nu22, int d) {
  if (!(nu11 > 0.0) || !(nu22 > 0.0))
    throw std::invalid_argument("rho_from_beta: smoothness must be > 0");
  if (d < 1) throw std::invalid_argument("rho_from_beta: d must be >= 1");
  const double hd = 0.5 * static_cast<double>(d);
  const double nu12 = 0.5 * (nu11 + nu22);
  const double log_factor = 0.5 * (std::lgamma(nu11 + hd) - std::lgamma(nu11)) +
                            0.5 * (std::lgamma(nu22 + hd) - std::lgamma(nu22)) +
                            std::lgamma(nu12) - std::lgamma(nu12 + hd);
  return beta * std::exp(log_factor);
}

void MaternParams::validate() const {
  if (!(sigma2[0] > 0.0) || !(sigma2[1] > 0.0))
    throw config_error("MaternParams: variances must be > 0");
  if (!(nu[0] > 0.0) || !(nu[1] > 0.0))
    throw config_error("MaternParams: smoothness must be > 0");
  if (!(std::abs(beta12) <= 1.0))
    throw config_error("MaternParams: |beta12| must be <= 1");
  if (!(a_h > 0.0) || !(a_v > 0.0))
    throw config_error("MaternParams: scales must be > 0");
  if (dim_d < 1) throw config_error("MaternParams: dim_d must be >= 1");
}

double parsimonious_matern(int i, int j, const GeoPoint& p1,
                           const GeoPoint& p2, const MaternParams& theta) {
  if (i < 1 || i > 2 || j < 1 || j > 2)
    throw std::invalid_argument("parsimonious_matern: variable index not in {1,2}");
  const double rho = (i == j) ? 1.0 : theta.rho12();
  const double nu_ij = 0.5 * (theta.nu[i - 1] + theta.nu[j - 1]);
  const double scale =
      rho * std::sqrt(theta.sigma2[i - 1] * theta.sigma2[j - 1]);
  if (scale == 0.0) return 0.0;
  const double h = squared_distance_h(p1, p2, theta.a_h, theta.a_v);
  if (h < kZeroLagH) return scale;  // M_nu(0+)/norm = 1
  return scale * matern_m_raw(nu_ij, std::sqrt(h)) / matern_zero_limit(nu_ij);
}

double gauss_exp_mix_kernel(const GeoPoint& p1, const GeoPoint& p2) {
  const double ch = chordal_distance(p1, p2);
  const double u = ch / 140.0;
  return 0.77 * std::exp(-u * u) + 0.23 * std::exp(-ch / 1111.0);
}

double aniso_exp_kernel(const GeoPoint& p1, const GeoPoint& p2, double sigma2,
                      double theta_lat, double theta_lon) {
  if (!(sigma2 > 0.0) || !(theta_lat > 0.0) || !(theta_lon > 0.0))
    throw std::invalid_argument("aniso_exp_kernel: parameters must be > 0");
  const double u = (p1.lat - p2.lat) / theta_lat;
  const double v = (p1.lon - p2.lon) / theta_lon;
  return sigma2 * std::exp(-std::sqrt(u * u + v * v));
}

PairTrig pair_trig(const GeoPoint& p1, const GeoPoint& p2) {
  PairTrig t;
  const double L1 = p1.lat * kDegToRad;
  const double L2 = p2.lat * kDegToRad;
  const double x3 = (p1.lon - p2.lon) * kDegToRad;
  const double R2 = kEarthRadiusKm * kEarthRadiusKm;
  const double G = 4.0 * R2;  // ch^2 = G * [sin^2(dL/2) + cosL1 cosL2 sin^2(x3/2)]

  const double sdL2 = std::sin(0.5 * (L1 - L2));
  const double sx32 = std::sin(0.5 * x3);
  const double c1 = std::cos(L1), c2 = std::cos(L2);
  const double s1 = std::sin(L1), s2 = std::sin(L2);
  const double sdL = std::sin(L1 - L2), cdL = std::cos(L1 - L2);
  const double sx3 = std::sin(x3), cx3 = std::cos(x3);
  const double q = sx32 * sx32;  // sin^2(x3/2)

  t.ch2 = G * (sdL2 * sdL2 + c1 * c2 * q);
  t.dp = p1.pres - p2.pres;
  t.w1 = G * (0.5 * sdL - s1 * c2 * q);
  t.w2 = G * (-0.5 * sdL - c1 * s2 * q);
  t.w3 = G * 0.5 * c1 * c2 * sx3;
  t.w12 = G * (-0.5 * cdL + s1 * s2 * q);
  t.w33 = G * 0.5 * c1 * c2 * cx3;
  t.w13 = -G * 0.5 * s1 * c2 * sx3;
  t.w23 = -G * 0.5 * c1 * s2 * sx3;
  return t;
}

HDerivs h_derivs(const PairTrig& t, double a_h, double a_v) {
  if (!(a_h > 0.0) || !(a_v > 0.0))
    throw std::invalid_argument("h_derivs: scales must be positive");
  const double ah2 = a_h * a_h;
  const double av2 = a_v * a_v;
  HDerivs g;
  g.h = ah2 * t.ch2 + av2 * t.dp * t.dp;
  g.h1 = ah2 * t.w1;
  g.h2 = ah2 * t.w2;
  g.h3 = ah2 * t.w3;
  g.h4 = 2.0 * av2 * t.dp;
  g.h12 = ah2 * t.w12;
  g.h33 = ah2 * t.w33;
  g.h44 = 2.0 * av2;
  g.h13 = ah2 * t.w13;
  g.h23 = ah2 * t.w23;
  return g;
}

void DiffOpParams::validate() const {
  base.validate();
  if (!(base.nu[0] > 1.0) || !(base.nu[1] > 1.0))
    throw config_error(
        "DiffOpParams: base smoothness must exceed 1 (differentiation costs "
        "one order)");
  for (const VarOperator& o : op) {
    o.c_spec.validate();
    if (o.c_w.weights.size() != o.c_spec.basis_count())
      throw config_error("DiffOpParams: c-spline weight length mismatch");
    if (!std::isfinite(o.a) || !std::isfinite(o.b) || !std::isfinite(o.d))
      throw config_error("DiffOpParams: non-finite operator coefficient");
  }
}

double diffop_core_cached(const HDerivs& g, double alpha, double m2, double m1,
                          double m0, const OperatorCoefs& ci,
                          const OperatorCoefs& cj) {
  if (alpha == 0.0) return 0.0;
  // First-derivative quadratic form (multiplies the order nu-2 term).
  const double S1 = ci.a * cj.a * g.h1 * g.h2 - ci.b * cj.b * g.h3 * g.h3 -
                    ci.c * cj.c * g.h4 * g.h4 - ci.a * cj.b * g.h1 * g.h3 +
                    cj.a * ci.b * g.h2 * g.h3 - ci.a * cj.c * g.h1 * g.h4 +
                    cj.a * ci.c * g.h2 * g.h4 - ci.b * cj.c * g.h3 * g.h4 -
                    cj.b * ci.c * g.h3 * g.h4;
  // Everything multiplying the order nu-1 term: the second-derivative form
  // plus the identity x first-derivative cross terms.  The first argument's
  // operator differentiates in (L1, +x3, +x4), the second in (L2, -x3, -x4).
  const double S2 = ci.a * cj.a * g.h12 - ci.b * cj.b * g.h33 -
                    ci.c * cj.c * g.h44 - ci.a * cj.b * g.h13 +
                    cj.a * ci.b * g.h23 +
                    cj.d * (ci.a * g.h1 + ci.b * g.h3 + ci.c * g.h4) +
                    ci.d * (cj.a * g.h2 - cj.b * g.h3 - cj.c * g.h4);
  return alpha * (0.25 * S1 * m2 - 0.5 * S2 * m1 + ci.d * cj.d * m0);
}

double diffop_core(const HDerivs& g, double alpha, double nu_base,
                   const OperatorCoefs& ci, const OperatorCoefs& cj) {
  if (alpha == 0.0) return 0.0;
  double m2, m1, m0;
  if (g.h < 1e-30) {
    // Zero-lag limit: every first partial of h vanishes, so the order-(nu-2)
    // factor (whose quadratic form S1 vanishes identically there) drops out;
    // the remaining orders have finite limits.
    m2 = 0.0;
    m1 = matern_zero_limit(nu_base - 1.0);
    m0 = matern_zero_limit(nu_base);
  } else {
    const double x = std::sqrt(g.h);
    if (x > 700.0) return 0.0;
    m2 = matern_m_raw(nu_base - 2.0, x);
    m1 = matern_m_raw(nu_base - 1.0, x);
    // Upward recurrence M_{v+1}(x) = x^2 M_{v-1}(x) + 2 v M_v(x).
    m0 = g.h * m2 + 2.0 * (nu_base - 1.0) * m1;
  }
  return diffop_core_cached(g, alpha, m2, m1, m0, ci, cj);
}

double diffop_cross_cov(int i, int j, const GeoPoint& p1, const GeoPoint& p2,
                        const DiffOpParams& theta) {
  if (i < 1 || i > 2 || j < 1 || j > 2)
    throw std::invalid_argument("diffop_cross_cov: variable index not in {1,2}");
  const double rho = (i == j) ? 1.0 : theta.base.rho12();
  const double nu_ij = 0.5 * (theta.base.nu[i - 1] + theta.base.nu[j - 1]);
  const double alpha =
      rho * std::sqrt(theta.base.sigma2[i - 1] * theta.base.sigma2[j - 1]) /
      matern_zero_limit(nu_ij);
  const HDerivs g = h_derivs(pair_trig(p1, p2), theta.base.a_h, theta.base.a_v);
  const VarOperator& oi = theta.op[i - 1];
  const VarOperator& oj = theta.op[j - 1];
  const OperatorCoefs ci{oi.a, oi.b, oi.c_at(p1.pres), oi.d};
  const OperatorCoefs cj{oj.a, oj.b, oj.c_at(p2.pres), oj.d};
  return diffop_core(g, alpha, nu_ij, ci, cj);
}

std::vector<std::pair<double, double>> colocated_curve(
    const DiffOpParams& theta, double lat_deg,
    const std::vector<double>& pressures) {
  theta.validate();
  std::vector<std::pair<double, double>> out;
  out.reserve(pressures.size());
  for (double p : pressures) {
    const GeoPoint s{lat_deg, 0.0, p};
    const double c11 = diffop_cross_cov(1, 1, s, s, theta);
    const double c22 = diffop_cross_cov(2, 2, s, s, theta);
    if (!(c11 > 0.0) || !(c22 > 0.0))
      throw degenerate_variance("colocated_curve: zero marginal variance at p=" +
                                std::to_string(p));
    const double c12 = diffop_cross_cov(1, 2, s, s, theta);
    out.emplace_back(p, c12 / std::sqrt(c11 * c22));
  }
  return out;
}

}  // namespace argo
