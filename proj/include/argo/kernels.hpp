#pragma once

#include <array>
#include <utility>
#include <vector>

#include "argo/geometry.hpp"
#include "argo/splines.hpp"

namespace argo {

// ---------------------------------------------------------------------------
// Matérn machinery
// ---------------------------------------------------------------------------

// M_nu(x) = x^nu K_nu(x).  Requires nu > 0; at x = 0 returns the analytic
// limit 2^{nu-1} Gamma(nu).  Returns 0 once x is past the Bessel underflow
// point (exp(-x) below double range).
double matern_m(double nu, double x);

// Same function without the nu > 0 restriction (K is even in its order, so
// any real order is meaningful for x > 0).  Needed internally for the
// second-derivative term whose order is base smoothness minus two.
double matern_m_raw(double nu, double x);

// lim_{x->0+} M_nu(x) = 2^{nu-1} Gamma(nu), nu > 0.
double matern_zero_limit(double nu);

// Colocated-correlation mapping: the admissible rho implied by a correlation
// seed beta in [-1, 1] for smoothnesses (nu11, nu22) in dimension d.  The
// gamma-ratio factor has magnitude <= 1, so |rho| <= |beta| always.
double rho_from_beta(double beta, double nu11, double nu22, int d);

// Parameters of the bivariate parsimonious Matérn family.  Cross smoothness
// nu12 = (nu11 + nu22)/2 is always derived, never stored.
struct MaternParams {
  std::array<double, 2> sigma2{1.0, 1.0};  // marginal variances
  std::array<double, 2> nu{1.0, 1.0};      // marginal smoothness
  double beta12 = 0.0;                     // correlation seed, |beta12| <= 1
  double a_h = 1.0 / 300.0;                // horizontal scale, 1/km
  double a_v = 1.0 / 100.0;                // vertical scale, 1/dbar
  int dim_d = 3;                           // embedding dimension

  double nu_cross() const { return 0.5 * (nu[0] + nu[1]); }
  double rho12() const { return rho_from_beta(beta12, nu[0], nu[1], dim_d); }
  void validate() const;  // throws config_error on violated invariants
};

// C_ij(s1, s2) for i, j in {1, 2}.
double parsimonious_matern(int i, int j, const GeoPoint& p1,
                           const GeoPoint& p2, const MaternParams& theta);

// ---------------------------------------------------------------------------
// Baseline kernels
// ---------------------------------------------------------------------------

// Baseline correlation: a fixed mixture of a Gaussian bump (140 km) and an
// exponential tail (1111 km) in the chordal distance.
double gauss_exp_mix_kernel(const GeoPoint& p1, const GeoPoint& p2);

// Anisotropic exponential covariance in (lat, lon) degrees, no time term.
double aniso_exp_kernel(const GeoPoint& p1, const GeoPoint& p2, double sigma2,
                      double theta_lat, double theta_lon);

// ---------------------------------------------------------------------------
// Differential-operator nonstationary cross-covariance
// ---------------------------------------------------------------------------

// Geometry shared by every (i, j) block of one point pair: the squared
// chordal distance, the pressure difference, and the partial derivatives of
// ch^2 with respect to x = (L1, L2, l1 - l2) in radians.  Scale-free, so one
// cache serves all parameter values.
struct PairTrig {
  double ch2 = 0.0;  // chordal distance squared, km^2
  double dp = 0.0;   // p1 - p2, dbar
  double w1 = 0.0;   // d(ch^2)/dL1
  double w2 = 0.0;   // d(ch^2)/dL2
  double w3 = 0.0;   // d(ch^2)/dx3
  double w12 = 0.0;  // d2(ch^2)/dL1 dL2
  double w33 = 0.0;  // d2(ch^2)/dx3^2
  double w13 = 0.0;  // d2(ch^2)/dL1 dx3
  double w23 = 0.0;  // d2(ch^2)/dL2 dx3
};

PairTrig pair_trig(const GeoPoint& p1, const GeoPoint& p2);

// h = a_h^2 ch^2 + a_v^2 dp^2 and its nonzero first/second partials with
// respect to (L1, L2, x3 = l1 - l2, x4 = p1 - p2).
struct HDerivs {
  double h = 0.0;
  double h1 = 0.0, h2 = 0.0, h3 = 0.0, h4 = 0.0;
  double h12 = 0.0, h33 = 0.0, h44 = 0.0, h13 = 0.0, h23 = 0.0;
};

HDerivs h_derivs(const PairTrig& t, double a_h, double a_v);

// Per-variable first-order operator L_i = a d/dL + b d/dl + c(p) d/dp + d.
// a, b are constant in latitude (local-stationarity assumption); c is a
// B-spline in pressure; the non-derivative coefficient d defaults to 0.
struct VarOperator {
  double a = 0.0;
  double b = 0.0;
  SplineSpec c_spec;
  SplineWeights c_w;
  double d = 0.0;

  double c_at(double p) const { return c_eval(c_spec, c_w, p); }
};

// Full parameter set of the differential-operator model.  base.nu holds the
// smoothness of the latent fields; differentiation lowers the effective
// smoothness of Z by one, so base nu = 2 gives effective smoothness 1.
struct DiffOpParams {
  MaternParams base;
  std::array<VarOperator, 2> op;

  void validate() const;
};

// Operator coefficients of one variable evaluated at one point.
struct OperatorCoefs {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

// cov{L_i X_i(s1), L_j X_j(s2)} given precomputed geometry, the base-level
// normalization alpha_ij = rho_ij sigma_i sigma_j / (2^{nu-1} Gamma(nu)), and
// the base smoothness nu (of the latent field, i.e. effective + 1).
double diffop_core(const HDerivs& g, double alpha, double nu_base,
                   const OperatorCoefs& ci, const OperatorCoefs& cj);

// Same combination with the three Bessel factors supplied by the caller:
// m2 = M_{nu-2}(sqrt h) (zero at zero lag), m1 = M_{nu-1}, m0 = M_nu, the
// latter two replaced by their analytic limits at zero lag.  Lets assemblers
// reuse cached factors when the scales inside h are structural.
double diffop_core_cached(const HDerivs& g, double alpha, double m2, double m1,
                          double m0, const OperatorCoefs& ci,
                          const OperatorCoefs& cj);

// Point-level evaluator, i, j in {1, 2}.
double diffop_cross_cov(int i, int j, const GeoPoint& p1, const GeoPoint& p2,
                        const DiffOpParams& theta);

// Colocated correlation C_12(s,s)/sqrt(C_11(s,s) C_22(s,s)) along a pressure
// grid at fixed latitude.  Longitude does not enter at zero horizontal lag.
std::vector<std::pair<double, double>> colocated_curve(
    const DiffOpParams& theta, double lat_deg,
    const std::vector<double>& pressures);

}  // namespace argo
