#include "argo/models.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

#include "argo/error.hpp"

namespace argo {

std::string to_string(ModelId id) {
  switch (id) {
    case ModelId::I1: return "I1";
    case ModelId::I2: return "I2";
    case ModelId::I3: return "I3";
    case ModelId::B1: return "B1";
    case ModelId::B2: return "B2";
    case ModelId::B3: return "B3";
    case ModelId::B4: return "B4";
  }
  throw config_error("unknown model id");
}

ModelId model_from_string(const std::string& name) {
  if (name == "I1") return ModelId::I1;
  if (name == "I2") return ModelId::I2;
  if (name == "I3") return ModelId::I3;
  if (name == "B1") return ModelId::B1;
  if (name == "B2") return ModelId::B2;
  if (name == "B3") return ModelId::B3;
  if (name == "B4") return ModelId::B4;
  throw config_error("unknown model name: " + name);
}

// ---------------------------------------------------------------------------
// Transforms and ParamVector
// ---------------------------------------------------------------------------

double to_unconstrained(double value, Transform t) {
  switch (t) {
    case Transform::kLog:
      if (!(value > 0.0))
        throw config_error("log-transformed parameter must be > 0");
      return std::log(value);
    case Transform::kTanh:
      if (!(std::abs(value) < 1.0))
        throw config_error("tanh-transformed parameter must be in (-1, 1)");
      return std::atanh(value);
    case Transform::kIdentity:
      return value;
  }
  throw config_error("unknown transform");
}

double from_unconstrained(double x, Transform t) {
  switch (t) {
    case Transform::kLog:
      return std::exp(std::clamp(x, -700.0, 700.0));
    case Transform::kTanh: {
      // tanh saturates to exactly +-1 for |x| > ~19; keep the result strictly
      // inside the open interval so the inverse transform stays defined.
      constexpr double bound = 1.0 - std::numeric_limits<double>::epsilon() / 2;
      return std::clamp(std::tanh(x), -bound, bound);
    }
    case Transform::kIdentity:
      return x;
  }
  throw config_error("unknown transform");
}

ParamVector::ParamVector(std::vector<Param> params)
    : params_(std::move(params)) {
  for (std::size_t k = 0; k < params_.size(); ++k)
    for (std::size_t m = k + 1; m < params_.size(); ++m)
      if (params_[k].name == params_[m].name)
        throw config_error("duplicate parameter name: " + params_[k].name);
}

std::size_t ParamVector::free_count() const {
  std::size_t n = 0;
  for (const Param& p : params_)
    if (!p.fixed) ++n;
  return n;
}

double ParamVector::get(const std::string& name) const {
  for (const Param& p : params_)
    if (p.name == name) return p.value;
  throw config_error("unknown parameter: " + name);
}

bool ParamVector::has(const std::string& name) const {
  for (const Param& p : params_)
    if (p.name == name) return true;
  return false;
}

void ParamVector::set(const std::string& name, double value) {
  for (Param& p : params_)
    if (p.name == name) {
      p.value = value;
      return;
    }
  throw config_error("unknown parameter: " + name);
}

std::vector<double> ParamVector::pack() const {
  std::vector<double> x;
  x.reserve(params_.size());
  for (const Param& p : params_)
    if (!p.fixed) x.push_back(to_unconstrained(p.value, p.transform));
  return x;
}

void ParamVector::unpack(const std::vector<double>& x) {
  std::size_t k = 0;
  for (Param& p : params_) {
    if (p.fixed) continue;
    if (k >= x.size())
      throw config_error("unpack: coordinate vector too short");
    p.value = from_unconstrained(x[k], p.transform);
    ++k;
  }
  if (k != x.size())
    throw config_error("unpack: coordinate vector too long");
}

// ---------------------------------------------------------------------------
// ModelSpec
// ---------------------------------------------------------------------------

std::size_t ModelSpec::param_count() const {
  return default_params().free_count();
}

ParamVector ModelSpec::default_params() const {
  std::vector<Param> ps;
  auto add = [&ps](const std::string& n, double v, Transform t) {
    ps.push_back(Param{n, v, t, false});
  };
  switch (id) {
    case ModelId::I1:
    case ModelId::B1:
      add("sig2_T", 1.0, Transform::kLog);
      add("sig2_S", 1.0, Transform::kLog);
      add("a_h", fixed_a_h, Transform::kLog);
      add("a_v", fixed_a_v, Transform::kLog);
      if (id == ModelId::B1) add("beta12", 0.0, Transform::kTanh);
      break;
    case ModelId::I2:
    case ModelId::B2:
      add("a_h", fixed_a_h, Transform::kLog);
      add("a_v", fixed_a_v, Transform::kLog);
      break;
    case ModelId::I3:
    case ModelId::B3:
    case ModelId::B4: {
      spline_T.validate();
      spline_S.validate();
      add("a_T", 0.0, Transform::kIdentity);
      add("b_T", 0.0, Transform::kIdentity);
      for (std::size_t m = 0; m < spline_T.basis_count(); ++m)
        add("cw_T_" + std::to_string(m), 1.0, Transform::kIdentity);
      add("a_S", 0.0, Transform::kIdentity);
      add("b_S", 0.0, Transform::kIdentity);
      for (std::size_t m = 0; m < spline_S.basis_count(); ++m)
        add("cw_S_" + std::to_string(m), 1.0, Transform::kIdentity);
      if (id == ModelId::B4) add("beta12", 0.0, Transform::kTanh);
      break;
    }
  }
  return ParamVector(std::move(ps));
}

MaternParams ModelSpec::matern_params(const ParamVector& theta) const {
  MaternParams mp;
  mp.nu = {direct_nu, direct_nu};
  mp.dim_d = dim_d;
  switch (id) {
    case ModelId::I1:
    case ModelId::B1:
      mp.sigma2 = {theta.get("sig2_T"), theta.get("sig2_S")};
      mp.a_h = theta.get("a_h");
      mp.a_v = theta.get("a_v");
      mp.beta12 = id == ModelId::B1 ? theta.get("beta12") : 0.0;
      break;
    case ModelId::I2:
    case ModelId::B2:
      // Variances are plug-in fields; unit placeholders here.
      mp.sigma2 = {1.0, 1.0};
      mp.a_h = theta.get("a_h");
      mp.a_v = theta.get("a_v");
      mp.beta12 = 0.0;
      break;
    default:
      throw config_error("matern_params: not a parsimonious-Matérn model");
  }
  mp.validate();
  return mp;
}

DiffOpParams ModelSpec::diffop_params(const ParamVector& theta) const {
  if (!is_diffop(id))
    throw config_error("diffop_params: not a differential-operator model");
  DiffOpParams dp;
  dp.base.sigma2 = {1.0, 1.0};
  dp.base.nu = {base_nu, base_nu};
  dp.base.a_h = fixed_a_h;
  dp.base.a_v = fixed_a_v;
  dp.base.dim_d = dim_d;
  if (id == ModelId::I3)
    dp.base.beta12 = 0.0;
  else if (id == ModelId::B3)
    dp.base.beta12 = 1.0;  // shared latent process
  else
    dp.base.beta12 = theta.get("beta12");
  dp.op[0].a = theta.get("a_T");
  dp.op[0].b = theta.get("b_T");
  dp.op[0].c_spec = spline_T;
  dp.op[0].c_w.weights.resize(spline_T.basis_count());
  for (std::size_t m = 0; m < spline_T.basis_count(); ++m)
    dp.op[0].c_w.weights[m] = theta.get("cw_T_" + std::to_string(m));
  dp.op[1].a = theta.get("a_S");
  dp.op[1].b = theta.get("b_S");
  dp.op[1].c_spec = spline_S;
  dp.op[1].c_w.weights.resize(spline_S.basis_count());
  for (std::size_t m = 0; m < spline_S.basis_count(); ++m)
    dp.op[1].c_w.weights[m] = theta.get("cw_S_" + std::to_string(m));
  dp.validate();
  return dp;
}

// ---------------------------------------------------------------------------
// CovAssembler
// ---------------------------------------------------------------------------

CovAssembler::CovAssembler(ModelSpec spec, std::vector<GeoPoint> points)
    : spec_(std::move(spec)), points_(std::move(points)) {
  if (points_.empty())
    throw std::invalid_argument("CovAssembler: empty point set");
  for (const GeoPoint& p : points_) validate_point(p);
  const std::size_t n = points_.size();
  pairs_.resize(n * (n + 1) / 2);
  const bool diffop = is_diffop(spec_.id);
  const double nu = spec_.base_nu;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      PairCache& pc = pairs_[pair_index(a, b)];
      pc.trig = pair_trig(points_[a], points_[b]);
      if (!diffop) continue;
      pc.g = h_derivs(pc.trig, spec_.fixed_a_h, spec_.fixed_a_v);
      if (pc.g.h < 1e-30) {
        // Zero-lag: the order nu-2 factor never contributes (its quadratic
        // form vanishes identically); store the finite limits of the rest.
        pc.m2 = 0.0;
        pc.m1 = matern_zero_limit(nu - 1.0);
        pc.m0 = matern_zero_limit(nu);
      } else {
        const double x = std::sqrt(pc.g.h);
        if (x > 700.0) {
          pc.m2 = pc.m1 = pc.m0 = 0.0;
        } else {
          pc.m2 = matern_m_raw(nu - 2.0, x);
          pc.m1 = matern_m_raw(nu - 1.0, x);
          pc.m0 = pc.g.h * pc.m2 + 2.0 * (nu - 1.0) * pc.m1;
        }
      }
    }
  }
}

void CovAssembler::attach_moments(const MomentsGrid& grid,
                                  const ProfileDataset& data) {
  if (!is_semiparametric(spec_.id))
    throw config_error("attach_moments: model has no plug-in moments");
  grid_ = &grid;
  data_ = &data;
  const std::size_t n = points_.size();
  sig_T_.resize(n);
  sig_S_.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    sig_T_[a] = grid.sigma_hat(points_[a], 1);
    sig_S_[a] = grid.sigma_hat(points_[a], 2);
    if (!(sig_T_[a] > 0.0) || !(sig_S_[a] > 0.0))
      throw insufficient_variance(
          "attach_moments: zero smoothed standard deviation at a point");
  }
  if (spec_.id == ModelId::B2) {
    // Exact pairwise correlation seeds; a 3D lattice cannot represent the
    // pair surface, so these come straight from the estimator.
    std::vector<SmoothedLocation> locs;
    locs.reserve(n);
    for (const GeoPoint& p : points_)
      locs.push_back(smooth_location(p, data, grid.bandwidths()));
    beta_pairs_.resize(static_cast<Eigen::Index>(n),
                       static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        const double denom = locs[a].sig_hat[0] * locs[b].sig_hat[1];
        double beta = 0.0;
        if (denom > 0.0)
          beta = std::clamp(
              smoothed_cross_cov(locs[a], locs[b], 1, 2, data) / denom, -1.0,
              1.0);
        beta_pairs_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            beta;
        // beta_12(s_a, s_b) with roles swapped: variable 1 at s_b.
        double beta_t = 0.0;
        const double denom_t = locs[b].sig_hat[0] * locs[a].sig_hat[1];
        if (denom_t > 0.0)
          beta_t = std::clamp(
              smoothed_cross_cov(locs[b], locs[a], 1, 2, data) / denom_t, -1.0,
              1.0);
        beta_pairs_(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) =
            beta_t;
      }
    }
  }
  has_moments_ = true;
}

CovMatrix CovAssembler::assemble(const ParamVector& theta) const {
  const std::size_t n = points_.size();
  if (is_semiparametric(spec_.id) && !has_moments_)
    throw config_error("assemble: semi-parametric model without moments");

  if (is_diffop(spec_.id)) {
    const DiffOpParams dp = spec_.diffop_params(theta);
    const double nu = spec_.base_nu;
    const double inv_norm = 1.0 / matern_zero_limit(nu);
    const double alpha11 = inv_norm;
    const double alpha22 = inv_norm;
    const double alpha12 = dp.base.rho12() * inv_norm;
    // Vertical coefficients at every point for both variables.
    std::vector<double> cT(n), cS(n);
    for (std::size_t a = 0; a < n; ++a) {
      cT[a] = dp.op[0].c_at(points_[a].pres);
      cS[a] = dp.op[1].c_at(points_[a].pres);
    }
    auto entry = [&](int i, int j, std::size_t a, std::size_t b) -> double {
      // Cached pairs hold (row point, col point) = (max, min); the operator
      // coefficient of the *first* argument must follow the row point.
      const bool swapped = b > a;
      const PairCache& pc = pairs_[pair_index(a, b)];
      const std::size_t pa = swapped ? b : a;
      const std::size_t pb = swapped ? a : b;
      const int ii = swapped ? j : i;
      const int jj = swapped ? i : j;
      const VarOperator& oi = dp.op[ii - 1];
      const VarOperator& oj = dp.op[jj - 1];
      const OperatorCoefs ci{oi.a, oi.b, ii == 1 ? cT[pa] : cS[pa], oi.d};
      const OperatorCoefs cj{oj.a, oj.b, jj == 1 ? cT[pb] : cS[pb], oj.d};
      const double alpha =
          ii == jj ? (ii == 1 ? alpha11 : alpha22) : alpha12;
      return diffop_core_cached(pc.g, alpha, pc.m2, pc.m1, pc.m0, ci, cj);
    };
    return assemble_cov(entry, n);
  }

  // Parsimonious-Matérn family (I1, B1, I2, B2).
  const MaternParams mp = spec_.matern_params(theta);
  const double nu = mp.nu[0];  // both variables share direct_nu
  const double inv_norm = 1.0 / matern_zero_limit(nu);
  const double ah2 = mp.a_h * mp.a_h, av2 = mp.a_v * mp.a_v;
  const bool semi = is_semiparametric(spec_.id);
  const double rho_const =
      spec_.id == ModelId::B1 ? mp.rho12() : 0.0;
  // For B2 the gamma-ratio factor of the correlation mapping is constant
  // across pairs (smoothness is constant); the seed varies per pair.
  const double gamma_factor =
      spec_.id == ModelId::B2 ? rho_from_beta(1.0, nu, nu, mp.dim_d) : 0.0;

  auto entry = [&](int i, int j, std::size_t a, std::size_t b) -> double {
    const PairCache& pc = pairs_[pair_index(a, b)];
    const double h = ah2 * pc.trig.ch2 + av2 * pc.trig.dp * pc.trig.dp;
    double m;  // normalized Matérn factor in [0, 1]
    if (h < 1e-30)
      m = 1.0;
    else {
      const double x = std::sqrt(h);
      m = x > 700.0 ? 0.0 : matern_m_raw(nu, x) * inv_norm;
    }
    double si, sj;
    if (semi) {
      si = (i == 1 ? sig_T_ : sig_S_)[a];
      sj = (j == 1 ? sig_T_ : sig_S_)[b];
    } else {
      si = std::sqrt(mp.sigma2[i - 1]);
      sj = std::sqrt(mp.sigma2[j - 1]);
    }
    double rho;
    if (i == j)
      rho = 1.0;
    else if (spec_.id == ModelId::B2) {
      // beta_pairs_(a, b) holds beta_12 with variable 1 at points_[a].
      const double seed = i == 1 ? beta_pairs_(static_cast<Eigen::Index>(a),
                                               static_cast<Eigen::Index>(b))
                                 : beta_pairs_(static_cast<Eigen::Index>(b),
                                               static_cast<Eigen::Index>(a));
      rho = seed * gamma_factor;
    } else
      rho = rho_const;
    return rho * si * sj * m;
  };
  return assemble_cov(entry, n);
}

double CovAssembler::entry_dynamic(const ParamVector& theta, int i, int j,
                                   const GeoPoint& p1, const GeoPoint& p2,
                                   const std::optional<PairTrig>& trig) const {
  if (is_diffop(spec_.id)) {
    const DiffOpParams dp = spec_.diffop_params(theta);
    return diffop_cross_cov(i, j, p1, p2, dp);
  }
  const MaternParams mp = spec_.matern_params(theta);
  if (!is_semiparametric(spec_.id))
    return parsimonious_matern(i, j, p1, p2, mp);
  // Semi-parametric: plug-in amplitudes at arbitrary points.
  if (!has_moments_)
    throw config_error("entry: semi-parametric model without moments");
  const double si = grid_->sigma_hat(p1, i);
  const double sj = grid_->sigma_hat(p2, j);
  const double nu = mp.nu[0];
  const PairTrig t = trig ? *trig : pair_trig(p1, p2);
  const double h =
      mp.a_h * mp.a_h * t.ch2 + mp.a_v * mp.a_v * t.dp * t.dp;
  double m;
  if (h < 1e-30)
    m = 1.0;
  else {
    const double x = std::sqrt(h);
    m = x > 700.0 ? 0.0 : matern_m_raw(nu, x) / matern_zero_limit(nu);
  }
  double rho = 0.0;
  if (i != j) {
    if (spec_.id == ModelId::B2) {
      if (data_ == nullptr)
        throw config_error("entry: B2 requires the training dataset");
      const GeoPoint& sT = i == 1 ? p1 : p2;
      const GeoPoint& sS = i == 1 ? p2 : p1;
      const double seed =
          smoothed_beta(sT, sS, 1, 2, *data_, grid_->bandwidths());
      rho = seed * rho_from_beta(1.0, nu, nu, mp.dim_d);
    } else {
      rho = 0.0;
    }
  } else {
    rho = 1.0;
  }
  return rho * si * sj * m;
}

double CovAssembler::entry(const ParamVector& theta, int i, int j,
                           const GeoPoint& p1, const GeoPoint& p2) const {
  return entry_dynamic(theta, i, j, p1, p2, std::nullopt);
}

Eigen::MatrixXd CovAssembler::assemble_cross_to(
    const ParamVector& theta, const std::vector<GeoPoint>& row_points,
    const std::vector<int>& row_vars) const {
  if (row_points.size() != row_vars.size())
    throw std::invalid_argument("assemble_cross_to: row spec mismatch");
  const std::size_t n = points_.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(row_points.size()),
                      static_cast<Eigen::Index>(2 * n));
  for (std::size_t r = 0; r < row_points.size(); ++r) {
    for (std::size_t c = 0; c < 2 * n; ++c) {
      const int vj = c < n ? 1 : 2;
      const std::size_t pb = c < n ? c : c - n;
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          entry_dynamic(theta, row_vars[r], vj, row_points[r], points_[pb],
                        std::nullopt);
    }
  }
  return out;
}

}  // namespace argo
