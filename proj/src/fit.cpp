#include "argo/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>

#include "argo/error.hpp"
#include "argo/linalg.hpp"
#include "argo/rng.hpp"

namespace argo {

namespace {

// Deterministic per-(seed, purpose) optimizer stream.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  return Rng(seed, tag).next_u64();
}

constexpr std::uint64_t kWlsTag = 0x574c53;  // "WLS"
constexpr std::uint64_t kMleTag = 0x4d4c45;  // "MLE"

std::uint64_t model_tag(std::uint64_t base, ModelId id) {
  return base * 131 + static_cast<std::uint64_t>(id) + 1;
}

}  // namespace

Eigen::VectorXd stack_observations(const ProfileDataset& data) {
  const std::size_t n = data.size();
  Eigen::VectorXd z(2 * n);
  for (std::size_t a = 0; a < n; ++a) {
    z[static_cast<Eigen::Index>(a)] = data.observations()[a].temp;
    z[static_cast<Eigen::Index>(n + a)] = data.observations()[a].psal;
  }
  return z;
}

std::vector<GeoPoint> anchor_locations(const ProfileDataset& data,
                                       std::size_t max_n) {
  if (max_n == 0) throw config_error("anchor budget must be positive");
  if (data.empty()) throw insufficient_data("no observations to anchor on");
  std::vector<GeoPoint> pts = data.points();
  std::sort(pts.begin(), pts.end(), [](const GeoPoint& a, const GeoPoint& b) {
    return std::tie(a.pres, a.lat, a.lon) < std::tie(b.pres, b.lat, b.lon);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= max_n) return pts;

  // Sorted by pressure, so evenly spaced ranks stratify the depth range.
  std::vector<GeoPoint> out;
  out.reserve(max_n);
  if (max_n == 1) {
    out.push_back(pts[pts.size() / 2]);
    return out;
  }
  for (std::size_t k = 0; k < max_n; ++k) {
    const std::size_t idx = (k * (pts.size() - 1)) / (max_n - 1);
    if (out.empty() || !(out.back() == pts[idx])) out.push_back(pts[idx]);
  }
  return out;
}

CovMatrix empirical_cov_matrix(const std::vector<GeoPoint>& anchors,
                               const ProfileDataset& data,
                               const KernelBandwidths& bw) {
  bw.validate();
  const std::size_t A = anchors.size();
  if (A == 0) throw insufficient_data("empirical_cov_matrix: no anchors");
  std::vector<SmoothedLocation> locs;
  locs.reserve(A);
  for (const GeoPoint& s : anchors) locs.push_back(smooth_location(s, data, bw));

  CovMatrix out;
  out.n_obs = A;
  out.values.resize(static_cast<Eigen::Index>(2 * A),
                    static_cast<Eigen::Index>(2 * A));
  for (std::size_t r = 0; r < 2 * A; ++r) {
    const int i = r < A ? 1 : 2;
    const std::size_t a = r % A;
    for (std::size_t c = 0; c <= r; ++c) {
      const int j = c < A ? 1 : 2;
      const std::size_t b = c % A;
      const double v = smoothed_cross_cov(locs[a], locs[b], i, j, data);
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
      out.values(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
    }
  }
  return out;
}

double wls_objective(const CovAssembler& anchors_assembler,
                     const ParamVector& theta, const CovMatrix& chat) {
  const CovMatrix model = anchors_assembler.assemble(theta);
  if (model.values.rows() != chat.values.rows())
    throw std::invalid_argument("wls_objective: dimension mismatch");
  return (model.values - chat.values).squaredNorm();
}

double model_loglik(const CovAssembler& assembler, const ParamVector& theta,
                    const Eigen::VectorXd& z, double nugget,
                    double* jitter_used, bool* pd_fixed) {
  const CovMatrix sigma = assembler.assemble(theta);
  try {
    const LoglikResult r = chol_loglik(sigma, z, nugget);
    if (jitter_used != nullptr) *jitter_used = r.jitter_used;
    if (pd_fixed != nullptr) *pd_fixed = false;
    return r.loglik;
  } catch (const not_positive_definite&) {
    if (!is_semiparametric(assembler.spec().id)) throw;
    // Plug-in cross-correlation fields can make the assembly indefinite;
    // repair by eigenvalue clipping and retry.
    const CovMatrix repaired = nearest_pd_fix(sigma);
    const LoglikResult r = chol_loglik(repaired, z, nugget);
    if (jitter_used != nullptr) *jitter_used = r.jitter_used;
    if (pd_fixed != nullptr) *pd_fixed = true;
    return r.loglik;
  }
}

FitResult mle(const ModelSpec& spec, const ParamVector& theta0,
              const ProfileDataset& data, const FitConfig& cfg) {
  if (data.size() < 2)
    throw insufficient_data("MLE needs at least 2 observations");
  const Eigen::VectorXd z = stack_observations(data);
  CovAssembler assembler(spec, data.points());
  std::optional<MomentsGrid> grid;
  if (is_semiparametric(spec.id)) {
    grid.emplace(data, spec.moment_bw);
    assembler.attach_moments(*grid, data);
  }

  ParamVector work = theta0;
  const auto objective = [&](const std::vector<double>& x) {
    work.unpack(x);
    return model_loglik(assembler, work, z, spec.nugget);
  };

  OptimizerConfig oc = cfg.mle_opt;
  oc.seed = mix_seed(cfg.seed, model_tag(kMleTag, spec.id));
  const OptimizerResult r = nelder_mead_maximize(objective, theta0.pack(), oc);
  if (!std::isfinite(r.value))
    throw numerical_error("MLE found no finite likelihood for model " +
                          to_string(spec.id));

  FitResult out;
  out.spec = spec;
  out.theta = theta0;
  out.theta.unpack(r.x);
  out.loglik =
      model_loglik(assembler, out.theta, z, spec.nugget, &out.jitter_used,
                   &out.pd_fix_applied);
  out.trace = r.trace;
  out.evals = r.evals + 1;
  out.aic = 2.0 * static_cast<double>(out.theta.free_count()) - 2.0 * out.loglik;
  return out;
}

FitResult two_step_fit(const ModelSpec& spec_in, const ProfileDataset& data,
                       const FitConfig& cfg) {
  if (is_semiparametric(spec_in.id))
    throw config_error("two_step_fit: use fit_semiparametric for " +
                       to_string(spec_in.id));
  ModelSpec spec = spec_in;
  spec.nugget = cfg.nugget;

  ParamVector theta0 = spec.default_params();
  double wls_value = -1.0;
  std::vector<std::string> warnings;
  try {
    const std::vector<GeoPoint> anchors =
        anchor_locations(data, cfg.wls_max_anchors);
    if (anchors.size() < 2)
      throw insufficient_data("WLS needs at least 2 anchor locations");
    const CovMatrix chat = empirical_cov_matrix(anchors, data, cfg.bw);
    const CovAssembler anchor_asm(spec, anchors);

    ParamVector work = theta0;
    const auto objective = [&](const std::vector<double>& x) {
      work.unpack(x);
      return -wls_objective(anchor_asm, work, chat);
    };
    OptimizerConfig oc = cfg.wls_opt;
    oc.seed = mix_seed(cfg.seed, model_tag(kWlsTag, spec.id));
    const OptimizerResult r =
        nelder_mead_maximize(objective, theta0.pack(), oc);
    if (std::isfinite(r.value)) {
      theta0.unpack(r.x);
      wls_value = -r.value;
    } else {
      warnings.push_back("WLS stage produced no finite objective value; "
                         "MLE starts from default parameters");
    }
  } catch (const std::exception& e) {
    warnings.push_back(std::string("WLS stage failed (") + e.what() +
                       "); MLE starts from default parameters");
  }

  FitResult out = mle(spec, theta0, data, cfg);
  out.wls_objective = wls_value;
  out.warnings.insert(out.warnings.end(), warnings.begin(), warnings.end());
  return out;
}

FitResult fit_semiparametric(const ModelSpec& spec_in,
                             const ProfileDataset& data, const FitConfig& cfg) {
  if (!is_semiparametric(spec_in.id))
    throw config_error("fit_semiparametric: model " + to_string(spec_in.id) +
                       " is not semi-parametric");
  ModelSpec spec = spec_in;
  spec.nugget = cfg.nugget;
  spec.moment_bw = cfg.bw;
  return mle(spec, spec.default_params(), data, cfg);
}

void canonicalize_operator_signs(FitResult* fit) {
  if (fit == nullptr || !is_diffop(fit->spec.id)) return;
  // B3 pins the latent correlation at 1, so a single-variable sign flip
  // changes the cross block; only I3 (independent) and B4 (beta absorbs the
  // flip) are sign-equivalent.
  if (fit->spec.id == ModelId::B3) return;

  const std::array<const char*, 2> var_names = {"T", "S"};
  const std::array<const SplineSpec*, 2> splines = {&fit->spec.spline_T,
                                                    &fit->spec.spline_S};
  for (int v = 0; v < 2; ++v) {
    const std::string suffix = var_names[static_cast<std::size_t>(v)];
    const std::size_t m_count =
        splines[static_cast<std::size_t>(v)]->basis_count();
    double sum = 0.0;
    for (std::size_t m = 0; m < m_count; ++m)
      sum += fit->theta.get("cw_" + suffix + "_" + std::to_string(m));
    if (sum >= 0.0) continue;

    fit->theta.set("a_" + suffix, -fit->theta.get("a_" + suffix));
    fit->theta.set("b_" + suffix, -fit->theta.get("b_" + suffix));
    for (std::size_t m = 0; m < m_count; ++m) {
      const std::string name = "cw_" + suffix + "_" + std::to_string(m);
      fit->theta.set(name, -fit->theta.get(name));
    }
    if (fit->spec.id == ModelId::B4)
      fit->theta.set("beta12", -fit->theta.get("beta12"));
  }
}

StagedFits staged_fit_bivariate(const ProfileDataset& data,
                                const FitConfig& cfg) {
  StagedFits out;

  // Stage 1: stationary baseline.  Its scale estimates become structural for
  // the differential-operator stages.
  ModelSpec i1;
  i1.id = ModelId::I1;
  i1.dim_d = cfg.dim_d;
  i1.nugget = cfg.nugget;
  const FitResult* i1_fit = nullptr;
  try {
    out.fits[ModelId::I1] = two_step_fit(i1, data, cfg);
    i1_fit = &out.fits.at(ModelId::I1);
  } catch (const std::exception& e) {
    out.failures[ModelId::I1] = e.what();
  }

  // B1: stationary bivariate, seeded from I1 with beta12 = 0.
  try {
    ModelSpec b1 = i1;
    b1.id = ModelId::B1;
    ParamVector tb1 = b1.default_params();
    if (i1_fit != nullptr) {
      for (const char* name : {"sig2_T", "sig2_S", "a_h", "a_v"})
        tb1.set(name, i1_fit->theta.get(name));
    }
    FitResult fb1 = mle(b1, tb1, data, cfg);
    if (i1_fit == nullptr)
      fb1.warnings.push_back("I1 stage failed; B1 seeded from defaults");
    out.fits[ModelId::B1] = std::move(fb1);
  } catch (const std::exception& e) {
    out.failures[ModelId::B1] = e.what();
  }

  // Shared differential-operator spec with structural scales.
  ModelSpec d;
  d.id = ModelId::I3;
  d.dim_d = cfg.dim_d;
  d.nugget = cfg.nugget;
  d.spline_T = cfg.initial_spline;
  d.spline_S = cfg.initial_spline;
  if (i1_fit != nullptr) {
    d.fixed_a_h = i1_fit->theta.get("a_h");
    d.fixed_a_v = i1_fit->theta.get("a_v");
  }
  out.diffop_spec = d;

  const FitResult* i3_fit = nullptr;
  try {
    FitResult fi3 = two_step_fit(d, data, cfg);
    if (i1_fit == nullptr)
      fi3.warnings.push_back("I1 stage failed; scales left at defaults");
    canonicalize_operator_signs(&fi3);
    out.fits[ModelId::I3] = std::move(fi3);
    i3_fit = &out.fits.at(ModelId::I3);
  } catch (const std::exception& e) {
    out.failures[ModelId::I3] = e.what();
  }

  const auto seed_from_i3 = [&](ParamVector* theta) {
    if (i3_fit == nullptr) return false;
    for (const Param& p : i3_fit->theta.params()) theta->set(p.name, p.value);
    return true;
  };

  // B3: one shared latent process (rho pinned at 1), started at I3's
  // operator estimates.
  try {
    ModelSpec s3 = d;
    s3.id = ModelId::B3;
    ParamVector t3 = s3.default_params();
    const bool seeded = seed_from_i3(&t3);
    FitResult f3 = mle(s3, t3, data, cfg);
    if (!seeded)
      f3.warnings.push_back("I3 stage failed; B3 seeded from defaults");
    out.fits[ModelId::B3] = std::move(f3);
  } catch (const std::exception& e) {
    out.failures[ModelId::B3] = e.what();
  }

  // B4: free latent correlation, started at I3's estimates with beta12 = 0
  // (so its starting log-likelihood equals I3's and the nesting inequality
  // holds by optimizer monotonicity).
  try {
    ModelSpec s4 = d;
    s4.id = ModelId::B4;
    ParamVector t4 = s4.default_params();
    const bool seeded = seed_from_i3(&t4);
    t4.set("beta12", 0.0);
    FitResult f4 = mle(s4, t4, data, cfg);
    if (!seeded)
      f4.warnings.push_back("I3 stage failed; B4 seeded from defaults");
    canonicalize_operator_signs(&f4);
    out.fits[ModelId::B4] = std::move(f4);
  } catch (const std::exception& e) {
    out.failures[ModelId::B4] = e.what();
  }

  return out;
}

RefinementResult knot_refinement_loop(const ProfileDataset& data,
                                      const FitConfig& cfg,
                                      const FitResult& scales_from) {
  ModelSpec d;
  d.id = ModelId::I3;
  d.dim_d = cfg.dim_d;
  d.nugget = cfg.nugget;
  d.spline_T = cfg.initial_spline;
  d.spline_S = cfg.initial_spline;
  if (scales_from.theta.has("a_h")) d.fixed_a_h = scales_from.theta.get("a_h");
  if (scales_from.theta.has("a_v")) d.fixed_a_v = scales_from.theta.get("a_v");

  RefinementResult rr;
  rr.spline = cfg.initial_spline;
  rr.fit = two_step_fit(d, data, cfg);
  canonicalize_operator_signs(&rr.fit);
  rr.loglik_path.push_back(rr.fit.loglik);

  for (int round = 0; round < cfg.max_refinements; ++round) {
    // An infinite threshold can never be met, so the initial fit stands.
    if (!(cfg.refine_threshold_mult < std::numeric_limits<double>::infinity()))
      break;
    const SplineSpec refined = refine_knots(rr.spline);
    ModelSpec cand = d;
    cand.spline_T = refined;
    cand.spline_S = refined;
    const double dk = static_cast<double>(cand.param_count()) -
                      static_cast<double>(d.param_count());
    FitResult cf = two_step_fit(cand, data, cfg);
    rr.loglik_path.push_back(cf.loglik);
    const double dll = cf.loglik - rr.fit.loglik;
    if (dll < cfg.refine_threshold_mult * dk) break;
    canonicalize_operator_signs(&cf);
    rr.fit = std::move(cf);
    rr.spline = refined;
    d = cand;
  }
  return rr;
}

}  // namespace argo
