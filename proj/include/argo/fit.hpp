#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "argo/dataset.hpp"
#include "argo/empirical.hpp"
#include "argo/models.hpp"
#include "argo/optimizer.hpp"
#include "argo/splines.hpp"

namespace argo {

struct FitConfig {
  KernelBandwidths bw;
  std::size_t wls_max_anchors = 40;
  OptimizerConfig wls_opt{/*max_evals=*/1500, /*restarts=*/2,
                          /*init_step=*/0.5};
  OptimizerConfig mle_opt{/*max_evals=*/600, /*restarts=*/2,
                          /*init_step=*/0.3};
  SplineSpec initial_spline{3, {0.0, 100.0, 1000.0, 2000.0}};
  int max_refinements = 3;
  double refine_threshold_mult = 2.0;  // stop when dloglik < mult * dparams
  double nugget = 0.0;
  int dim_d = 3;
  std::uint64_t seed = 0;
};

struct FitResult {
  ModelSpec spec;
  ParamVector theta;
  double loglik = 0.0;
  double aic = 0.0;
  double wls_objective = -1.0;  // final WLS value; -1 when WLS not run
  std::vector<double> trace;    // monotone accepted log-likelihoods
  double jitter_used = 0.0;
  bool pd_fix_applied = false;
  std::size_t evals = 0;
  std::vector<std::string> warnings;
};

// Observation vector in the variable-major layout (all T, then all S).
Eigen::VectorXd stack_observations(const ProfileDataset& data);

// Depth-stratified deterministic subsample of at most `max_n` observation
// points used as WLS anchor locations.
std::vector<GeoPoint> anchor_locations(const ProfileDataset& data,
                                       std::size_t max_n);

// Smoothed empirical cross-covariance over the anchor set, in the assembler's
// 2A x 2A layout.
CovMatrix empirical_cov_matrix(const std::vector<GeoPoint>& anchors,
                               const ProfileDataset& data,
                               const KernelBandwidths& bw);

// Squared-difference objective between the smoothed empirical
// cross-covariance and the model cross-covariance over all ordered anchor
// pairs and variable pairs.
double wls_objective(const CovAssembler& anchors_assembler,
                     const ParamVector& theta, const CovMatrix& chat);

// Gaussian log-likelihood of theta under the assembled model covariance.
// For the semi-parametric models an indefinite assembly is repaired by
// eigenvalue clipping before factorization (sets *pd_fixed when provided).
double model_loglik(const CovAssembler& assembler, const ParamVector& theta,
                    const Eigen::VectorXd& z, double nugget,
                    double* jitter_used = nullptr, bool* pd_fixed = nullptr);

// Step 2 only: simplex MLE from theta0.
FitResult mle(const ModelSpec& spec, const ParamVector& theta0,
              const ProfileDataset& data, const FitConfig& cfg);

// Step 1 + Step 2 for the parametric models (I1, B1, I3, B3, B4).
FitResult two_step_fit(const ModelSpec& spec, const ProfileDataset& data,
                       const FitConfig& cfg);

// Semi-parametric models (I2, B2): plug-in moment fields, MLE over scales.
FitResult fit_semiparametric(const ModelSpec& spec, const ProfileDataset& data,
                             const FitConfig& cfg);

struct StagedFits {
  std::map<ModelId, FitResult> fits;
  std::map<ModelId, std::string> failures;
  ModelSpec diffop_spec;  // spec shared by I3/B3/B4 (scales from I1)
};

// I1 -> (fixes scales) -> I3 two-step -> B3 (rho = 1) and B4 (rho free,
// started at 0) seeded from I3; B1 seeded from I1.  Failures are recorded and
// remaining stages continue.
StagedFits staged_fit_bivariate(const ProfileDataset& data,
                                const FitConfig& cfg);

struct RefinementResult {
  SplineSpec spline;  // final knots (shared by both variables)
  FitResult fit;      // I3 fit at the final knots
  std::vector<double> loglik_path;  // I3 log-lik per knot stage
};

// Midpoint knot refinement for I3, stopping when the log-likelihood gain
// drops below refine_threshold_mult * (added parameter count) or after
// max_refinements rounds.  `scales_from` provides the structural scales.
RefinementResult knot_refinement_loop(const ProfileDataset& data,
                                      const FitConfig& cfg,
                                      const FitResult& scales_from);

// Flip the sign of a variable's operator block if its vertical-coefficient
// weights sum to a negative number.  The I3 covariance is invariant to
// per-variable sign flips; canonicalizing makes downstream correlation signs
// identifiable.  For B4 a single-variable flip is compensated through the
// sign of beta12.
void canonicalize_operator_signs(FitResult* fit);

}  // namespace argo
