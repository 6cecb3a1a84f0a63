#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "argo/dataset.hpp"
#include "argo/fit.hpp"
#include "argo/models.hpp"

namespace argo {

// One scalar prediction target: variable var (1 = T, 2 = S) at a location.
struct ScalarTarget {
  int var = 1;
  GeoPoint point;
};

// One extra scalar conditioning value beyond the training dataset (e.g. the
// held-out float's other-variable observations).
struct ScalarObs {
  int var = 1;
  GeoPoint point;
  double value = 0.0;
};

struct CokrigeResult {
  Eigen::VectorXd mean;      // conditional mean, one entry per target
  Eigen::VectorXd variance;  // conditional variance, one entry per target
  double jitter_used = 0.0;
  bool pd_fix_applied = false;
};

// Gaussian conditional mean and variance of the targets given all training
// observations plus the extra scalars, under the fitted model.  Duplicate
// conditioning scalars (same variable and point as a training observation)
// are dropped.
CokrigeResult cokrige(const FitResult& fit, const ProfileDataset& train,
                      const std::vector<ScalarTarget>& targets,
                      const std::vector<ScalarObs>& extra = {});

struct PredictionRow {
  double pres = 0.0;
  double truth = 0.0;
  double pred = 0.0;
  double variance = 0.0;
};

struct PredictionReport {
  std::string target_float;
  ModelSpec spec;
  double distance_km = 0.0;  // held-out float to nearest remaining float
  std::vector<PredictionRow> rows_T;
  std::vector<PredictionRow> rows_S;
  double mse_T = 0.0;
  double mse_S = 0.0;
  double loglik = 0.0;  // of the fit used for prediction
  double aic = 0.0;
  double jitter_used = 0.0;
};

// Float nearest to `ref` by chordal distance at the float's shallowest
// observation; ties break to the smallest float_id.  Returns (id, km).
std::pair<std::string, double> nearest_float(const ProfileDataset& data,
                                             const GeoPoint& ref);

// Removes the float nearest to `ref`, optionally refits each model on the
// remaining data (warm-started from the supplied fits), and predicts each of
// the held-out float's variables given the training data plus the held-out
// float's other-variable values.
std::map<ModelId, PredictionReport> leave_one_float_out(
    const std::map<ModelId, FitResult>& fits, const ProfileDataset& data,
    const GeoPoint& ref, const FitConfig& cfg, bool refit = true);

struct ComparisonRow {
  ModelId model = ModelId::I1;
  double loglik = 0.0;
  double aic = 0.0;
  double mse_T = 0.0;
  double mse_S = 0.0;
  double jitter = 0.0;
  std::string knots_T;  // pipe-separated breakpoints, empty for non-spline
  std::string knots_S;
  bool best_loglik = false;
  bool best_aic = false;
  bool best_mse_T = false;
  bool best_mse_S = false;
};

// Per-model comparison rows (sorted by model id) with best-in-column flags:
// max log-likelihood, min AIC, min MSEs.  Models without a report get NaN
// MSE columns and are excluded from the MSE best-flag race.
std::vector<ComparisonRow> compare_models(
    const std::map<ModelId, FitResult>& fits,
    const std::map<ModelId, PredictionReport>& reports);

// Reports-only variant: loglik/AIC columns come from the fit each report was
// produced with (the refit on the training subset, when refitting was on).
std::vector<ComparisonRow> compare_models(
    const std::map<ModelId, PredictionReport>& reports);

}  // namespace argo
