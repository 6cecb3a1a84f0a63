#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "argo/dataset.hpp"
#include "argo/empirical.hpp"
#include "argo/kernels.hpp"
#include "argo/linalg.hpp"
#include "argo/splines.hpp"

namespace argo {

enum class ModelId { I1, I2, I3, B1, B2, B3, B4 };

std::string to_string(ModelId id);
ModelId model_from_string(const std::string& name);

inline bool is_bivariate(ModelId id) {
  return id == ModelId::B1 || id == ModelId::B2 || id == ModelId::B3 ||
         id == ModelId::B4;
}
inline bool is_semiparametric(ModelId id) {
  return id == ModelId::I2 || id == ModelId::B2;
}
inline bool is_diffop(ModelId id) {
  return id == ModelId::I3 || id == ModelId::B3 || id == ModelId::B4;
}

// ---------------------------------------------------------------------------
// Named parameters with bounded transforms
// ---------------------------------------------------------------------------

enum class Transform {
  kLog,       // value in (0, inf), optimized as log(value)
  kTanh,      // value in (-1, 1), optimized as atanh(value)
  kIdentity,  // free real
};

struct Param {
  std::string name;
  double value = 0.0;
  Transform transform = Transform::kIdentity;
  bool fixed = false;
};

class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::vector<Param> params);

  const std::vector<Param>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }
  std::size_t free_count() const;

  double get(const std::string& name) const;
  void set(const std::string& name, double value);
  bool has(const std::string& name) const;

  // Free parameters mapped to unconstrained coordinates, in declaration
  // order.  unpack() is the exact inverse (round-trips to 1e-12).
  std::vector<double> pack() const;
  void unpack(const std::vector<double>& x);

 private:
  std::vector<Param> params_;
};

double to_unconstrained(double value, Transform t);
double from_unconstrained(double x, Transform t);

// ---------------------------------------------------------------------------
// Model structure
// ---------------------------------------------------------------------------

// Identity plus the structural (non-optimized) configuration of a model.
// For the differential-operator models the horizontal/vertical scales are
// structural: they are estimated once by the stationary stage and then held
// fixed, which also makes the pairwise Bessel geometry reusable across
// optimizer iterations.
struct ModelSpec {
  ModelId id = ModelId::I1;
  int dim_d = 3;
  double nugget = 0.0;

  // Diff-op models only:
  SplineSpec spline_T{3, {0.0, 100.0, 1000.0, 2000.0}};
  SplineSpec spline_S{3, {0.0, 100.0, 1000.0, 2000.0}};
  double fixed_a_h = 1.0 / 300.0;
  double fixed_a_v = 1.0 / 100.0;
  double base_nu = 2.0;  // latent-field smoothness; effective is base_nu - 1

  // Stationary/semi-parametric models: effective smoothness used directly.
  double direct_nu = 1.0;

  // Semi-parametric models only: bandwidths of the plug-in moment smoother.
  // Part of the fitted model, since the moment fields must be rebuilt from
  // training data at prediction time.
  KernelBandwidths moment_bw;

  std::size_t param_count() const;   // number of free parameters
  ParamVector default_params() const;

  // Materialize kernel parameter objects from a ParamVector.
  MaternParams matern_params(const ParamVector& theta) const;
  DiffOpParams diffop_params(const ParamVector& theta) const;
};

// ---------------------------------------------------------------------------
// Covariance assembly with per-point-set caching
// ---------------------------------------------------------------------------

// Immutable geometry cache for one (model, point set) pair plus the
// theta-dependent assembly.  For diff-op models the Bessel factors are
// precomputed per pair (scales are structural), so one assemble() costs a few
// flops per entry.  For the semi-parametric models the plug-in moment fields
// are precomputed once (they do not depend on theta).
class CovAssembler {
 public:
  CovAssembler(ModelSpec spec, std::vector<GeoPoint> points);

  // Required for I2/B2 before assemble(): plug-in smoothed moments.
  void attach_moments(const MomentsGrid& grid, const ProfileDataset& data);

  const ModelSpec& spec() const { return spec_; }
  std::size_t n_points() const { return points_.size(); }
  const std::vector<GeoPoint>& points() const { return points_; }

  CovMatrix assemble(const ParamVector& theta) const;

  // Rectangular block: rows are (variable, external point) pairs, columns the
  // training layout.  Used by prediction.
  Eigen::MatrixXd assemble_cross_to(const ParamVector& theta,
                                    const std::vector<GeoPoint>& row_points,
                                    const std::vector<int>& row_vars) const;

  // Single entry against external points (slow path, used in tests).
  double entry(const ParamVector& theta, int i, int j, const GeoPoint& p1,
               const GeoPoint& p2) const;

 private:
  struct PairCache {
    PairTrig trig;
    // Diff-op Bessel factors at sqrt(h) for the structural scales:
    double m2 = 0.0;  // M_{nu-2}, zeroed at zero lag (S1 vanishes there)
    double m1 = 0.0;  // M_{nu-1} or its zero-lag limit
    double m0 = 0.0;  // M_{nu}   or its zero-lag limit
    HDerivs g;
  };

  double entry_dynamic(const ParamVector& theta, int i, int j,
                       const GeoPoint& p1, const GeoPoint& p2,
                       const std::optional<PairTrig>& trig) const;

  ModelSpec spec_;
  std::vector<GeoPoint> points_;
  std::vector<PairCache> pairs_;  // lower triangle, row-major (a >= b)
  // Semi-parametric plug-in state (grid/data must outlive the assembler):
  bool has_moments_ = false;
  const MomentsGrid* grid_ = nullptr;
  const ProfileDataset* data_ = nullptr;
  std::vector<double> sig_T_, sig_S_;  // smoothed sigma at points_
  Eigen::MatrixXd beta_pairs_;         // smoothed beta(s_a, s_b), B2 only

  std::size_t pair_index(std::size_t a, std::size_t b) const {
    if (b > a) std::swap(a, b);
    return a * (a + 1) / 2 + b;
  }
};

}  // namespace argo
