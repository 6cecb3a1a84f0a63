#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "argo/geometry.hpp"

namespace argo {

// Dense symmetric bivariate covariance matrix over n points.  Ordering
// contract for the whole artifact: variable-major blocks — rows/cols
// 0..n-1 are variable 1 (T) at points 0..n-1, rows/cols n..2n-1 are
// variable 2 (S) at the same points.
struct CovMatrix {
  std::size_t n_obs = 0;  // number of points (dimension is 2 * n_obs)
  Eigen::MatrixXd values;

  std::size_t dim() const { return 2 * n_obs; }
};

// Entry evaluator: C_ij(points[a], points[b]) for variables i, j in {1, 2}.
using CrossCovFn =
    std::function<double(int i, int j, std::size_t a, std::size_t b)>;

// Assembles the 2n x 2n matrix from an entry evaluator.  Only the lower
// triangle is evaluated and mirrored, so symmetry holds exactly.  Evaluation
// is tiled; results are bitwise independent of the tile size.
CovMatrix assemble_cov(const CrossCovFn& entry, std::size_t n_points,
                       std::size_t tile = 256);

// Rectangular cross-covariance block between a target set (rows, variable
// per row supplied by `row_var`/`row_pt`) and the training set layout above.
Eigen::MatrixXd assemble_cross(const CrossCovFn& entry,
                               const std::vector<int>& row_var,
                               const std::vector<std::size_t>& row_pt,
                               std::size_t n_train_points);

struct LoglikResult {
  double loglik = 0.0;
  double logdet = 0.0;
  double quadform = 0.0;
  double jitter_used = 0.0;  // absolute jitter added to the diagonal
};

// Gaussian log-likelihood pieces via Cholesky.  If the factorization fails,
// retries with diagonal jitter 1e-10, 1e-8, 1e-6 times the mean diagonal and
// records the level used.  Throws not_positive_definite past the ladder.
LoglikResult chol_loglik(const CovMatrix& sigma, const Eigen::VectorXd& z,
                         double extra_nugget = 0.0);

// Replaces eigenvalues below `floor` with `floor` (symmetric eigenvalue
// clipping).  Default floor mirrors the standard tiny-positive repair value.
CovMatrix nearest_pd_fix(const CovMatrix& sigma, double floor = 1e-17);

}  // namespace argo
