#include "argo/linalg.hpp"

#include <cmath>
#include <string>

#include "argo/error.hpp"

namespace argo {

CovMatrix assemble_cov(const CrossCovFn& entry, std::size_t n_points,
                       std::size_t tile) {
  if (n_points == 0)
    throw std::invalid_argument("assemble_cov: empty point set");
  if (tile == 0) throw std::invalid_argument("assemble_cov: zero tile size");
  const std::size_t dim = 2 * n_points;
  CovMatrix out;
  out.n_obs = n_points;
  out.values.resize(static_cast<Eigen::Index>(dim),
                    static_cast<Eigen::Index>(dim));
  // Row r encodes (variable 1 + r/n, point r%n).  Lower triangle only; each
  // entry is a pure function of its indices, so tiling cannot change values.
  for (std::size_t rb = 0; rb < dim; rb += tile) {
    const std::size_t rend = std::min(rb + tile, dim);
    for (std::size_t cb = 0; cb <= rb; cb += tile) {
      const std::size_t cend = std::min(cb + tile, dim);
      for (std::size_t r = rb; r < rend; ++r) {
        const int vi = r < n_points ? 1 : 2;
        const std::size_t pa = r < n_points ? r : r - n_points;
        const std::size_t cmax = std::min(cend, r + 1);
        for (std::size_t c = cb; c < cmax; ++c) {
          const int vj = c < n_points ? 1 : 2;
          const std::size_t pb = c < n_points ? c : c - n_points;
          const double v = entry(vi, vj, pa, pb);
          out.values(static_cast<Eigen::Index>(r),
                     static_cast<Eigen::Index>(c)) = v;
          out.values(static_cast<Eigen::Index>(c),
                     static_cast<Eigen::Index>(r)) = v;
        }
      }
    }
  }
  return out;
}

Eigen::MatrixXd assemble_cross(const CrossCovFn& entry,
                               const std::vector<int>& row_var,
                               const std::vector<std::size_t>& row_pt,
                               std::size_t n_train_points) {
  if (row_var.size() != row_pt.size())
    throw std::invalid_argument("assemble_cross: row spec length mismatch");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(row_var.size()),
                      static_cast<Eigen::Index>(2 * n_train_points));
  for (std::size_t r = 0; r < row_var.size(); ++r) {
    for (std::size_t c = 0; c < 2 * n_train_points; ++c) {
      const int vj = c < n_train_points ? 1 : 2;
      const std::size_t pb = c < n_train_points ? c : c - n_train_points;
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          entry(row_var[r], vj, row_pt[r], pb);
    }
  }
  return out;
}

LoglikResult chol_loglik(const CovMatrix& sigma, const Eigen::VectorXd& z,
                         double extra_nugget) {
  const Eigen::Index dim = sigma.values.rows();
  if (z.size() != dim)
    throw std::invalid_argument("chol_loglik: dimension mismatch: z has " +
                                std::to_string(z.size()) + ", Sigma " +
                                std::to_string(dim));
  if (extra_nugget < 0.0)
    throw std::invalid_argument("chol_loglik: nugget must be >= 0");
  const double mean_diag = sigma.values.diagonal().mean();
  const double ladder[4] = {0.0, 1e-10, 1e-8, 1e-6};
  for (double level : ladder) {
    const double jitter = extra_nugget + level * mean_diag;
    Eigen::MatrixXd work = sigma.values;
    if (jitter != 0.0)
      work.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() != Eigen::Success) continue;
    const Eigen::MatrixXd& L = llt.matrixLLT();
    double logdet = 0.0;
    bool bad = false;
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double d = L(k, k);
      if (!(d > 0.0) || !std::isfinite(d)) {
        bad = true;
        break;
      }
      logdet += 2.0 * std::log(d);
    }
    if (bad) continue;
    const Eigen::VectorXd y =
        llt.matrixL().solve(z);  // L y = z  =>  quadform = |y|^2
    LoglikResult res;
    res.logdet = logdet;
    res.quadform = y.squaredNorm();
    res.loglik = -0.5 * static_cast<double>(dim) * std::log(2.0 * kPi) -
                 0.5 * res.logdet - 0.5 * res.quadform;
    res.jitter_used = jitter;
    return res;
  }
  throw not_positive_definite(
      "chol_loglik: factorization failed at maximum jitter");
}

CovMatrix nearest_pd_fix(const CovMatrix& sigma, double floor) {
  if (!(floor > 0.0))
    throw std::invalid_argument("nearest_pd_fix: floor must be > 0");
  const Eigen::MatrixXd& A = sigma.values;
  if (A.rows() != A.cols())
    throw std::invalid_argument("nearest_pd_fix: matrix not square");
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if (asym > 1e-10 * scale)
    throw std::invalid_argument("nearest_pd_fix: input not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  if (eig.info() != Eigen::Success)
    throw numerical_error("nearest_pd_fix: eigen-decomposition failed");
  Eigen::VectorXd vals = eig.eigenvalues();
  for (Eigen::Index k = 0; k < vals.size(); ++k)
    vals[k] = std::max(vals[k], floor);
  CovMatrix out;
  out.n_obs = sigma.n_obs;
  out.values = eig.eigenvectors() * vals.asDiagonal() *
               eig.eigenvectors().transpose();
  // Exact symmetry can be lost to rounding in the triple product.
  out.values = 0.5 * (out.values + out.values.transpose()).eval();
  return out;
}

}  // namespace argo
