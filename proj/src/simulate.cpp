#include "argo/simulate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "argo/error.hpp"
#include "argo/linalg.hpp"
#include "argo/rng.hpp"

namespace argo {

void Region::validate() const {
  if (!(lat_min <= lat_max) || lat_min < -90.0 || lat_max > 90.0)
    throw config_error("region: need -90 <= lat_min <= lat_max <= 90");
  if (!(lon_min <= lon_max) || lon_min <= -180.0 || lon_max > 180.0)
    throw config_error("region: need -180 < lon_min <= lon_max <= 180");
  validate_point(ref);
}

void SyntheticConfig::validate() const {
  if (n_floats < 1) throw config_error("simulate: n_floats must be >= 1");
  if (depths.empty()) throw config_error("simulate: depth grid is empty");
  for (std::size_t k = 0; k < depths.size(); ++k) {
    if (depths[k] < 0.0 || depths[k] > 2000.0)
      throw config_error("simulate: depths must lie in [0, 2000] dbar");
    if (k > 0 && !(depths[k - 1] < depths[k]))
      throw config_error("simulate: depths must be strictly increasing");
  }
  if (depth_jitter_db < 0.0)
    throw config_error("simulate: depth jitter must be non-negative");
  region.validate();
  if (is_semiparametric(model.id))
    throw config_error(
        "simulate: semi-parametric models have no generative form "
        "(their moment fields come from data)");
  const std::size_t total = n_floats * depths.size();
  if (total > max_total_obs)
    throw config_error("simulate: " + std::to_string(total) +
                       " observations exceed the cap of " +
                       std::to_string(max_total_obs));
}

std::vector<double> stratified_depths(std::size_t mlz, std::size_t pcz,
                                      std::size_t imz) {
  std::vector<double> out;
  out.reserve(mlz + pcz + imz);
  for (std::size_t k = 0; k < mlz; ++k)
    out.push_back(100.0 * static_cast<double>(k) / static_cast<double>(mlz));
  for (std::size_t k = 1; k <= pcz; ++k)
    out.push_back(100.0 +
                  900.0 * static_cast<double>(k) / static_cast<double>(pcz));
  for (std::size_t k = 1; k <= imz; ++k)
    out.push_back(1000.0 +
                  1000.0 * static_cast<double>(k) / static_cast<double>(imz));
  return out;
}

ProfileDataset simulate(const SyntheticConfig& cfg) {
  cfg.validate();

  Rng pos_rng(cfg.seed, 1);
  Rng depth_rng(cfg.seed, 2);
  Rng field_rng(cfg.seed, 3);

  const std::size_t q = cfg.depths.size();
  const std::size_t n = cfg.n_floats * q;
  std::vector<Observation> obs;
  obs.reserve(n);

  int id_width = 1;
  for (std::size_t v = cfg.n_floats; v >= 10; v /= 10) ++id_width;

  for (std::size_t f = 0; f < cfg.n_floats; ++f) {
    const double lat =
        cfg.region.lat_min +
        pos_rng.uniform() * (cfg.region.lat_max - cfg.region.lat_min);
    const double lon =
        cfg.region.lon_min +
        pos_rng.uniform() * (cfg.region.lon_max - cfg.region.lon_min);
    std::string id = std::to_string(f);
    id.insert(0, static_cast<std::size_t>(id_width) - id.size(), '0');
    id.insert(0, "F");
    for (std::size_t k = 0; k < q; ++k) {
      double pres = cfg.depths[k];
      if (cfg.depth_jitter_db > 0.0)
        pres += (2.0 * depth_rng.uniform() - 1.0) * cfg.depth_jitter_db;
      pres = std::clamp(pres, 0.0, 2000.0);
      Observation o;
      o.float_id = id;
      o.point = GeoPoint{lat, lon, pres};
      obs.push_back(std::move(o));
    }
  }

  std::vector<GeoPoint> points;
  points.reserve(n);
  for (const Observation& o : obs) points.push_back(o.point);

  const CovAssembler assembler(cfg.model, points);
  CovMatrix sigma = assembler.assemble(cfg.theta_true);
  if (cfg.model.nugget > 0.0)
    sigma.values.diagonal().array() += cfg.model.nugget;

  const Eigen::Index dim = static_cast<Eigen::Index>(sigma.dim());
  Eigen::VectorXd field = Eigen::VectorXd::Zero(dim);
  const double max_abs = sigma.values.cwiseAbs().maxCoeff();
  if (max_abs > 0.0) {
    Eigen::VectorXd eps(dim);
    for (Eigen::Index k = 0; k < dim; ++k) eps[k] = field_rng.normal();

    Eigen::LLT<Eigen::MatrixXd> llt(sigma.values);
    if (llt.info() == Eigen::Success) {
      field = llt.matrixL() * eps;
    } else {
      // Valid models can produce semi-definite covariances (e.g. two
      // variables driven by one shared latent field with identical
      // operators); sample through the spectral square root instead.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma.values);
      if (es.info() != Eigen::Success)
        throw config_error("simulate: eigendecomposition failed at theta_true");
      const double max_eig = es.eigenvalues().maxCoeff();
      const double floor = -1e-8 * std::max(max_eig, 0.0);
      Eigen::VectorXd root = es.eigenvalues();
      for (Eigen::Index k = 0; k < dim; ++k) {
        if (root[k] < floor)
          throw config_error(
              "simulate: covariance at theta_true is not positive "
              "semi-definite");
        root[k] = std::sqrt(std::max(root[k], 0.0));
      }
      field = es.eigenvectors() * root.asDiagonal() * eps;
    }
  }

  for (std::size_t a = 0; a < n; ++a) {
    obs[a].temp = field[static_cast<Eigen::Index>(a)];
    obs[a].psal = field[static_cast<Eigen::Index>(n + a)];
  }
  return ProfileDataset(std::move(obs));
}

}  // namespace argo
