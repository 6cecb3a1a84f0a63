#include "argo/predict.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <tuple>

#include "argo/error.hpp"
#include "argo/linalg.hpp"

namespace argo {

namespace {

// Deduplicating point registry; slot (var, point) -> row in the assembled
// 2U x 2U covariance.
struct UnionIndex {
  std::vector<GeoPoint> points;
  std::map<std::tuple<double, double, double>, std::size_t> lookup;

  std::size_t index_of(const GeoPoint& p) {
    const auto key = std::make_tuple(p.lat, p.lon, p.pres);
    const auto it = lookup.find(key);
    if (it != lookup.end()) return it->second;
    lookup.emplace(key, points.size());
    points.push_back(p);
    return points.size() - 1;
  }
};

void validate_var(int var) {
  if (var != 1 && var != 2)
    throw std::invalid_argument("variable index must be 1 (T) or 2 (S)");
}

// Cholesky with the shared jitter ladder.  Returns false when even the
// largest jitter fails.
bool factor_with_ladder(const Eigen::MatrixXd& S,
                        Eigen::LLT<Eigen::MatrixXd>* llt, double* jitter) {
  const double diag_mean = S.diagonal().mean();
  const double scale = diag_mean > 0.0 ? diag_mean : 1.0;
  for (const double lvl : {0.0, 1e-10, 1e-8, 1e-6}) {
    Eigen::MatrixXd J = S;
    if (lvl > 0.0) J.diagonal().array() += lvl * scale;
    llt->compute(J);
    if (llt->info() == Eigen::Success) {
      *jitter = lvl * scale;
      return true;
    }
  }
  return false;
}

std::string format_knots(const SplineSpec& spline) {
  std::string out;
  for (std::size_t k = 0; k < spline.knots.size(); ++k) {
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), spline.knots[k]);
    if (!out.empty()) out.push_back('|');
    out.append(buf, res.ptr);
  }
  return out;
}

}  // namespace

CokrigeResult cokrige(const FitResult& fit, const ProfileDataset& train,
                      const std::vector<ScalarTarget>& targets,
                      const std::vector<ScalarObs>& extra) {
  if (train.empty()) throw insufficient_data("cokrige: empty training set");
  if (targets.empty())
    throw std::invalid_argument("cokrige: no prediction targets");
  for (const ScalarTarget& t : targets) {
    validate_var(t.var);
    validate_point(t.point);
  }
  for (const ScalarObs& e : extra) {
    validate_var(e.var);
    validate_point(e.point);
    if (!std::isfinite(e.value))
      throw data_error("cokrige: non-finite conditioning value");
  }

  UnionIndex ui;
  const auto& obs = train.observations();
  std::vector<std::size_t> train_pt(obs.size());
  for (std::size_t a = 0; a < obs.size(); ++a)
    train_pt[a] = ui.index_of(obs[a].point);
  std::vector<std::size_t> extra_pt(extra.size());
  for (std::size_t e = 0; e < extra.size(); ++e)
    extra_pt[e] = ui.index_of(extra[e].point);
  std::vector<std::size_t> target_pt(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t)
    target_pt[t] = ui.index_of(targets[t].point);
  const std::size_t U = ui.points.size();
  const auto slot = [U](int var, std::size_t pt) {
    return static_cast<Eigen::Index>((static_cast<std::size_t>(var) - 1) * U +
                                     pt);
  };

  // Conditioning slots: all training T, all training S, then extras that do
  // not duplicate an existing conditioning slot.
  std::vector<Eigen::Index> cond;
  std::vector<double> cond_values;
  std::set<Eigen::Index> seen;
  for (std::size_t a = 0; a < obs.size(); ++a) {
    cond.push_back(slot(1, train_pt[a]));
    cond_values.push_back(obs[a].temp);
    seen.insert(cond.back());
  }
  for (std::size_t a = 0; a < obs.size(); ++a) {
    cond.push_back(slot(2, train_pt[a]));
    cond_values.push_back(obs[a].psal);
    seen.insert(cond.back());
  }
  for (std::size_t e = 0; e < extra.size(); ++e) {
    const Eigen::Index s = slot(extra[e].var, extra_pt[e]);
    if (!seen.insert(s).second) continue;
    cond.push_back(s);
    cond_values.push_back(extra[e].value);
  }

  CovAssembler assembler(fit.spec, ui.points);
  std::optional<MomentsGrid> grid;
  if (is_semiparametric(fit.spec.id)) {
    grid.emplace(train, fit.spec.moment_bw);
    assembler.attach_moments(*grid, train);
  }
  CovMatrix full = assembler.assemble(fit.theta);
  if (fit.spec.nugget > 0.0)
    full.values.diagonal().array() += fit.spec.nugget;

  const Eigen::Index nc = static_cast<Eigen::Index>(cond.size());
  const Eigen::Index nt = static_cast<Eigen::Index>(targets.size());
  Eigen::MatrixXd S11(nc, nc), S12(nc, nt);
  Eigen::VectorXd z(nc), S22d(nt);
  for (Eigen::Index r = 0; r < nc; ++r) {
    z[r] = cond_values[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < nc; ++c)
      S11(r, c) = full.values(cond[static_cast<std::size_t>(r)],
                              cond[static_cast<std::size_t>(c)]);
  }
  for (Eigen::Index t = 0; t < nt; ++t) {
    const Eigen::Index ts =
        slot(targets[static_cast<std::size_t>(t)].var,
             target_pt[static_cast<std::size_t>(t)]);
    S22d[t] = full.values(ts, ts);
    for (Eigen::Index r = 0; r < nc; ++r)
      S12(r, t) = full.values(cond[static_cast<std::size_t>(r)], ts);
  }

  CokrigeResult out;
  Eigen::LLT<Eigen::MatrixXd> llt;
  if (!factor_with_ladder(S11, &llt, &out.jitter_used)) {
    if (!is_semiparametric(fit.spec.id))
      throw not_positive_definite(
          "cokrige: conditioning covariance is not positive definite");
    // Repair the joint covariance so the conditional stays consistent.
    CovMatrix sub;
    sub.n_obs = 0;
    sub.values = S11;
    const CovMatrix repaired = nearest_pd_fix(sub);
    out.pd_fix_applied = true;
    if (!factor_with_ladder(repaired.values, &llt, &out.jitter_used))
      throw not_positive_definite(
          "cokrige: conditioning covariance is not positive definite even "
          "after eigenvalue repair");
  }

  const Eigen::VectorXd w = llt.solve(z);
  const Eigen::MatrixXd W = llt.solve(S12);
  out.mean = S12.transpose() * w;
  out.variance.resize(nt);
  for (Eigen::Index t = 0; t < nt; ++t) {
    double v = S22d[t] - S12.col(t).dot(W.col(t));
    if (v < 0.0 && v > -1e-8) v = 0.0;  // factorization round-off
    out.variance[t] = v;
  }
  return out;
}

std::pair<std::string, double> nearest_float(const ProfileDataset& data,
                                             const GeoPoint& ref) {
  validate_point(ref);
  if (data.n_floats() == 0)
    throw insufficient_data("nearest_float: dataset has no floats");
  std::string best_id;
  double best_km = std::numeric_limits<double>::infinity();
  for (const auto& [id, range] : data.float_index()) {
    // Canonical order sorts each float by pressure: front() is shallowest.
    const GeoPoint& p = data.observations()[range.begin].point;
    const double km = chordal_distance(ref, p);
    if (km < best_km) {
      best_km = km;
      best_id = id;
    }
  }
  return {best_id, best_km};
}

std::map<ModelId, PredictionReport> leave_one_float_out(
    const std::map<ModelId, FitResult>& fits, const ProfileDataset& data,
    const GeoPoint& ref, const FitConfig& cfg, bool refit) {
  if (data.n_floats() < 2)
    throw insufficient_data(
        "leave-one-float-out needs at least 2 floats, got " +
        std::to_string(data.n_floats()));
  if (fits.empty()) throw config_error("leave_one_float_out: no fitted models");

  const auto [held_id, ref_km] = nearest_float(data, ref);
  (void)ref_km;
  const ProfileDataset train = data.without_float(held_id);
  const std::vector<Observation> held = data.float_obs(held_id);
  const double dist_km = nearest_float(train, held.front().point).second;

  // Targets and cross-variable conditioning from the held-out float.
  std::vector<ScalarTarget> tgt_T, tgt_S;
  std::vector<ScalarObs> held_T, held_S;
  for (const Observation& o : held) {
    tgt_T.push_back({1, o.point});
    tgt_S.push_back({2, o.point});
    held_T.push_back({1, o.point, o.temp});
    held_S.push_back({2, o.point, o.psal});
  }

  std::map<ModelId, PredictionReport> out;
  for (const auto& [id, full_fit] : fits) {
    FitResult fit = full_fit;
    if (refit) fit = mle(full_fit.spec, full_fit.theta, train, cfg);

    const CokrigeResult rT = cokrige(fit, train, tgt_T, held_S);
    const CokrigeResult rS = cokrige(fit, train, tgt_S, held_T);

    PredictionReport pr;
    pr.target_float = held_id;
    pr.spec = fit.spec;
    pr.distance_km = dist_km;
    pr.loglik = fit.loglik;
    pr.aic = fit.aic;
    pr.jitter_used = fit.jitter_used;
    double sse_T = 0.0, sse_S = 0.0;
    for (std::size_t k = 0; k < held.size(); ++k) {
      const auto ki = static_cast<Eigen::Index>(k);
      pr.rows_T.push_back(
          {held[k].point.pres, held[k].temp, rT.mean[ki], rT.variance[ki]});
      pr.rows_S.push_back(
          {held[k].point.pres, held[k].psal, rS.mean[ki], rS.variance[ki]});
      sse_T += (rT.mean[ki] - held[k].temp) * (rT.mean[ki] - held[k].temp);
      sse_S += (rS.mean[ki] - held[k].psal) * (rS.mean[ki] - held[k].psal);
    }
    pr.mse_T = sse_T / static_cast<double>(held.size());
    pr.mse_S = sse_S / static_cast<double>(held.size());
    out[id] = std::move(pr);
  }
  return out;
}

namespace {

void apply_best_flags(std::vector<ComparisonRow>* rows) {
  const auto flag_best = [rows](auto value_of, auto is_better, auto flag_of) {
    std::size_t best = rows->size();
    for (std::size_t k = 0; k < rows->size(); ++k) {
      const double v = value_of((*rows)[k]);
      if (!std::isfinite(v)) continue;
      if (best == rows->size() || is_better(v, value_of((*rows)[best])))
        best = k;
    }
    if (best == rows->size()) return;
    const double bv = value_of((*rows)[best]);
    for (ComparisonRow& r : *rows)
      if (value_of(r) == bv) flag_of(r) = true;
  };
  const auto less = [](double a, double b) { return a < b; };
  const auto greater = [](double a, double b) { return a > b; };
  flag_best([](const ComparisonRow& r) { return r.loglik; }, greater,
            [](ComparisonRow& r) -> bool& { return r.best_loglik; });
  flag_best([](const ComparisonRow& r) { return r.aic; }, less,
            [](ComparisonRow& r) -> bool& { return r.best_aic; });
  flag_best([](const ComparisonRow& r) { return r.mse_T; }, less,
            [](ComparisonRow& r) -> bool& { return r.best_mse_T; });
  flag_best([](const ComparisonRow& r) { return r.mse_S; }, less,
            [](ComparisonRow& r) -> bool& { return r.best_mse_S; });
}

}  // namespace

std::vector<ComparisonRow> compare_models(
    const std::map<ModelId, FitResult>& fits,
    const std::map<ModelId, PredictionReport>& reports) {
  if (fits.empty()) throw config_error("compare_models: no fits");
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<ComparisonRow> rows;
  for (const auto& [id, fit] : fits) {
    ComparisonRow row;
    row.model = id;
    row.loglik = fit.loglik;
    row.aic = fit.aic;
    row.jitter = fit.jitter_used;
    if (is_diffop(id)) {
      row.knots_T = format_knots(fit.spec.spline_T);
      row.knots_S = format_knots(fit.spec.spline_S);
    }
    const auto it = reports.find(id);
    row.mse_T = it != reports.end() ? it->second.mse_T : nan;
    row.mse_S = it != reports.end() ? it->second.mse_S : nan;
    rows.push_back(std::move(row));
  }
  apply_best_flags(&rows);
  return rows;
}

std::vector<ComparisonRow> compare_models(
    const std::map<ModelId, PredictionReport>& reports) {
  if (reports.empty()) throw config_error("compare_models: no reports");
  std::vector<ComparisonRow> rows;
  for (const auto& [id, rep] : reports) {
    ComparisonRow row;
    row.model = id;
    row.loglik = rep.loglik;
    row.aic = rep.aic;
    row.jitter = rep.jitter_used;
    if (is_diffop(id)) {
      row.knots_T = format_knots(rep.spec.spline_T);
      row.knots_S = format_knots(rep.spec.spline_S);
    }
    row.mse_T = rep.mse_T;
    row.mse_S = rep.mse_S;
    rows.push_back(std::move(row));
  }
  apply_best_flags(&rows);
  return rows;
}

}  // namespace argo
