#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "argo/error.hpp"
#include "argo/fit.hpp"
#include "argo/kernels.hpp"
#include "argo/predict.hpp"
#include "argo/rng.hpp"

using namespace argo;

namespace {

FitResult make_b1_fit(double beta12, double nugget) {
  FitResult fit;
  fit.spec.id = ModelId::B1;
  fit.spec.nugget = nugget;
  fit.theta = fit.spec.default_params();
  fit.theta.set("sig2_T", 1.4);
  fit.theta.set("sig2_S", 0.6);
  fit.theta.set("a_h", 1.0 / 300.0);
  fit.theta.set("a_v", 1.0 / 110.0);
  fit.theta.set("beta12", beta12);
  return fit;
}

ProfileDataset train_fixture() {
  Rng rng(8080);
  std::vector<Observation> obs;
  const double lats[3] = {39.8, 40.6, 41.1};
  const double lons[3] = {-175.8, -174.6, -175.2};
  for (int f = 0; f < 3; ++f)
    for (int k = 0; k < 2; ++k)
      obs.push_back({"F" + std::to_string(f),
                     {lats[f], lons[f], 150.0 + 700.0 * k + 40.0 * f},
                     rng.normal(), 0.5 * rng.normal()});
  return ProfileDataset(std::move(obs));
}

// Joint-covariance entry of the fitted B1 model over explicit slots,
// including the nugget contract: it sits on the (variable, point) diagonal.
double joint_entry(const FitResult& fit, int vi, const GeoPoint& pi, int vj,
                   const GeoPoint& pj) {
  const MaternParams mp = fit.spec.matern_params(fit.theta);
  double v = parsimonious_matern(vi, vj, pi, pj, mp);
  if (vi == vj && pi == pj) v += fit.spec.nugget;
  return v;
}

}  // namespace

TEST_SUITE("predict") {

TEST_CASE("cokrige matches a brute-force conditional Gaussian") {
  const FitResult fit = make_b1_fit(0.55, 1e-3);
  const ProfileDataset train = train_fixture();
  const std::vector<ScalarTarget> targets{{1, {40.2, -175.1, 300.0}},
                                          {2, {40.9, -174.9, 1100.0}},
                                          {1, {39.9, -175.7, 800.0}}};
  const std::vector<ScalarObs> extra{{2, {40.4, -175.4, 500.0}, 0.8},
                                     {1, {41.0, -174.8, 60.0}, -1.1}};

  const CokrigeResult got = cokrige(fit, train, targets, extra);
  REQUIRE(got.mean.size() == 3);
  REQUIRE(got.variance.size() == 3);

  // Oracle: explicit slot list, dense inverse, no shared code path.
  struct Slot {
    int var;
    GeoPoint point;
    double value;
  };
  std::vector<Slot> cond;
  for (const Observation& o : train.observations())
    cond.push_back({1, o.point, o.temp});
  for (const Observation& o : train.observations())
    cond.push_back({2, o.point, o.psal});
  for (const ScalarObs& e : extra) cond.push_back({e.var, e.point, e.value});

  const Eigen::Index nc = static_cast<Eigen::Index>(cond.size());
  Eigen::MatrixXd s11(nc, nc);
  Eigen::VectorXd z(nc);
  for (Eigen::Index r = 0; r < nc; ++r) {
    z[r] = cond[static_cast<std::size_t>(r)].value;
    for (Eigen::Index c = 0; c < nc; ++c)
      s11(r, c) = joint_entry(fit, cond[static_cast<std::size_t>(r)].var,
                              cond[static_cast<std::size_t>(r)].point,
                              cond[static_cast<std::size_t>(c)].var,
                              cond[static_cast<std::size_t>(c)].point);
  }
  const Eigen::MatrixXd s11_inv = s11.inverse();
  for (std::size_t t = 0; t < targets.size(); ++t) {
    Eigen::VectorXd s12(nc);
    for (Eigen::Index r = 0; r < nc; ++r)
      s12[r] = joint_entry(fit, cond[static_cast<std::size_t>(r)].var,
                           cond[static_cast<std::size_t>(r)].point,
                           targets[t].var, targets[t].point);
    const double prior =
        joint_entry(fit, targets[t].var, targets[t].point, targets[t].var,
                    targets[t].point);
    const double mean = s12.dot(s11_inv * z);
    const double var = prior - s12.dot(s11_inv * s12);
    const auto ti = static_cast<Eigen::Index>(t);
    INFO("target ", t);
    CHECK(got.mean[ti] ==
          doctest::Approx(mean).epsilon(1e-8));
    CHECK(got.variance[ti] == doctest::Approx(var).epsilon(1e-8));
  }
}

TEST_CASE("conditioning scalars that duplicate training slots are ignored") {
  const FitResult fit = make_b1_fit(0.55, 1e-3);
  const ProfileDataset train = train_fixture();
  const std::vector<ScalarTarget> targets{{1, {40.2, -175.1, 300.0}}};

  const Observation& o = train.observations()[2];
  // Same (variable, point) as a training row, wildly different value.
  const std::vector<ScalarObs> dup{{2, o.point, 99.0}};

  const CokrigeResult a = cokrige(fit, train, targets);
  const CokrigeResult b = cokrige(fit, train, targets, dup);
  CHECK(a.mean[0] == b.mean[0]);
  CHECK(a.variance[0] == b.variance[0]);
}

TEST_CASE("prediction at a training location reproduces it exactly") {
  const FitResult fit = make_b1_fit(0.55, 1e-3);
  const ProfileDataset train = train_fixture();
  std::vector<ScalarTarget> targets;
  for (const Observation& o : train.observations()) {
    targets.push_back({1, o.point});
    targets.push_back({2, o.point});
  }
  const CokrigeResult res = cokrige(fit, train, targets);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Observation& o = train.observations()[t / 2];
    const double truth = t % 2 == 0 ? o.temp : o.psal;
    const auto ti = static_cast<Eigen::Index>(t);
    INFO("target ", t);
    CHECK(std::abs(res.mean[ti] - truth) <= 1e-8);
    CHECK(res.variance[ti] >= 0.0);
    CHECK(res.variance[ti] <= 1e-8);
  }
}

TEST_CASE("with a zero seed, S data cannot move T predictions") {
  const FitResult fit = make_b1_fit(0.0, 1e-3);
  const ProfileDataset train = train_fixture();
  const std::vector<ScalarTarget> targets{{1, {40.2, -175.1, 300.0}},
                                          {1, {40.9, -174.9, 1100.0}}};
  const std::vector<ScalarObs> s_extras{{2, {40.4, -175.4, 500.0}, 5.0},
                                        {2, {40.1, -175.0, 900.0}, -7.0}};
  const CokrigeResult without = cokrige(fit, train, targets);
  const CokrigeResult with = cokrige(fit, train, targets, s_extras);
  for (Eigen::Index t = 0; t < 2; ++t) {
    // The cross block is exactly zero, but the triangular solves partition
    // differently for a 24x24 vs 26x26 system, so the same sums round in a
    // different order; agreement is to round-off, not bitwise.
    CHECK(std::abs(without.mean[t] - with.mean[t]) <= 1e-12);
    CHECK(std::abs(without.variance[t] - with.variance[t]) <= 1e-12);
  }
}

TEST_CASE("target order does not change the values") {
  const FitResult fit = make_b1_fit(0.55, 1e-3);
  const ProfileDataset train = train_fixture();
  const std::vector<ScalarTarget> fwd{{1, {40.2, -175.1, 300.0}},
                                      {2, {40.9, -174.9, 1100.0}},
                                      {1, {39.9, -175.7, 800.0}}};
  const std::vector<ScalarTarget> rev{fwd[2], fwd[1], fwd[0]};
  const CokrigeResult a = cokrige(fit, train, fwd);
  const CokrigeResult b = cokrige(fit, train, rev);
  for (Eigen::Index t = 0; t < 3; ++t) {
    CHECK(a.mean[t] == b.mean[2 - t]);
    CHECK(a.variance[t] == b.variance[2 - t]);
  }
}

TEST_CASE("conditional variance never exceeds the prior variance") {
  const FitResult fit = make_b1_fit(0.55, 1e-3);
  const ProfileDataset train = train_fixture();
  Rng rng(606);
  std::vector<ScalarTarget> targets;
  for (int k = 0; k < 12; ++k)
    targets.push_back({1 + static_cast<int>(rng.next_u64() % 2),
                       {39.5 + 2.0 * rng.uniform(), -176.0 + 2.0 * rng.uniform(),
                        2000.0 * rng.uniform()}});
  const CokrigeResult res = cokrige(fit, train, targets);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double prior =
        joint_entry(fit, targets[t].var, targets[t].point, targets[t].var,
                    targets[t].point);
    const auto ti = static_cast<Eigen::Index>(t);
    CHECK(res.variance[ti] >= 0.0);
    CHECK(res.variance[ti] <= prior * (1.0 + 1e-12));
  }
}

TEST_CASE("cokrige input validation") {
  const FitResult fit = make_b1_fit(0.5, 0.0);
  const ProfileDataset train = train_fixture();
  const std::vector<ScalarTarget> targets{{1, {40.0, -175.0, 100.0}}};
  CHECK_THROWS_AS(cokrige(fit, ProfileDataset(), targets), insufficient_data);
  CHECK_THROWS_AS(cokrige(fit, train, {}), std::invalid_argument);
  CHECK_THROWS_AS(cokrige(fit, train, {{3, {40.0, -175.0, 100.0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      cokrige(fit, train, targets,
              {{2, {40.0, -175.0, 100.0}, std::nan("")}}),
      data_error);
}

TEST_CASE("nearest_float") {
  const ProfileDataset data({
      {"A07", {40.0, -175.0, 300.0}, 1.0, 0.1},  // deeper row first in file
      {"A07", {40.0, -175.0, 50.0}, 1.0, 0.1},   // shallowest: the anchor
      {"B02", {42.0, -175.0, 10.0}, 1.0, 0.1},
      {"C01", {40.5, -175.0, 10.0}, 1.0, 0.1},
  });
  SUBCASE("distance uses the shallowest observation of each float") {
    const auto [id, km] = nearest_float(data, {40.0, -175.0, 2000.0});
    CHECK(id == "A07");
    CHECK(km == 0.0);  // shallowest point matches the reference exactly
    const auto [id2, km2] = nearest_float(data, {41.9, -175.0, 0.0});
    CHECK(id2 == "B02");
    CHECK(km2 ==
          doctest::Approx(chordal_distance({41.9, -175.0, 0.0},
                                           {42.0, -175.0, 10.0}))
              .epsilon(1e-14));
  }
  SUBCASE("exact ties break to the smallest float id") {
    const ProfileDataset tied({
        {"Z9", {40.0, -175.0, 10.0}, 1.0, 0.1},
        {"A1", {40.0, -175.0, 20.0}, 1.0, 0.1},  // same shallow lat/lon
    });
    // Both floats' shallowest points are at the same lat/lon, hence the same
    // chordal distance bit pattern.
    const auto [id, km] = nearest_float(tied, {41.0, -175.0, 0.0});
    CHECK(id == "A1");
    CHECK(km > 0.0);
  }
  SUBCASE("failure modes") {
    CHECK_THROWS_AS(nearest_float(ProfileDataset(), {40.0, -175.0, 0.0}),
                    insufficient_data);
    CHECK_THROWS_AS(nearest_float(data, {95.0, 0.0, 0.0}), out_of_domain);
  }
}

TEST_CASE("leave_one_float_out without refitting") {
  // F0 and F1 sit at identical positions with identical values, so holding
  // out F0 leaves perfect predictors in the training set.
  std::vector<Observation> obs;
  const double depths[3] = {100.0, 600.0, 1500.0};
  Rng rng(121);
  for (int k = 0; k < 3; ++k) {
    const double t = rng.normal(), s = 0.4 * rng.normal();
    obs.push_back({"F0", {40.0, -175.0, depths[k]}, t, s});
    obs.push_back({"F1", {40.0, -175.0, depths[k]}, t, s});
  }
  for (int k = 0; k < 3; ++k)
    obs.push_back({"F2", {41.5, -174.0, depths[k]}, rng.normal(), 0.1});
  const ProfileDataset data(std::move(obs));

  std::map<ModelId, FitResult> fits;
  fits[ModelId::B1] = make_b1_fit(0.55, 1e-3);
  fits[ModelId::B1].loglik = -123.25;
  fits[ModelId::B1].aic = 456.5;
  fits[ModelId::B1].jitter_used = 0.125;

  const FitConfig cfg;
  const auto reports = leave_one_float_out(fits, data, {40.0, -175.0, 0.0},
                                           cfg, /*refit=*/false);
  REQUIRE(reports.size() == 1);
  const PredictionReport& pr = reports.at(ModelId::B1);
  CHECK(pr.target_float == "F0");  // tie with F1 breaks to the smaller id
  CHECK(pr.distance_km == 0.0);    // F1 remains at the same position
  CHECK(pr.loglik == -123.25);     // no refit: fit metadata passes through
  CHECK(pr.aic == 456.5);
  CHECK(pr.jitter_used == 0.125);
  REQUIRE(pr.rows_T.size() == 3);
  REQUIRE(pr.rows_S.size() == 3);
  for (int k = 0; k < 3; ++k)
    CHECK(pr.rows_T[static_cast<std::size_t>(k)].pres == depths[k]);
  CHECK(pr.mse_T <= 1e-10);
  CHECK(pr.mse_S <= 1e-10);

  SUBCASE("failure modes") {
    const ProfileDataset one_float(
        {{"F0", {40.0, -175.0, 100.0}, 1.0, 0.1}});
    CHECK_THROWS_AS(leave_one_float_out(fits, one_float,
                                        {40.0, -175.0, 0.0}, cfg, false),
                    insufficient_data);
    CHECK_THROWS_AS(leave_one_float_out({}, data, {40.0, -175.0, 0.0}, cfg,
                                        false),
                    config_error);
  }
}

TEST_CASE("compare_models flags the best columns") {
  std::map<ModelId, FitResult> fits;
  const auto put = [&fits](ModelId id, double ll, double aic, double jit) {
    FitResult f;
    f.spec.id = id;
    f.loglik = ll;
    f.aic = aic;
    f.jitter_used = jit;
    fits[id] = f;
  };
  put(ModelId::I1, -100.0, 208.0, 0.0);
  put(ModelId::B1, -90.0, 190.0, 1e-9);
  put(ModelId::B4, -85.0, 204.0, 0.0);

  std::map<ModelId, PredictionReport> reports;
  PredictionReport r1;
  r1.mse_T = 0.5;
  r1.mse_S = 0.02;
  reports[ModelId::I1] = r1;
  PredictionReport r2;
  r2.mse_T = 0.4;
  r2.mse_S = 0.02;  // exact tie on mse_S
  reports[ModelId::B1] = r2;
  // No report for B4: its MSE columns must be NaN and out of the race.

  const std::vector<ComparisonRow> rows = compare_models(fits, reports);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].model == ModelId::I1);
  CHECK(rows[1].model == ModelId::B1);
  CHECK(rows[2].model == ModelId::B4);

  CHECK(!rows[0].best_loglik);
  CHECK(!rows[1].best_loglik);
  CHECK(rows[2].best_loglik);
  CHECK(rows[1].best_aic);
  CHECK(!rows[2].best_aic);

  CHECK(std::isnan(rows[2].mse_T));
  CHECK(!rows[2].best_mse_T);
  CHECK(rows[1].best_mse_T);
  CHECK(!rows[0].best_mse_T);
  // Exact ties are all flagged.
  CHECK(rows[0].best_mse_S);
  CHECK(rows[1].best_mse_S);

  // Spline breakpoints render pipe-separated for the operator models only.
  CHECK(rows[0].knots_T.empty());
  CHECK(rows[2].knots_T == "0|100|1000|2000");
  CHECK(rows[2].knots_S == "0|100|1000|2000");

  SUBCASE("reports-only overload pulls metadata from the reports") {
    PredictionReport rr;
    rr.spec.id = ModelId::B4;
    rr.loglik = -80.0;
    rr.aic = 194.0;
    rr.mse_T = 0.3;
    rr.mse_S = 0.01;
    std::map<ModelId, PredictionReport> only{{ModelId::B4, rr},
                                             {ModelId::I1, r1}};
    only[ModelId::I1].loglik = -101.0;
    only[ModelId::I1].aic = 210.0;
    const std::vector<ComparisonRow> rows2 = compare_models(only);
    REQUIRE(rows2.size() == 2);
    CHECK(rows2[1].model == ModelId::B4);
    CHECK(rows2[1].best_loglik);
    CHECK(rows2[1].best_aic);
    CHECK(rows2[1].best_mse_T);
    CHECK(rows2[0].loglik == -101.0);
  }
  SUBCASE("empty inputs throw") {
    CHECK_THROWS_AS(compare_models({}, reports), config_error);
    CHECK_THROWS_AS(
        compare_models(std::map<ModelId, PredictionReport>{}),
        config_error);
  }
}

TEST_CASE("predictions vary continuously in the correlation seed") {
  const ProfileDataset train = train_fixture();
  const std::vector<ScalarTarget> targets{{1, {40.2, -175.1, 300.0}},
                                          {1, {40.9, -174.9, 1100.0}}};
  const std::vector<ScalarObs> s_extras{{2, {40.4, -175.4, 500.0}, 5.0}};

  const auto t_preds = [&](double beta) {
    return cokrige(make_b1_fit(beta, 1e-3), train, targets, s_extras).mean;
  };
  const Eigen::VectorXd at0 = t_preds(0.0);
  const auto gap = [&](double beta) {
    return (t_preds(beta) - at0).cwiseAbs().maxCoeff();
  };
  const double g1 = gap(0.1), g2 = gap(0.01), g3 = gap(0.001);
  CHECK(g1 > 0.0);
  CHECK(g2 < 0.3 * g1);
  CHECK(g3 < 0.3 * g2);
}

}  // TEST_SUITE
