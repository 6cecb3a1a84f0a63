#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "argo/error.hpp"
#include "argo/models.hpp"
#include "argo/rng.hpp"
#include "argo/splines.hpp"

using namespace argo;

namespace {

const std::vector<GeoPoint> kPoints{
    {40.0, -175.0, 80.0},
    {40.8, -174.2, 310.0},
    {39.6, -175.7, 1000.0},
    {41.2, -173.8, 1640.0},
};

ModelSpec spec_of(ModelId id) {
  ModelSpec s;
  s.id = id;
  return s;
}

// Parameter values away from the defaults so mapping bugs cannot hide.
ParamVector tuned_params(const ModelSpec& spec) {
  ParamVector th = spec.default_params();
  if (th.has("sig2_T")) th.set("sig2_T", 1.3);
  if (th.has("sig2_S")) th.set("sig2_S", 0.55);
  if (th.has("a_h")) th.set("a_h", 1.0 / 260.0);
  if (th.has("a_v")) th.set("a_v", 1.0 / 85.0);
  if (th.has("beta12")) th.set("beta12", 0.6);
  if (th.has("a_T")) {
    const double cw_T[6] = {25, 70, 105, 60, 35, 15};
    const double cw_S[6] = {18, 55, 88, 52, 28, 12};
    th.set("a_T", 0.031);
    th.set("b_T", -0.022);
    th.set("a_S", 0.027);
    th.set("b_S", 0.019);
    for (int k = 0; k < 6; ++k) {
      th.set("cw_T_" + std::to_string(k), cw_T[k]);
      th.set("cw_S_" + std::to_string(k), cw_S[k]);
    }
  }
  return th;
}

ProfileDataset moments_fixture(bool alternating_zero) {
  Rng rng(20250601);
  std::vector<Observation> obs;
  for (int t = 0; t < 40; ++t) {
    double temp = rng.normal();
    double psal = 0.4 * rng.normal();
    if (alternating_zero) {
      if (t % 2 == 0)
        psal = 0.0;
      else
        temp = 0.0;
    }
    obs.push_back({"F" + std::to_string(t % 5),
                   {39.0 + 3.0 * rng.uniform(), -177.0 + 4.0 * rng.uniform(),
                    2000.0 * rng.uniform()},
                   temp, psal});
  }
  return ProfileDataset(std::move(obs));
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("model names round-trip") {
  for (const ModelId id : {ModelId::I1, ModelId::I2, ModelId::I3, ModelId::B1,
                           ModelId::B2, ModelId::B3, ModelId::B4})
    CHECK(model_from_string(to_string(id)) == id);
  CHECK_THROWS_AS(model_from_string("Z9"), config_error);
  CHECK(is_bivariate(ModelId::B2));
  CHECK(!is_bivariate(ModelId::I3));
  CHECK(is_semiparametric(ModelId::I2));
  CHECK(is_diffop(ModelId::B3));
  CHECK(!is_diffop(ModelId::B1));
}

TEST_CASE("free parameter counts") {
  CHECK(spec_of(ModelId::I1).param_count() == 4);
  CHECK(spec_of(ModelId::I2).param_count() == 2);
  CHECK(spec_of(ModelId::I3).param_count() == 16);
  CHECK(spec_of(ModelId::B1).param_count() == 5);
  CHECK(spec_of(ModelId::B2).param_count() == 2);
  CHECK(spec_of(ModelId::B3).param_count() == 16);
  CHECK(spec_of(ModelId::B4).param_count() == 17);

  ModelSpec refined = spec_of(ModelId::I3);
  refined.spline_T = refine_knots(refined.spline_T);
  refined.spline_S = refine_knots(refined.spline_S);
  // 7 breakpoints -> 9 cubic basis functions -> 2 + 9 weights per variable.
  CHECK(refined.param_count() == 22);

  for (const ModelId id : {ModelId::I1, ModelId::I2, ModelId::I3, ModelId::B1,
                           ModelId::B2, ModelId::B3, ModelId::B4}) {
    const ModelSpec s = spec_of(id);
    CHECK(s.default_params().free_count() == s.param_count());
  }
}

TEST_CASE("default parameter names") {
  const ParamVector i1 = spec_of(ModelId::I1).default_params();
  for (const char* n : {"sig2_T", "sig2_S", "a_h", "a_v"}) CHECK(i1.has(n));
  CHECK(!i1.has("beta12"));
  CHECK(spec_of(ModelId::B1).default_params().has("beta12"));

  const ParamVector i2 = spec_of(ModelId::I2).default_params();
  CHECK(i2.size() == 2);
  CHECK(i2.has("a_h"));
  CHECK(i2.has("a_v"));

  const ParamVector i3 = spec_of(ModelId::I3).default_params();
  for (const char* n : {"a_T", "b_T", "a_S", "b_S", "cw_T_0", "cw_T_5",
                        "cw_S_0", "cw_S_5"})
    CHECK(i3.has(n));
  CHECK(!i3.has("beta12"));
  CHECK(spec_of(ModelId::B4).default_params().has("beta12"));
}

TEST_CASE("parameter vector mechanics") {
  SUBCASE("duplicate names are rejected") {
    CHECK_THROWS_AS(ParamVector({{"x", 1.0, Transform::kIdentity, false},
                                 {"x", 2.0, Transform::kIdentity, false}}),
                    config_error);
  }
  SUBCASE("unknown names are rejected") {
    ParamVector th({{"x", 1.0, Transform::kIdentity, false}});
    CHECK_THROWS_AS(th.get("y"), config_error);
    CHECK_THROWS_AS(th.set("y", 0.0), config_error);
    CHECK(!th.has("y"));
  }
  SUBCASE("fixed parameters are excluded from packing") {
    ParamVector th({{"free1", 0.37, Transform::kLog, false},
                    {"pinned", 9.0, Transform::kIdentity, true},
                    {"free2", -0.85, Transform::kTanh, false}});
    CHECK(th.size() == 3);
    CHECK(th.free_count() == 2);
    const std::vector<double> x = th.pack();
    REQUIRE(x.size() == 2);
    CHECK(x[0] == doctest::Approx(std::log(0.37)).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(std::atanh(-0.85)).epsilon(1e-14));
    th.unpack({x[0] + 0.1, x[1] - 0.1});
    CHECK(th.get("pinned") == 9.0);
    th.unpack(x);
    CHECK(th.get("free1") == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(th.get("free2") == doctest::Approx(-0.85).epsilon(1e-12));
    CHECK_THROWS_AS(th.unpack({0.0}), config_error);
    CHECK_THROWS_AS(th.unpack({0.0, 0.0, 0.0}), config_error);
  }
  SUBCASE("transform round trips and domains") {
    for (const double v : {1e-6, 0.37, 12.0})
      CHECK(from_unconstrained(to_unconstrained(v, Transform::kLog),
                               Transform::kLog) ==
            doctest::Approx(v).epsilon(1e-12));
    for (const double v : {-0.999, 0.0, 0.85})
      CHECK(from_unconstrained(to_unconstrained(v, Transform::kTanh),
                               Transform::kTanh) ==
            doctest::Approx(v).epsilon(1e-12));
    CHECK(to_unconstrained(-3.2, Transform::kIdentity) == -3.2);
    CHECK_THROWS_AS(to_unconstrained(-1.0, Transform::kLog), config_error);
    CHECK_THROWS_AS(to_unconstrained(0.0, Transform::kLog), config_error);
    CHECK_THROWS_AS(to_unconstrained(1.0, Transform::kTanh), config_error);
    CHECK(std::abs(from_unconstrained(100.0, Transform::kTanh)) < 1.0);
  }
}

TEST_CASE("matern parameter mapping") {
  ModelSpec s = spec_of(ModelId::B1);
  s.direct_nu = 1.4;
  s.dim_d = 3;
  const ParamVector th = tuned_params(s);
  const MaternParams mp = s.matern_params(th);
  CHECK(mp.sigma2[0] == 1.3);
  CHECK(mp.sigma2[1] == 0.55);
  CHECK(mp.a_h == 1.0 / 260.0);
  CHECK(mp.a_v == 1.0 / 85.0);
  CHECK(mp.nu[0] == 1.4);
  CHECK(mp.nu[1] == 1.4);
  CHECK(mp.beta12 == 0.6);
  CHECK(mp.dim_d == 3);

  SUBCASE("the independent model pins the seed at zero") {
    ModelSpec i1 = spec_of(ModelId::I1);
    CHECK(i1.matern_params(tuned_params(i1)).beta12 == 0.0);
  }
  SUBCASE("semi-parametric models carry unit placeholder variances") {
    ModelSpec i2 = spec_of(ModelId::I2);
    const MaternParams pm = i2.matern_params(tuned_params(i2));
    CHECK(pm.sigma2[0] == 1.0);
    CHECK(pm.sigma2[1] == 1.0);
    CHECK(pm.a_h == 1.0 / 260.0);
  }
  SUBCASE("wrong family") {
    ModelSpec i3 = spec_of(ModelId::I3);
    CHECK_THROWS_AS(i3.matern_params(tuned_params(i3)), config_error);
  }
}

TEST_CASE("diffop parameter mapping") {
  ModelSpec s = spec_of(ModelId::B4);
  s.fixed_a_h = 1.0 / 280.0;
  s.fixed_a_v = 1.0 / 95.0;
  const ParamVector th = tuned_params(s);
  const DiffOpParams dp = s.diffop_params(th);
  CHECK(dp.base.a_h == 1.0 / 280.0);
  CHECK(dp.base.a_v == 1.0 / 95.0);
  CHECK(dp.base.nu[0] == 2.0);
  CHECK(dp.base.nu[1] == 2.0);
  CHECK(dp.base.sigma2[0] == 1.0);
  CHECK(dp.base.sigma2[1] == 1.0);
  CHECK(dp.base.beta12 == 0.6);
  CHECK(dp.op[0].a == 0.031);
  CHECK(dp.op[0].b == -0.022);
  CHECK(dp.op[0].d == 0.0);
  CHECK(dp.op[1].a == 0.027);
  CHECK(dp.op[1].d == 0.0);
  REQUIRE(dp.op[0].c_w.weights.size() == 6);
  CHECK(dp.op[0].c_w.weights[0] == 25.0);
  CHECK(dp.op[0].c_w.weights[5] == 15.0);
  CHECK(dp.op[1].c_w.weights[2] == 88.0);
  CHECK(dp.op[0].c_spec == s.spline_T);

  SUBCASE("correlation seed is structural for I3 and B3") {
    ModelSpec i3 = spec_of(ModelId::I3);
    CHECK(i3.diffop_params(tuned_params(i3)).base.beta12 == 0.0);
    ModelSpec b3 = spec_of(ModelId::B3);
    CHECK(b3.diffop_params(tuned_params(b3)).base.beta12 == 1.0);
  }
  SUBCASE("wrong family") {
    ModelSpec b1 = spec_of(ModelId::B1);
    CHECK_THROWS_AS(b1.diffop_params(tuned_params(b1)), config_error);
  }
}

TEST_CASE("assembler construction guards") {
  CHECK_THROWS_AS(CovAssembler(spec_of(ModelId::I1), {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CovAssembler(spec_of(ModelId::I1), {{91.0, 0.0, 0.0}}),
                  out_of_domain);
  CHECK_THROWS_AS(
      CovAssembler(spec_of(ModelId::I2), kPoints)
          .assemble(spec_of(ModelId::I2).default_params()),
      config_error);
  const ProfileDataset data = moments_fixture(false);
  const MomentsGrid grid(data, KernelBandwidths{});
  CovAssembler i1(spec_of(ModelId::I1), kPoints);
  CHECK_THROWS_AS(i1.attach_moments(grid, data), config_error);
}

TEST_CASE("assemble agrees with the pointwise evaluator for every model") {
  const ProfileDataset data = moments_fixture(false);
  const MomentsGrid grid(data, KernelBandwidths{});
  const std::size_t n = kPoints.size();

  for (const ModelId id : {ModelId::I1, ModelId::I2, ModelId::I3, ModelId::B1,
                           ModelId::B2, ModelId::B3, ModelId::B4}) {
    const ModelSpec s = spec_of(id);
    const ParamVector th = tuned_params(s);
    CovAssembler cov(s, kPoints);
    if (is_semiparametric(id)) cov.attach_moments(grid, data);
    const CovMatrix m = cov.assemble(th);
    REQUIRE(m.n_obs == n);
    CHECK(m.values == m.values.transpose().eval());
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j)
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) {
            const double got = m.values(
                static_cast<Eigen::Index>((i - 1) * n + a),
                static_cast<Eigen::Index>((j - 1) * n + b));
            const double want = cov.entry(th, i, j, kPoints[a], kPoints[b]);
            INFO(to_string(id), " i=", i, " j=", j, " a=", a, " b=", b);
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
          }
  }
}

TEST_CASE("assemble_cross_to matches single entries") {
  const ModelSpec s = spec_of(ModelId::B4);
  const ParamVector th = tuned_params(s);
  const CovAssembler cov(s, kPoints);
  const std::vector<GeoPoint> rows{{40.4, -174.9, 500.0},
                                   {39.9, -175.3, 120.0}};
  const std::vector<int> vars{2, 1};
  const Eigen::MatrixXd x = cov.assemble_cross_to(th, rows, vars);
  REQUIRE(x.rows() == 2);
  REQUIRE(x.cols() == static_cast<Eigen::Index>(2 * kPoints.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < 2 * kPoints.size(); ++c) {
      const int vj = c < kPoints.size() ? 1 : 2;
      const std::size_t pb = c < kPoints.size() ? c : c - kPoints.size();
      CHECK(x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) ==
            doctest::Approx(cov.entry(th, vars[r], vj, rows[r], kPoints[pb]))
                .epsilon(1e-12));
    }
  CHECK_THROWS_AS(cov.assemble_cross_to(th, rows, {1}),
                  std::invalid_argument);
}

TEST_CASE("a zero correlation seed reduces B4 to I3 exactly") {
  const ModelSpec i3 = spec_of(ModelId::I3);
  const ModelSpec b4 = spec_of(ModelId::B4);
  ParamVector th4 = tuned_params(b4);
  th4.set("beta12", 0.0);
  // Same operator coefficients, seed forced to zero.
  const CovMatrix a = CovAssembler(i3, kPoints).assemble(tuned_params(i3));
  const CovMatrix b = CovAssembler(b4, kPoints).assemble(th4);
  CHECK(a.values == b.values);
}

TEST_CASE("a unit correlation seed reduces B4 to B3 exactly") {
  const ModelSpec b3 = spec_of(ModelId::B3);
  const ModelSpec b4 = spec_of(ModelId::B4);
  ParamVector th4 = tuned_params(b4);
  th4.set("beta12", 1.0);  // direct value assignment, never packed
  const CovMatrix a = CovAssembler(b3, kPoints).assemble(tuned_params(b3));
  const CovMatrix b = CovAssembler(b4, kPoints).assemble(th4);
  CHECK(a.values == b.values);
}

TEST_CASE("B2 degenerates to I2 when the smoothed cross-moments vanish") {
  // Every observation has temp * psal == 0, so each empirical cross term is
  // exactly zero and the two assemblies must coincide.
  const ProfileDataset data = moments_fixture(true);
  const MomentsGrid grid(data, KernelBandwidths{});
  const ModelSpec i2 = spec_of(ModelId::I2);
  const ModelSpec b2 = spec_of(ModelId::B2);
  CovAssembler ci(i2, kPoints);
  CovAssembler cb(b2, kPoints);
  ci.attach_moments(grid, data);
  cb.attach_moments(grid, data);
  const CovMatrix a = ci.assemble(tuned_params(i2));
  const CovMatrix b = cb.assemble(tuned_params(b2));
  CHECK(a.values == b.values);
}

TEST_CASE("the nugget is a likelihood-side quantity, not part of assembly") {
  ModelSpec plain = spec_of(ModelId::B1);
  ModelSpec with_nugget = plain;
  with_nugget.nugget = 0.08;
  const CovMatrix a =
      CovAssembler(plain, kPoints).assemble(tuned_params(plain));
  const CovMatrix b = CovAssembler(with_nugget, kPoints)
                          .assemble(tuned_params(with_nugget));
  CHECK(a.values == b.values);
}

}  // TEST_SUITE
