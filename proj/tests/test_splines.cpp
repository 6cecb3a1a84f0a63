#include <doctest.h>

#include <cmath>
#include <vector>

#include "argo/error.hpp"
#include "argo/splines.hpp"

using namespace argo;

namespace {

const SplineSpec kDefault{3, {0.0, 100.0, 1000.0, 2000.0}};

}  // namespace

TEST_SUITE("splines") {

TEST_CASE("spec validation") {
  CHECK_NOTHROW(kDefault.validate());
  CHECK(kDefault.basis_count() == 6);
  CHECK(kDefault.span_begin() == 0.0);
  CHECK(kDefault.span_end() == 2000.0);

  CHECK_THROWS_AS((SplineSpec{-1, {0.0, 1.0}}).validate(), config_error);
  CHECK_THROWS_AS((SplineSpec{3, {0.0}}).validate(), config_error);
  CHECK_THROWS_AS((SplineSpec{3, {0.0, 1.0, 1.0}}).validate(), config_error);
  CHECK_THROWS_AS((SplineSpec{3, {0.0, 2.0, 1.0}}).validate(), config_error);
}

TEST_CASE("basis values match an independent B-spline implementation") {
  // Frozen from scipy.interpolate.BSpline on the clamped knot vector
  // [0,0,0,0,100,1000,2000,2000,2000,2000], one unit coefficient at a time.
  struct Case {
    double p;
    double b[6];
  };
  const Case cases[] = {
      {0.0, {1.0, 0.0, 0.0, 0.0, 0.0, 0.0}},
      {37.0,
       {2.500470000000000e-01, 7.144548300000000e-01, 3.524490500000000e-02,
        2.532650000000000e-04, 0.0, 0.0}},
      {100.0, {0.0, 8.099999999999999e-01, 1.850000000000000e-01,
               5.000000000000000e-03, 0.0, 0.0}},
      {642.0,
       {0.0, 5.098079111111111e-02, 5.570843946198830e-01,
        3.429289392305324e-01, 4.900587503847337e-02, 0.0}},
      {1500.0, {0.0, 0.0, 3.289473684210526e-02, 2.614265927977839e-01,
                5.806786703601108e-01, 1.250000000000000e-01}},
      {2000.0, {0.0, 0.0, 0.0, 0.0, 0.0, 1.0}},
  };
  for (const Case& c : cases) {
    const std::vector<double> B = basis_eval(kDefault, c.p);
    REQUIRE(B.size() == 6);
    for (std::size_t m = 0; m < 6; ++m) {
      INFO("p=", c.p, " m=", m);
      CHECK(B[m] == doctest::Approx(c.b[m]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("basis forms a nonnegative partition of unity over a dense grid") {
  const std::size_t n = 2001;
  for (std::size_t k = 0; k < n; ++k) {
    const double p = 2000.0 * static_cast<double>(k) /
                     static_cast<double>(n - 1);
    const std::vector<double> B = basis_eval(kDefault, p);
    double sum = 0.0;
    std::size_t nonzero = 0;
    for (const double v : B) {
      CHECK(v >= 0.0);
      sum += v;
      if (v != 0.0) ++nonzero;
    }
    INFO("p=", p);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(nonzero <= 4);  // degree + 1
  }
}

TEST_CASE("clamped ends are interpolatory") {
  const std::vector<double> lo = basis_eval(kDefault, 0.0);
  const std::vector<double> hi = basis_eval(kDefault, 2000.0);
  CHECK(lo.front() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hi.back() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("degree-1 basis is the hat function") {
  const SplineSpec lin{1, {0.0, 1.0, 2.0}};
  CHECK(lin.basis_count() == 3);
  const std::vector<double> B = basis_eval(lin, 0.5);
  CHECK(B[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(B[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(B[2] == 0.0);
  const std::vector<double> at_knot = basis_eval(lin, 1.0);
  CHECK(at_knot[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("evaluation outside the span throws") {
  CHECK_THROWS_AS(basis_eval(kDefault, -1.0), out_of_domain);
  CHECK_THROWS_AS(basis_eval(kDefault, 2000.5), out_of_domain);
}

TEST_CASE("c_eval weights the basis") {
  const SplineWeights w{{0.5, -1.0, 2.0, 0.25, 3.0, -0.75}};
  // Frozen from the scipy basis values dotted with these weights.
  CHECK(c_eval(kDefault, w, 0.0) ==
        doctest::Approx(5.000000000000000e-01).epsilon(1e-12));
  CHECK(c_eval(kDefault, w, 37.0) ==
        doctest::Approx(-5.188782037500000e-01).epsilon(1e-12));
  CHECK(c_eval(kDefault, w, 642.0) ==
        doctest::Approx(1.295937858051708e+00).epsilon(1e-12));
  CHECK(c_eval(kDefault, w, 1999.0) ==
        doctest::Approx(-7.387655856855957e-01).epsilon(1e-12));

  CHECK_THROWS_AS(c_eval(kDefault, SplineWeights{{1.0, 2.0}}, 50.0),
                  std::invalid_argument);
}

TEST_CASE("refine_knots inserts midpoints") {
  const SplineSpec once = refine_knots(kDefault);
  CHECK(once.degree == 3);
  CHECK(once.knots ==
        std::vector<double>{0.0, 50.0, 100.0, 550.0, 1000.0, 1500.0, 2000.0});
  const SplineSpec twice = refine_knots(once);
  CHECK(twice.knots ==
        std::vector<double>{0.0, 25.0, 50.0, 75.0, 100.0, 325.0, 550.0, 775.0,
                            1000.0, 1250.0, 1500.0, 1750.0, 2000.0});
  CHECK(twice.basis_count() == 15);
}

}  // TEST_SUITE
