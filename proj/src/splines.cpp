#include "argo/splines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "argo/error.hpp"

namespace argo {
namespace {

// Full clamped knot vector: end breakpoints repeated degree+1 times.
std::vector<double> full_knots(const SplineSpec& spec) {
  const int g = spec.degree;
  std::vector<double> t;
  t.reserve(spec.knots.size() + 2 * static_cast<std::size_t>(g));
  for (int r = 0; r < g; ++r) t.push_back(spec.knots.front());
  t.insert(t.end(), spec.knots.begin(), spec.knots.end());
  for (int r = 0; r < g; ++r) t.push_back(spec.knots.back());
  return t;
}

}  // namespace

void SplineSpec::validate() const {
  if (degree < 0) throw config_error("spline degree must be >= 0");
  if (knots.size() < 2) throw config_error("spline needs >= 2 breakpoints");
  for (std::size_t k = 1; k < knots.size(); ++k)
    if (!(knots[k] > knots[k - 1]))
      throw config_error("spline breakpoints must be strictly increasing");
}

std::vector<double> basis_eval(const SplineSpec& spec, double p) {
  spec.validate();
  if (!(p >= spec.span_begin() && p <= spec.span_end()))
    throw out_of_domain("spline evaluation at p=" + std::to_string(p) +
                        " outside [" + std::to_string(spec.span_begin()) +
                        ", " + std::to_string(spec.span_end()) + "]");
  const int g = spec.degree;
  const std::vector<double> t = full_knots(spec);
  const std::size_t M = spec.basis_count();

  // Knot span index: t[span] <= p < t[span+1], clamped so the right endpoint
  // lands in the last nonempty interval.
  std::size_t span = g;
  {
    const std::size_t last = M - 1;  // last valid span start
    std::size_t lo = g, hi = last;
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if (t[mid] <= p)
        lo = mid;
      else
        hi = mid - 1;
    }
    span = lo;
    // Skip zero-length spans introduced by end-knot multiplicity.
    while (span > static_cast<std::size_t>(g) && t[span] == t[span + 1])
      --span;
  }

  // Triangular Cox-de Boor: N[r] holds B_{span-deg+r, deg}(p) at the end.
  std::vector<double> N(static_cast<std::size_t>(g) + 1, 0.0);
  N[0] = 1.0;
  std::vector<double> left(static_cast<std::size_t>(g) + 1, 0.0);
  std::vector<double> right(static_cast<std::size_t>(g) + 1, 0.0);
  for (int j = 1; j <= g; ++j) {
    left[j] = p - t[span + 1 - j];
    right[j] = t[span + j] - p;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double tmp = denom != 0.0 ? N[r] / denom : 0.0;
      N[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    N[j] = saved;
  }

  std::vector<double> out(M, 0.0);
  for (int r = 0; r <= g; ++r) {
    const std::size_t idx = span - static_cast<std::size_t>(g) +
                            static_cast<std::size_t>(r);
    out[idx] = N[r];
  }
  return out;
}

double c_eval(const SplineSpec& spec, const SplineWeights& w, double p) {
  if (w.weights.size() != spec.basis_count())
    throw std::invalid_argument(
        "c_eval: weight length " + std::to_string(w.weights.size()) +
        " != basis count " + std::to_string(spec.basis_count()));
  const std::vector<double> B = basis_eval(spec, p);
  double s = 0.0;
  for (std::size_t m = 0; m < B.size(); ++m) s += w.weights[m] * B[m];
  return s;
}

SplineSpec refine_knots(const SplineSpec& spec) {
  spec.validate();
  SplineSpec out;
  out.degree = spec.degree;
  out.knots.reserve(spec.knots.size() * 2 - 1);
  for (std::size_t k = 0; k + 1 < spec.knots.size(); ++k) {
    out.knots.push_back(spec.knots[k]);
    out.knots.push_back(0.5 * (spec.knots[k] + spec.knots[k + 1]));
  }
  out.knots.push_back(spec.knots.back());
  return out;
}

}  // namespace argo
