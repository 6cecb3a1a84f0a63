#pragma once

#include <vector>

namespace argo {

// Clamped (open-uniform) B-spline basis over a strictly increasing breakpoint
// sequence.  With K breakpoints and degree g there are M = K + g - 1 basis
// functions; end breakpoints carry multiplicity g + 1 in the internal knot
// vector so the basis is interpolatory at both ends of the span.
struct SplineSpec {
  int degree = 3;
  std::vector<double> knots;  // breakpoints, strictly increasing

  std::size_t basis_count() const {
    return knots.size() + static_cast<std::size_t>(degree) - 1;
  }
  double span_begin() const { return knots.front(); }
  double span_end() const { return knots.back(); }

  // Throws config_error if degree < 0, fewer than 2 breakpoints, or the
  // breakpoints are not strictly increasing.
  void validate() const;

  bool operator==(const SplineSpec&) const = default;
};

struct SplineWeights {
  std::vector<double> weights;

  bool operator==(const SplineWeights&) const = default;
};

// All M basis values at pressure p (Cox-de Boor).  Entries are nonnegative,
// sum to 1, and at most degree+1 are nonzero.  Throws out_of_domain if p is
// outside [first breakpoint, last breakpoint].
std::vector<double> basis_eval(const SplineSpec& spec, double p);

// Sum_m w_m B_m(p).  Throws std::invalid_argument on length mismatch.
double c_eval(const SplineSpec& spec, const SplineWeights& w, double p);

// Breakpoints plus midpoints of every consecutive pair.
SplineSpec refine_knots(const SplineSpec& spec);

}  // namespace argo
