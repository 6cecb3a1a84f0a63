#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace argo {

struct OptimizerConfig {
  std::size_t max_evals = 2000;  // total objective evaluations across passes
  int restarts = 3;              // simplex rebuilds after the first pass
  double init_step = 0.5;        // initial simplex edge, unconstrained space
  double f_tol = 1e-8;           // simplex value-spread convergence
  double x_tol = 1e-10;          // simplex size convergence
  std::uint64_t seed = 0;        // restart perturbation stream
};

struct OptimizerResult {
  std::vector<double> x;      // best coordinates found
  double value = 0.0;         // objective at x (maximization)
  std::vector<double> trace;  // best-so-far at each improvement (monotone)
  std::size_t evals = 0;
  bool converged = false;
};

// Derivative-free simplex search maximizing f over unconstrained coordinates.
// Evaluations that throw are treated as objective -infinity.  Deterministic
// given (x0, cfg).
OptimizerResult nelder_mead_maximize(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const OptimizerConfig& cfg);

}  // namespace argo
