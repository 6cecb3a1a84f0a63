#include "argo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "argo/rng.hpp"

namespace argo {

namespace {

constexpr double kFailValue = -std::numeric_limits<double>::infinity();

struct Evaluator {
  const std::function<double(const std::vector<double>&)>& f;
  std::size_t budget;
  std::size_t used = 0;
  // Best-so-far bookkeeping lives here so the trace stays monotone across
  // restarts.
  double best = kFailValue;
  std::vector<double> best_x = {};
  std::vector<double> trace = {};

  bool exhausted() const { return used >= budget; }

  double operator()(const std::vector<double>& x) {
    if (exhausted()) return kFailValue;
    ++used;
    double v;
    try {
      v = f(x);
      if (std::isnan(v)) v = kFailValue;
    } catch (...) {
      v = kFailValue;
    }
    if (v > best) {
      best = v;
      best_x = x;
      trace.push_back(v);
    }
    return v;
  }
};

// One simplex pass; returns when converged or out of budget.
void simplex_pass(Evaluator& ev, std::vector<double> x0, double step,
                  double f_tol, double x_tol) {
  const std::size_t d = x0.size();
  const std::size_t m = d + 1;
  std::vector<std::vector<double>> pts(m, x0);
  std::vector<double> vals(m);
  for (std::size_t k = 0; k < d; ++k) pts[k + 1][k] += step;
  for (std::size_t k = 0; k < m; ++k) vals[k] = ev(pts[k]);

  // Standard coefficients (minimization literature, signs flipped: we keep
  // "best" = largest value).
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

  while (!ev.exhausted()) {
    // Order descending by value.
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    {
      std::vector<std::vector<double>> p2(m);
      std::vector<double> v2(m);
      for (std::size_t k = 0; k < m; ++k) {
        p2[k] = pts[idx[k]];
        v2[k] = vals[idx[k]];
      }
      pts.swap(p2);
      vals.swap(v2);
    }

    // Convergence: value spread and simplex extent.
    const double fspread =
        std::isfinite(vals[0]) && std::isfinite(vals[m - 1])
            ? std::abs(vals[0] - vals[m - 1])
            : std::numeric_limits<double>::infinity();
    double extent = 0.0;
    for (std::size_t k = 1; k < m; ++k)
      for (std::size_t c = 0; c < d; ++c)
        extent = std::max(extent, std::abs(pts[k][c] - pts[0][c]));
    if (fspread < f_tol && extent < x_tol) return;

    // Centroid of all but worst.
    std::vector<double> cen(d, 0.0);
    for (std::size_t k = 0; k + 1 < m; ++k)
      for (std::size_t c = 0; c < d; ++c) cen[c] += pts[k][c];
    for (std::size_t c = 0; c < d; ++c) cen[c] /= static_cast<double>(m - 1);

    auto blend = [&](double t) {
      std::vector<double> x(d);
      for (std::size_t c = 0; c < d; ++c)
        x[c] = cen[c] + t * (pts[m - 1][c] - cen[c]);
      return x;
    };

    const std::vector<double> xr = blend(-alpha);
    const double fr = ev(xr);
    if (fr > vals[0]) {
      const std::vector<double> xe = blend(-gamma);
      const double fe = ev(xe);
      if (fe > fr) {
        pts[m - 1] = xe;
        vals[m - 1] = fe;
      } else {
        pts[m - 1] = xr;
        vals[m - 1] = fr;
      }
      continue;
    }
    if (fr > vals[m - 2]) {
      pts[m - 1] = xr;
      vals[m - 1] = fr;
      continue;
    }
    const std::vector<double> xc = blend(fr > vals[m - 1] ? -rho : rho);
    const double fc = ev(xc);
    if (fc > std::max(fr, vals[m - 1])) {
      pts[m - 1] = xc;
      vals[m - 1] = fc;
      continue;
    }
    // Shrink toward best.
    for (std::size_t k = 1; k < m; ++k) {
      for (std::size_t c = 0; c < d; ++c)
        pts[k][c] = pts[0][c] + sigma * (pts[k][c] - pts[0][c]);
      vals[k] = ev(pts[k]);
      if (ev.exhausted()) return;
    }
  }
}

}  // namespace

OptimizerResult nelder_mead_maximize(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const OptimizerConfig& cfg) {
  OptimizerResult res;
  if (x0.empty()) {
    // Nothing to optimize; evaluate once for the record.
    double v;
    try {
      v = f(x0);
    } catch (...) {
      v = kFailValue;
    }
    res.x = x0;
    res.value = v;
    res.trace = {v};
    res.evals = 1;
    res.converged = true;
    return res;
  }

  Evaluator ev{f, std::max<std::size_t>(cfg.max_evals, x0.size() + 2)};
  Rng rng(cfg.seed, 0x6f7074u);

  double step = cfg.init_step;
  std::vector<double> start = x0;
  const int passes = std::max(1, cfg.restarts + 1);
  for (int pass = 0; pass < passes && !ev.exhausted(); ++pass) {
    simplex_pass(ev, start, step, cfg.f_tol, cfg.x_tol);
    if (!ev.best_x.empty()) start = ev.best_x;
    // Rebuild around the incumbent with a jittered, shrinking step so a
    // restart cannot retrace the identical simplex.
    step = cfg.init_step * std::pow(0.4, pass + 1) *
           (0.75 + 0.5 * rng.uniform());
  }

  res.x = ev.best_x.empty() ? x0 : ev.best_x;
  res.value = ev.best;
  res.trace = std::move(ev.trace);
  res.evals = ev.used;
  res.converged = std::isfinite(res.value);
  return res;
}

}  // namespace argo
