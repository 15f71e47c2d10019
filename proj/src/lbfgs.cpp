#include "defext/lbfgs.hpp"

#include <cmath>
#include <deque>

#include "defext/errors.hpp"

namespace defext {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

bool all_finite(const std::vector<double>& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

struct Pair {
  std::vector<double> s;  // x_{k+1} - x_k
  std::vector<double> y;  // g_{k+1} - g_k
  double rho;             // 1 / (y . s)
};

}  // namespace

LbfgsResult lbfgs_minimize(std::vector<double>& x, const Objective& f, const LbfgsOptions& opts) {
  if (opts.history < 1 || opts.max_iterations < 1 || opts.tolerance <= 0.0)
    throw ConfigError("lbfgs options must be positive");

  const std::size_t n = x.size();
  LbfgsResult res;

  std::vector<double> g(n, 0.0);
  double fx = f(x, g);
  if (!std::isfinite(fx) || !all_finite(g)) throw TrainingError("objective not finite at start");

  std::deque<Pair> mem;
  std::vector<double> d(n), x_new(n), g_new(n), alpha;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    double gnorm = norm2(g);
    double xnorm = norm2(x);
    res.gradient_norm = gnorm;
    if (gnorm <= opts.tolerance * std::max(1.0, xnorm)) {
      res.converged = true;
      break;
    }

    // two-loop recursion for d = -H g
    d = g;
    alpha.assign(mem.size(), 0.0);
    for (std::size_t i = mem.size(); i-- > 0;) {
      alpha[i] = mem[i].rho * dot(mem[i].s, d);
      for (std::size_t j = 0; j < n; ++j) d[j] -= alpha[i] * mem[i].y[j];
    }
    if (!mem.empty()) {
      const Pair& last = mem.back();
      double scale = dot(last.s, last.y) / dot(last.y, last.y);
      for (std::size_t j = 0; j < n; ++j) d[j] *= scale;
    }
    for (std::size_t i = 0; i < mem.size(); ++i) {
      double beta = mem[i].rho * dot(mem[i].y, d);
      for (std::size_t j = 0; j < n; ++j) d[j] += (alpha[i] - beta) * mem[i].s[j];
    }
    for (std::size_t j = 0; j < n; ++j) d[j] = -d[j];

    double dg = dot(d, g);
    if (dg >= 0.0) {
      // not a descent direction; fall back to steepest descent
      for (std::size_t j = 0; j < n; ++j) d[j] = -g[j];
      dg = -dot(g, g);
      mem.clear();
    }

    // Armijo backtracking from unit step
    double step = 1.0;
    double fx_new = fx;
    bool accepted = false;
    for (int ls = 0; ls < opts.max_line_search; ++ls) {
      for (std::size_t j = 0; j < n; ++j) x_new[j] = x[j] + step * d[j];
      fx_new = f(x_new, g_new);
      if (std::isfinite(fx_new) && all_finite(g_new) &&
          fx_new <= fx + opts.armijo_c1 * step * dg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // line search stalled; report non-convergence

    Pair p;
    p.s.resize(n);
    p.y.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      p.s[j] = x_new[j] - x[j];
      p.y[j] = g_new[j] - g[j];
    }
    double sy = dot(p.s, p.y);
    if (sy > 1e-10) {
      p.rho = 1.0 / sy;
      mem.push_back(std::move(p));
      if ((int)mem.size() > opts.history) mem.pop_front();
    }

    x.swap(x_new);
    g.swap(g_new);
    fx = fx_new;
    res.iterations = iter + 1;
    res.objective_history.push_back(fx);
  }

  res.objective = fx;
  res.gradient_norm = norm2(g);
  if (!res.converged)
    res.converged = res.gradient_norm <= opts.tolerance * std::max(1.0, norm2(x));
  return res;
}

}  // namespace defext
