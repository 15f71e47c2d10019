// lbfgs.hpp
// Batch L-BFGS minimizer with Armijo backtracking, used for the CRF
// maximum-likelihood fit. Deterministic: no randomness, fixed evaluation
// order, so identical inputs give identical iterates.

#ifndef DEFEXT_LBFGS_HPP
#define DEFEXT_LBFGS_HPP

#include <functional>
#include <vector>

namespace defext {

struct LbfgsOptions {
  int history = 6;
  int max_iterations = 200;
  // stop when ||g||2 <= tolerance * max(1, ||x||2)
  double tolerance = 1e-4;
  int max_line_search = 40;
  double armijo_c1 = 1e-4;
};

struct LbfgsResult {
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
  // objective value after each accepted step; strictly decreasing
  std::vector<double> objective_history;
};

// evaluates f(x) and writes the gradient into grad (same size as x)
using Objective = std::function<double(const std::vector<double>& x, std::vector<double>& grad)>;

LbfgsResult lbfgs_minimize(std::vector<double>& x, const Objective& f, const LbfgsOptions& opts);

}  // namespace defext

#endif  // DEFEXT_LBFGS_HPP
