#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ontopt/classify.hpp"
#include "ontopt/problem.hpp"

namespace ontopt {

/// Every iterative tolerance in one place.
struct SolverConfig {
  double simplex_tol = 1e-9;
  int simplex_max_pivots = 10000;
  double newton_grad_tol = 1e-9;
  int max_iterations = 200;
  double armijo_c = 1e-4;
  double barrier_gap = 1e-8;
  double barrier_mu = 10.0;
  double interior_margin = 1e-6;
  double unbounded_norm = 1e10;
  double grid_feasibility_tol = 1e-9;
  double feasibility_tol = 1e-7;
  int grid_threads = 1;
  std::optional<Vec> start;
};

enum class SolveStatus { kOptimal, kUnbounded, kInfeasible, kMaxIterations, kNondifferentiableFailure };
const char* status_name(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<Vec> point;
  /// Objective in the original problem's sense (value_negated undone); ±inf
  /// for unbounded, NaN when there is no point.
  double value = std::numeric_limits<double>::quiet_NaN();
  /// Aligned with inequality_system(p); an equality multiplier ν appears as
  /// (max(ν,0), max(−ν,0)) on its h, −h pair.
  std::optional<Vec> multipliers;
  int iterations = 0;
  std::string method;
  /// Minimize-sense objective after each iteration.
  std::vector<double> history;
};

/// Raw LP in minimize form; the solver core shared by simplex and barrier.
struct LpResult {
  SolveStatus status = SolveStatus::kInfeasible;
  Vec x;
  double value = 0.0;
  Vec duals;  // λ per row, λ ≥ 0 for inequalities, sign-free for equalities
  int pivots = 0;
};
LpResult simplex_lp(const LpData& lp, const SolverConfig& cfg = {});

Solution solve_simplex(const Problem& p, const SolverConfig& cfg = {});

/// Damped Newton for convex objectives, optionally under affine equalities.
Solution solve_newton(const Problem& p, const SolverConfig& cfg = {});

/// Log-barrier path following for inequality-form LPs.
Solution solve_barrier(const Problem& p, const SolverConfig& cfg = {});

struct GridBox {
  Vec lo;
  Vec hi;
  double step = 1e-2;
};

/// Exhaustive search over the grid lo + k·step (hi included); dimension ≤ 3.
Solution solve_grid_oracle(const Problem& p, const GridBox& box, const SolverConfig& cfg = {});

/// simplex for LP, Newton otherwise.
Solution solve_auto(const Problem& p, const SolverConfig& cfg = {});

/// Minimize-sense value → value in the problem's original sense.
double original_value(const Problem& p, double min_value);

}  // namespace ontopt
