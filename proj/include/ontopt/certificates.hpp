#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ontopt/problem.hpp"
#include "ontopt/solvers.hpp"

namespace ontopt {

constexpr std::uint64_t kDefaultSeed = 0x5EED;

/// OPT_ONTOLOGY_SEED when set (decimal or 0x-hex), else kDefaultSeed.
std::uint64_t sampling_seed();

/// ‖∇f(x)‖∞ ≤ tol for the minimize-sense objective. A necessary condition
/// only: x = 0 passes for f = x³. Throws NondifferentiableError at a kink.
bool check_stationarity(const Problem& p, const Vec& x, double tol);

struct Multipliers {
  double lambda0 = 1.0;
  Vec lambdas;  // aligned with inequality_system(p)
};

struct KktReport {
  double stationarity_residual = 0.0;  // ‖λ₀∇f + Σλᵢ∇gᵢ‖∞
  bool multiplier_signs_ok = false;
  double complementary_slackness_residual = 0.0;  // maxᵢ |λᵢgᵢ(x)|
  double primal_violation = 0.0;                  // maxᵢ max(gᵢ(x), 0)
  double lambda0 = 1.0;
  bool strictly_feasible_point = false;
  bool accepted = false;
  std::string failed_clause;  // empty when accepted
};

/// Lagrange conditions at x in minimize form with gᵢ from inequality_system.
/// When a strictly feasible point exists (x itself, or an LP phase-1 point
/// for affine systems) λ₀ must be 1. Throws DimensionError when lambdas does
/// not match the constraint system.
KktReport check_kkt(const Problem& p, const Vec& x, const Multipliers& m, double tol);

struct LocalOptimumReport {
  bool refuted = false;
  double value = 0.0;  // minimize-sense objective at x
  std::optional<Vec> witness;
  double witness_value = 0.0;
  int feasible_samples = 0;
};

/// Shifted Halton samples in the δ-ball around x, feasible ones only.
/// Refuted iff one improves the objective by more than 1e-12; otherwise the
/// verdict is evidence, not proof.
LocalOptimumReport check_local_optimum(const Problem& p, const Vec& x, double delta, int samples,
                                       std::uint64_t seed = kDefaultSeed);

struct SensitivityReport {
  std::string parameter;
  double r0 = 0.0;
  double h = 0.0;
  double lhs = 0.0;  // (f*(r0+h) − f*(r0−h)) / 2h
  double rhs = 0.0;  // ∂L/∂r at (x*(r0), λ(r0)), λ held fixed
  double discrepancy = 0.0;
  Vec x_star;
  Vec lambdas;
};

/// Envelope check with solve_auto at r0−h, r0, r0+h; NumericalError when a
/// solve is not optimal.
SensitivityReport envelope_sensitivity(const Problem& p, const std::string& parameter, double r0, double h,
                                       const SolverConfig& cfg = {});

struct SublinearReport {
  bool consistent = true;
  std::string property;  // "homogeneity" or "subadditivity"
  Vec x;
  Vec y;
  double gamma = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// f(γx) = γf(x) for γ ∈ {0.5, 1, 2, 3} and f(x+y) ≤ f(x) + f(y) over random
/// pairs in [−5, 5]^dim; reports the first counterexample.
SublinearReport check_sublinear(const Expr& f, int dim, int samples, std::uint64_t seed = kDefaultSeed);

}  // namespace ontopt
