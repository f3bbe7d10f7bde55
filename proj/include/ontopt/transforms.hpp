#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ontopt/classify.hpp"
#include "ontopt/problem.hpp"

namespace ontopt {

/// Variable substitution between two flat point spaces.
struct PointMap {
  std::string description;
  std::function<Vec(const Vec&)> apply;
};

struct ValueStep {
  enum class Kind { kNegate, kAdd, kSqrt, kExp, kLog };
  Kind kind = Kind::kNegate;
  double constant = 0.0;
};

/// Maps the transformed problem's raw objective value (its own sense) to the
/// source problem's objective value. Steps run in order.
struct ValueMap {
  std::vector<ValueStep> steps;
  // false when the transformed objective says nothing about the source value
  bool comparable = true;

  double apply(double transformed_value) const;
  bool is_identity() const { return comparable && steps.empty(); }
  std::string describe() const;
  /// this ∘ inner: apply inner first, then this.
  ValueMap after(const ValueMap& inner) const;

  static ValueMap identity() { return {}; }
  static ValueMap negation() { return {{{ValueStep::Kind::kNegate, 0.0}}, true}; }
  static ValueMap unrelated() { return {{}, false}; }
};

struct TransformResult {
  std::string rule;
  std::string certificate;
  Problem transformed;
  std::optional<PointMap> forward;   // source point → transformed point
  std::optional<PointMap> backward;  // transformed point → source point
  ValueMap value_map;
};

/// Rewrites every h = 0 into h ≤ 0 and −h ≤ 0 in place.
TransformResult eq_to_ineq_pair(const Problem& p);

/// SOCP whose cone matrices are all zero → LP with ‖bᵢ‖₂ ≤ cᵢᵀx + dᵢ.
/// Throws InapplicableError("NotReducible") naming the first cone (1-based)
/// with Aᵢ ≠ 0.
TransformResult socp_to_lp(const Problem& p);

/// x = exp(y): posynomials become sums of exponentials of affine forms,
/// monomial constraints become affine. Throws InapplicableError("NotGP").
TransformResult gp_log_transform(const Problem& p);

/// max{cᵀx : Ax ≤ b, x ≥ 0} → min{bᵀy : Aᵀy ≥ c, y ≥ 0}, or
/// max{cᵀx : Ax ≤ b} → min{bᵀy : Aᵀy = c, y ≥ 0}.
/// Throws InapplicableError("ShapeMismatch") for anything else.
TransformResult lp_dual(const Problem& p);

/// gᵢ(x) ≤ 0 → gᵢ(x) ≤ s, minimize s. The source is feasible iff the optimum
/// is ≤ 0. Requires an equality-free problem.
TransformResult phase1_slack(const Problem& p);

/// Maximization → minimization of the negated objective.
TransformResult sense_transform(const Problem& p);

/// min ‖Ax + b‖₂ → min ½xᵀ(2AᵀA)x + (2Aᵀb)ᵀx; the dropped ‖b‖² and the square
/// root live in the value map.
TransformResult least_squares_to_qp(const Problem& p);

struct TransformChain {
  std::vector<TransformResult> steps;
  Problem result;
  PointMap forward;
  PointMap backward;
  ValueMap value_map;
  Classification classification;
};

/// canonical sense, least squares → QP, GP log transform, SOCP → LP, each
/// applied when it matches, with composed maps.
TransformChain to_convex_min(const Problem& p);

/// Chain of transforms applied one after another.
TransformChain compose(const Problem& source, std::vector<TransformResult> steps);

}  // namespace ontopt
