#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ontopt/expr.hpp"

namespace ontopt {

/// Upper bound on the flat dimension of a problem (desk-scale cap).
inline constexpr int kMaxDimension = 64;

enum class VarKind { kScalar, kVector, kSymmetricMatrix };
enum class VarDomain { kFree, kNonnegative, kStrictlyPositive };

struct VariableSpec {
  std::string name;
  VarKind kind = VarKind::kScalar;
  // vector length or matrix order; 1 for scalars
  int n = 1;
  VarDomain domain = VarDomain::kFree;

  /// Scalars occupied in the flat point (n·n for symmetric matrices).
  int flat_size() const;
};

enum class Relation { kLe, kEq, kGe, kInCone };
enum class Cone { kNone, kSecondOrder, kPositiveSemidefinite };
enum class Sense { kMinimize, kMaximize };

struct Constraint {
  Expr lhs = Expr::constant(0.0);
  Relation relation = Relation::kLe;
  Expr rhs = Expr::constant(0.0);
  Cone cone = Cone::kNone;
};

struct Problem {
  Sense sense = Sense::kMinimize;
  Expr objective = Expr::constant(0.0);
  std::vector<VariableSpec> variables;
  std::vector<Constraint> constraints;
  std::vector<std::pair<std::string, double>> parameters;
  /// Set by canonical_sense when a maximization was rewritten; reported values
  /// are negated back to the original sense.
  bool value_negated = false;

  /// Appends a variable after the existing ones and returns its slot.
  VarSlot add_variable(VariableSpec spec);
  std::optional<VarSlot> slot(const std::string& name) const;
  std::vector<VarSlot> slots() const;
  int dimension() const;
  ParamMap param_map() const;
  /// Copy with one parameter set (added when absent).
  Problem with_parameter(const std::string& name, double value) const;
  /// Every variable as a dot/quad/norm2/monomial argument list.
  std::vector<Expr> all_variable_refs() const;
};

struct Violation {
  std::string code;
  std::string message;
};

/// Empty iff every model invariant holds.
std::vector<Violation> validate(const Problem& p);

/// Throws ValidationError listing every violation, if any.
void require_valid(const Problem& p);

/// Equivalent minimize-sense problem. A maximization has its objective negated
/// and value_negated toggled; the constraint list is copied untouched.
Problem canonical_sense(const Problem& p);

/// −e, unwrapping an existing negation.
Expr negate(const Expr& e);
/// a − b, omitting a zero constant b.
Expr subtract(const Expr& a, const Expr& b);

/// Minimize-sense objective (the objective of canonical_sense(p)).
Expr min_objective(const Problem& p);

/// The constraint list as classifiers and solvers see it: ≥ turned into ≤,
/// second-order cone constraints split into their norm and bound.
struct NormalizedConstraint {
  enum class Kind { kInequality, kEquality, kSecondOrder, kPsd };
  Kind kind = Kind::kInequality;
  // kInequality: g ≤ 0. kEquality: g = 0. kSecondOrder: g = norm − bound ≤ 0.
  Expr g = Expr::constant(0.0);
  Expr norm = Expr::constant(0.0);
  Expr bound = Expr::constant(0.0);
  VarSlot matrix;
  int source = 0;
};

std::vector<NormalizedConstraint> normalize_constraints(const Problem& p);

/// Scalar inequality system gᵢ(x) ≤ 0 used for Lagrange multipliers: each
/// constraint in order (an equality contributes h and −h, a cone constraint
/// its norm − bound), then −xⱼ ≤ 0 for every coordinate with a nonnegative or
/// strictly-positive domain. Throws InapplicableError on a PSD constraint.
std::vector<Expr> inequality_system(const Problem& p);

/// Largest constraint/domain violation at x (0 when feasible). Points outside
/// an expression's domain give +infinity.
double max_violation(const Problem& p, const Vec& x);

bool is_feasible(const Problem& p, const Vec& x, double tol);

/// Objective at x in the problem's own sense.
double objective_value(const Problem& p, const Vec& x);

// File format (.optproblem.json).
Problem parse_problem(std::string_view text);
std::string serialize_problem(const Problem& p);
Problem load_problem(const std::string& path);
void save_problem(const Problem& p, const std::string& path);

}  // namespace ontopt
