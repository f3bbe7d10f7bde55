#include "ontopt/problem.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "ontopt/errors.hpp"
#include "ontopt/linalg.hpp"

namespace ontopt {

int VariableSpec::flat_size() const { return kind == VarKind::kSymmetricMatrix ? n * n : n; }

VarSlot Problem::add_variable(VariableSpec spec) {
  if (spec.kind == VarKind::kScalar) spec.n = 1;
  VarSlot s{spec.name, dimension(), spec.flat_size()};
  variables.push_back(std::move(spec));
  return s;
}

std::optional<VarSlot> Problem::slot(const std::string& name) const {
  int offset = 0;
  for (const VariableSpec& v : variables) {
    if (v.name == name) return VarSlot{v.name, offset, v.flat_size()};
    offset += v.flat_size();
  }
  return std::nullopt;
}

std::vector<VarSlot> Problem::slots() const {
  std::vector<VarSlot> out;
  int offset = 0;
  for (const VariableSpec& v : variables) {
    out.push_back({v.name, offset, v.flat_size()});
    offset += v.flat_size();
  }
  return out;
}

int Problem::dimension() const {
  int d = 0;
  for (const VariableSpec& v : variables) d += v.flat_size();
  return d;
}

ParamMap Problem::param_map() const { return ParamMap(parameters.begin(), parameters.end()); }

Problem Problem::with_parameter(const std::string& name, double value) const {
  Problem out = *this;
  for (auto& [k, v] : out.parameters) {
    if (k == name) {
      v = value;
      return out;
    }
  }
  out.parameters.emplace_back(name, value);
  return out;
}

std::vector<Expr> Problem::all_variable_refs() const {
  std::vector<Expr> refs;
  for (const VarSlot& s : slots()) refs.push_back(Expr::var(s));
  return refs;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
 public:
  explicit Validator(const Problem& p) : p_(p) {
    for (const auto& [name, value] : p.parameters) params_.insert(name);
  }

  std::vector<Violation> run() {
    std::set<std::string> names;
    for (const VariableSpec& v : p_.variables) {
      if (v.name.empty()) add("EMPTY_NAME", "variable with an empty name");
      if (!names.insert(v.name).second) add("DUPLICATE_NAME", "variable '" + v.name + "' declared twice");
      if (v.n < 1) add("BAD_SIZE", "variable '" + v.name + "' has size " + std::to_string(v.n));
      if (v.kind == VarKind::kSymmetricMatrix && v.domain != VarDomain::kFree) {
        add("BAD_DOMAIN", "symmetric-matrix variable '" + v.name + "' must have a free domain");
      }
    }
    if (p_.dimension() > kMaxDimension) {
      add("DIMENSION_CAP", "problem has " + std::to_string(p_.dimension()) + " scalar variables (cap " +
                               std::to_string(kMaxDimension) + ")");
    }
    for (const auto& [name, value] : p_.parameters) {
      if (names.count(name)) add("PARAM_NAME_CLASH", "parameter '" + name + "' shadows a variable");
      if (!std::isfinite(value)) add("NON_FINITE", "parameter '" + name + "' is not finite");
    }

    check_scalar(p_.objective, "objective");
    for (std::size_t i = 0; i < p_.constraints.size(); ++i) {
      const Constraint& c = p_.constraints[i];
      const std::string where = "constraints[" + std::to_string(i) + "]";
      check_cone(c, where);
      if (c.cone == Cone::kPositiveSemidefinite) continue;
      check_scalar(c.lhs, where + ".lhs");
      check_scalar(c.rhs, where + ".rhs");
    }
    return std::move(out_);
  }

 private:
  void add(std::string code, std::string message) { out_.push_back({std::move(code), std::move(message)}); }

  void check_scalar(const Expr& e, const std::string& where) {
    if (e.width() != 1) add("NON_SCALAR", where + " is a vector variable used as a scalar");
    check(e, where);
  }

  bool check_var(const ExprNode& n, const std::string& where) {
    auto s = p_.slot(n.var.name);
    if (!s) {
      add("UNDECLARED_VARIABLE", "undeclared variable " + n.var.name + " in " + where);
      return false;
    }
    if (s->offset != n.var.offset || s->size != n.var.size) {
      add("LAYOUT_MISMATCH", "variable '" + n.var.name + "' in " + where + " does not match its declaration");
      return false;
    }
    if (n.element >= s->size) {
      add("INDEX_OUT_OF_RANGE", "index " + std::to_string(n.element) + " out of range for '" + n.var.name + "'");
      return false;
    }
    return true;
  }

  void check(const Expr& e, const std::string& where) {
    const ExprNode& n = e.node();
    if (!n.param.empty() && !params_.count(n.param)) {
      add("UNDECLARED_PARAMETER", "undeclared parameter " + n.param + " in " + where);
    }
    if (!std::isfinite(n.scalar) || !n.vec.allFinite() || !n.mat.allFinite()) {
      add("NON_FINITE", std::string(op_name(n.op)) + " payload in " + where + " is not finite");
    }
    switch (n.op) {
      case Op::kVar:
        check_var(n, where);
        return;
      case Op::kDot:
      case Op::kQuad:
      case Op::kNorm2:
      case Op::kMonomial: {
        int width = 0;
        bool ok = !n.args.empty();
        for (const Expr& a : n.args) {
          if (a.op() != Op::kVar) {
            add("BAD_ARGUMENT", std::string(op_name(n.op)) + " in " + where + " takes only variable arguments");
            ok = false;
            continue;
          }
          ok = check_var(a.node(), where) && ok;
          width += a.width();
        }
        if (n.args.empty()) add("BAD_ARGUMENT", std::string(op_name(n.op)) + " in " + where + " has no variables");
        if (ok) check_payload(n, width, where);
        return;
      }
      case Op::kAdd:
        if (n.args.size() != 2) add("ARITY", "add in " + where + " needs exactly two arguments");
        break;
      case Op::kSum:
        if (n.args.empty()) add("ARITY", "sum in " + where + " needs at least one argument");
        break;
      case Op::kNeg:
      case Op::kScale:
      case Op::kExp:
      case Op::kLog:
      case Op::kPow:
        if (n.args.size() != 1) add("ARITY", std::string(op_name(n.op)) + " in " + where + " needs one argument");
        break;
      case Op::kConst:
        break;
    }
    for (const Expr& a : n.args) {
      if (a.width() != 1) add("NON_SCALAR", "vector variable used as a scalar in " + where);
      check(a, where);
    }
  }

  void check_payload(const ExprNode& n, int width, const std::string& where) {
    const std::string op = op_name(n.op);
    auto mismatch = [&](const std::string& what) {
      add("DIMENSION_MISMATCH", op + " in " + where + ": " + what + " does not match " + std::to_string(width) +
                                    " variable scalars");
    };
    switch (n.op) {
      case Op::kDot:
        if (n.vec.size() != width) mismatch("coefficient length");
        break;
      case Op::kQuad:
        if (n.mat.rows() != width || n.mat.cols() != width) mismatch("matrix order");
        if (n.asymmetry > 1e-12) add("ASYMMETRIC_Q", "quad matrix in " + where + " is not symmetric");
        break;
      case Op::kNorm2:
        if (n.mat.cols() != width) mismatch("matrix column count");
        if (n.vec.size() != n.mat.rows()) {
          add("DIMENSION_MISMATCH", "norm2 in " + where + ": offset length does not match matrix rows");
        }
        break;
      case Op::kMonomial:
        if (n.vec.size() != width) mismatch("exponent count");
        if (!(n.scalar > 0)) add("MONOMIAL_NONPOSITIVE_COEFF", "monomial in " + where + " has coefficient <= 0");
        break;
      default:
        break;
    }
  }

  void check_cone(const Constraint& c, const std::string& where) {
    if ((c.relation == Relation::kInCone) != (c.cone != Cone::kNone)) {
      add("BAD_CONE", where + ": a cone tag is required exactly when the relation is in-cone");
      return;
    }
    if (c.cone == Cone::kSecondOrder && c.lhs.op() != Op::kNorm2) {
      add("BAD_CONE", where + ": second-order cone constraint needs a norm2 left-hand side");
    }
    if (c.cone == Cone::kPositiveSemidefinite) {
      bool ok = c.lhs.op() == Op::kVar && c.lhs.node().element < 0;
      if (ok) {
        ok = check_var(c.lhs.node(), where);
        if (ok) {
          const VariableSpec* spec = nullptr;
          for (const VariableSpec& v : p_.variables) {
            if (v.name == c.lhs.node().var.name) spec = &v;
          }
          ok = spec && spec->kind == VarKind::kSymmetricMatrix;
        }
      }
      const bool zero_rhs = c.rhs.op() == Op::kConst && c.rhs.node().param.empty() && c.rhs.node().scalar == 0.0;
      if (!ok || !zero_rhs) {
        add("BAD_CONE", where + ": positive-semidefinite constraint needs a symmetric-matrix variable and a zero rhs");
      }
    }
  }

  const Problem& p_;
  std::set<std::string> params_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate(const Problem& p) { return Validator(p).run(); }

void require_valid(const Problem& p) {
  const auto violations = validate(p);
  if (violations.empty()) return;
  std::string msg = violations.front().message;
  std::vector<std::string> codes;
  for (const Violation& v : violations) codes.push_back(v.code);
  if (violations.size() > 1) msg += " (and " + std::to_string(violations.size() - 1) + " more)";
  throw ValidationError(msg, std::move(codes));
}

// ---------------------------------------------------------------------------
// Sense and constraint views

Expr negate(const Expr& e) {
  if (e.op() == Op::kNeg) return e.args().front();
  if (e.op() == Op::kConst && e.node().param.empty()) return Expr::constant(-e.node().scalar);
  return Expr::neg(e);
}

Expr subtract(const Expr& a, const Expr& b) {
  if (b.op() == Op::kConst && b.node().param.empty() && b.node().scalar == 0.0) return a;
  return Expr::add(a, negate(b));
}

Problem canonical_sense(const Problem& p) {
  if (p.sense == Sense::kMinimize) return p;
  Problem out = p;
  out.sense = Sense::kMinimize;
  out.objective = negate(p.objective);
  out.value_negated = !p.value_negated;
  return out;
}

Expr min_objective(const Problem& p) { return p.sense == Sense::kMinimize ? p.objective : negate(p.objective); }

std::vector<NormalizedConstraint> normalize_constraints(const Problem& p) {
  using Kind = NormalizedConstraint::Kind;
  std::vector<NormalizedConstraint> out;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const Constraint& c = p.constraints[i];
    NormalizedConstraint nc;
    nc.source = static_cast<int>(i);
    if (c.cone == Cone::kPositiveSemidefinite) {
      nc.kind = Kind::kPsd;
      nc.matrix = c.lhs.node().var;
    } else if (c.cone == Cone::kSecondOrder || (c.relation == Relation::kLe && c.lhs.op() == Op::kNorm2) ||
               (c.relation == Relation::kGe && c.rhs.op() == Op::kNorm2)) {
      nc.kind = Kind::kSecondOrder;
      const bool flipped = c.relation == Relation::kGe;
      nc.norm = flipped ? c.rhs : c.lhs;
      nc.bound = flipped ? c.lhs : c.rhs;
      nc.g = subtract(nc.norm, nc.bound);
    } else if (c.relation == Relation::kEq) {
      nc.kind = Kind::kEquality;
      nc.g = subtract(c.lhs, c.rhs);
    } else {
      nc.kind = Kind::kInequality;
      nc.g = c.relation == Relation::kGe ? subtract(c.rhs, c.lhs) : subtract(c.lhs, c.rhs);
    }
    out.push_back(std::move(nc));
  }
  return out;
}

std::vector<Expr> inequality_system(const Problem& p) {
  std::vector<Expr> gs;
  for (const NormalizedConstraint& c : normalize_constraints(p)) {
    switch (c.kind) {
      case NormalizedConstraint::Kind::kInequality:
      case NormalizedConstraint::Kind::kSecondOrder:
        gs.push_back(c.g);
        break;
      case NormalizedConstraint::Kind::kEquality:
        gs.push_back(c.g);
        gs.push_back(negate(c.g));
        break;
      case NormalizedConstraint::Kind::kPsd:
        throw InapplicableError("NotApplicable", "semidefinite constraints have no scalar multiplier system");
    }
  }
  const auto slots = p.slots();
  for (std::size_t v = 0; v < p.variables.size(); ++v) {
    if (p.variables[v].domain == VarDomain::kFree) continue;
    for (int j = 0; j < slots[v].size; ++j) gs.push_back(Expr::neg(Expr::element(slots[v], j)));
  }
  return gs;
}

double max_violation(const Problem& p, const Vec& x) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const ParamMap params = p.param_map();
  double worst = 0.0;
  const auto slots = p.slots();
  for (std::size_t v = 0; v < p.variables.size(); ++v) {
    if (p.variables[v].domain == VarDomain::kFree) continue;
    for (int j = 0; j < slots[v].size; ++j) {
      const double xj = x(slots[v].offset + j);
      if (p.variables[v].domain == VarDomain::kStrictlyPositive && xj <= 0) return kInf;
      worst = std::max(worst, -xj);
    }
  }
  try {
    for (const NormalizedConstraint& c : normalize_constraints(p)) {
      switch (c.kind) {
        case NormalizedConstraint::Kind::kInequality:
        case NormalizedConstraint::Kind::kSecondOrder:
          worst = std::max(worst, eval(c.g, x, params));
          break;
        case NormalizedConstraint::Kind::kEquality:
          worst = std::max(worst, std::abs(eval(c.g, x, params)));
          break;
        case NormalizedConstraint::Kind::kPsd: {
          const int n = static_cast<int>(std::lround(std::sqrt(c.matrix.size)));
          Mat m(n, n);
          for (int r = 0; r < n; ++r) {
            for (int col = 0; col < n; ++col) m(r, col) = x(c.matrix.offset + r * n + col);
          }
          const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
          worst = std::max({worst, asym, -jacobi_eigenvalues(m)(0)});
          break;
        }
      }
    }
  } catch (const DomainError&) {
    return kInf;
  }
  return worst;
}

bool is_feasible(const Problem& p, const Vec& x, double tol) { return max_violation(p, x) <= tol; }

double objective_value(const Problem& p, const Vec& x) { return eval(p.objective, x, p.param_map()); }

}  // namespace ontopt
