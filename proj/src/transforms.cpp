#include "ontopt/transforms.hpp"

#include <cmath>
#include <sstream>

#include "ontopt/errors.hpp"

namespace ontopt {

namespace {

PointMap identity_map() {
  return {"identity", [](const Vec& x) { return x; }};
}

bool is_zero_const(const Expr& e) {
  return e.op() == Op::kConst && e.node().param.empty() && e.node().scalar == 0.0;
}

std::string fresh_name(const Problem& p, const std::string& base) {
  std::string name = base;
  for (int k = 1; p.slot(name) || [&] {
         for (const auto& [n, v] : p.parameters) {
           if (n == name) return true;
         }
         return false;
       }();
       ++k) {
    name = base + std::to_string(k);
  }
  return name;
}

}  // namespace

double ValueMap::apply(double v) const {
  for (const ValueStep& s : steps) {
    switch (s.kind) {
      case ValueStep::Kind::kNegate:
        v = -v;
        break;
      case ValueStep::Kind::kAdd:
        v += s.constant;
        break;
      case ValueStep::Kind::kSqrt:
        v = std::sqrt(std::max(v, 0.0));
        break;
      case ValueStep::Kind::kExp:
        v = std::exp(v);
        break;
      case ValueStep::Kind::kLog:
        v = std::log(v);
        break;
    }
  }
  return v;
}

std::string ValueMap::describe() const {
  if (!comparable) return "none";
  if (steps.empty()) return "identity";
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out << " then ";
    switch (steps[i].kind) {
      case ValueStep::Kind::kNegate:
        out << "negate";
        break;
      case ValueStep::Kind::kAdd:
        out << "add " << steps[i].constant;
        break;
      case ValueStep::Kind::kSqrt:
        out << "sqrt";
        break;
      case ValueStep::Kind::kExp:
        out << "exp";
        break;
      case ValueStep::Kind::kLog:
        out << "log";
        break;
    }
  }
  return out.str();
}

ValueMap ValueMap::after(const ValueMap& inner) const {
  ValueMap out;
  out.comparable = comparable && inner.comparable;
  out.steps = inner.steps;
  out.steps.insert(out.steps.end(), steps.begin(), steps.end());
  return out;
}

TransformResult eq_to_ineq_pair(const Problem& p) {
  TransformResult r{"eq2ineq", "equality pair rewrite", p, identity_map(), identity_map(), ValueMap::identity()};
  r.transformed.constraints.clear();
  for (const Constraint& c : p.constraints) {
    if (c.relation != Relation::kEq) {
      r.transformed.constraints.push_back(c);
      continue;
    }
    const Expr h = subtract(c.lhs, c.rhs);
    r.transformed.constraints.push_back({h, Relation::kLe, Expr::constant(0.0), Cone::kNone});
    r.transformed.constraints.push_back({negate(h), Relation::kLe, Expr::constant(0.0), Cone::kNone});
  }
  return r;
}

TransformResult socp_to_lp(const Problem& p) {
  const Classification cls = classify(p);
  if (cls.problem_class != ProblemClass::kSOCP) {
    throw InapplicableError("NotApplicable", std::string("socp2lp needs an SOCP, got ") + class_name(cls.problem_class));
  }
  TransformResult r{"socp2lp", "Proposition 1", p, identity_map(), identity_map(), ValueMap::identity()};
  int cone_index = 0;
  for (const NormalizedConstraint& nc : normalize_constraints(p)) {
    if (nc.kind != NormalizedConstraint::Kind::kSecondOrder) continue;
    ++cone_index;
    const ExprNode& n = nc.norm.node();
    if (!n.mat.isZero(0.0)) {
      throw InapplicableError("NotReducible", "cone constraint " + std::to_string(cone_index) + " has A" +
                                                  std::to_string(cone_index) + " != 0");
    }
    r.transformed.constraints[nc.source] = {Expr::constant(n.vec.norm()), Relation::kLe, nc.bound, Cone::kNone};
  }
  return r;
}

TransformResult gp_log_transform(const Problem& p) {
  const Classification cls = classify(p);
  if (cls.problem_class != ProblemClass::kGP || !cls.evidence.gp) {
    throw InapplicableError("NotGP", "objective, constraints or domains fail the posynomial/monomial pattern");
  }
  const GpData& gp = *cls.evidence.gp;
  TransformResult r;
  r.rule = "gp-log";
  r.certificate = "Lemma 4";
  Problem& t = r.transformed;
  t.sense = Sense::kMinimize;
  t.parameters = p.parameters;
  t.value_negated = p.value_negated;
  for (VariableSpec v : p.variables) {
    v.domain = VarDomain::kFree;
    t.add_variable(std::move(v));
  }
  // log_space_expr builds variable references from t's layout, identical to p's
  t.objective = log_space_expr(gp.objective, t, false);
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    for (std::size_t k = 0; k < gp.inequality_sources.size(); ++k) {
      if (gp.inequality_sources[k] != static_cast<int>(i)) continue;
      const auto& terms = gp.inequalities[k];
      const Expr lhs = log_space_expr(terms, t, true);
      t.constraints.push_back({lhs, Relation::kLe, Expr::constant(terms.size() == 1 ? 0.0 : 1.0), Cone::kNone});
    }
    for (std::size_t k = 0; k < gp.equality_sources.size(); ++k) {
      if (gp.equality_sources[k] != static_cast<int>(i)) continue;
      t.constraints.push_back({log_space_expr({gp.equalities[k]}, t, true), Relation::kEq, Expr::constant(0.0), Cone::kNone});
    }
  }
  r.forward = PointMap{"y = log(x)", [](const Vec& x) { return Vec(x.array().log()); }};
  r.backward = PointMap{"x = exp(y)", [](const Vec& y) { return Vec(y.array().exp()); }};
  r.value_map = ValueMap::identity();
  return r;
}

TransformResult lp_dual(const Problem& p) {
  if (p.sense != Sense::kMaximize) throw InapplicableError("ShapeMismatch", "primal must be a maximization");
  const Classification cls = classify(p);
  if (cls.problem_class != ProblemClass::kLP || !cls.evidence.lp) {
    throw InapplicableError("ShapeMismatch", std::string("primal must be an LP, got ") + class_name(cls.problem_class));
  }
  for (const VariableSpec& v : p.variables) {
    if (v.domain == VarDomain::kStrictlyPositive || v.kind == VarKind::kSymmetricMatrix) {
      throw InapplicableError("ShapeMismatch", "variable '" + v.name + "' is not free or nonnegative");
    }
  }
  const LpData& lp = *cls.evidence.lp;
  const int n = p.dimension();
  for (const LpRow& row : lp.rows) {
    if (row.equality) throw InapplicableError("ShapeMismatch", "primal has equality constraints");
  }

  // A coordinate counts as sign-constrained when its domain is nonnegative or
  // an explicit row reads a·xⱼ ≤ 0 with a < 0.
  std::vector<int> bound_row(n, -1);
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const LpRow& row = lp.rows[i];
    int nz = -1, count = 0;
    for (int j = 0; j < n; ++j) {
      if (row.a(j) != 0.0) {
        nz = j;
        ++count;
      }
    }
    if (count == 1 && row.a(nz) < 0 && row.b == 0.0 && bound_row[nz] < 0) bound_row[nz] = static_cast<int>(i);
  }
  bool symmetric = n > 0;
  for (int j = 0; j < n; ++j) symmetric = symmetric && bound_row[j] >= 0;

  std::vector<const LpRow*> rows;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    bool is_bound = false;
    for (int j = 0; j < n && symmetric; ++j) is_bound = is_bound || bound_row[j] == static_cast<int>(i);
    if (!is_bound) rows.push_back(&lp.rows[i]);
  }
  const int m = static_cast<int>(rows.size());
  if (m == 0) throw InapplicableError("ShapeMismatch", "primal has no constraint rows Ax <= b");

  Mat a(m, n);
  Vec b(m);
  for (int i = 0; i < m; ++i) {
    a.row(i) = rows[i]->a.transpose();
    b(i) = rows[i]->b;
  }
  const Vec c = -lp.c;
  const double c0 = -lp.c0;

  TransformResult r;
  r.rule = "dual";
  r.certificate = symmetric ? "Symmetric dual problem" : "Symmetric dual problem (alternative primal)";
  Problem& d = r.transformed;
  d.sense = Sense::kMinimize;
  const VarSlot y = d.add_variable({"y", VarKind::kVector, m, VarDomain::kNonnegative});
  Expr obj = Expr::dot(b, {Expr::var(y)});
  d.objective = c0 == 0.0 ? obj : Expr::add(obj, Expr::constant(c0));
  for (int j = 0; j < n; ++j) {
    d.constraints.push_back({Expr::dot(a.col(j), {Expr::var(y)}), symmetric ? Relation::kGe : Relation::kEq,
                             Expr::constant(c(j)), Cone::kNone});
  }
  r.value_map = ValueMap::identity();
  return r;
}

TransformResult phase1_slack(const Problem& p) {
  TransformResult r;
  r.rule = "phase1";
  r.certificate = "slack relaxation";
  Problem& t = r.transformed;
  t = p;
  t.constraints.clear();
  t.sense = Sense::kMinimize;
  t.value_negated = false;
  const VarSlot s = t.add_variable({fresh_name(p, "s"), VarKind::kScalar, 1, VarDomain::kFree});
  const Expr sv = Expr::var(s);
  for (const NormalizedConstraint& nc : normalize_constraints(p)) {
    const Constraint& c = p.constraints[nc.source];
    switch (nc.kind) {
      case NormalizedConstraint::Kind::kEquality:
        throw InapplicableError("NotApplicable", "phase1 needs inequalities only; run eq2ineq first");
      case NormalizedConstraint::Kind::kPsd:
        throw InapplicableError("NotApplicable", "phase1 does not relax semidefinite constraints");
      case NormalizedConstraint::Kind::kSecondOrder:
        t.constraints.push_back({nc.norm, Relation::kLe, Expr::add(nc.bound, sv), Cone::kNone});
        break;
      case NormalizedConstraint::Kind::kInequality:
        if (c.relation == Relation::kGe) {
          t.constraints.push_back({Expr::add(c.lhs, sv), Relation::kGe, c.rhs, Cone::kNone});
        } else {
          t.constraints.push_back({c.lhs, Relation::kLe, is_zero_const(c.rhs) ? sv : Expr::add(c.rhs, sv), Cone::kNone});
        }
        break;
    }
  }
  t.objective = sv;
  std::vector<Expr> gs;
  for (const NormalizedConstraint& nc : normalize_constraints(p)) gs.push_back(nc.g);
  const ParamMap params = p.param_map();
  r.forward = PointMap{"s = max_i g_i(x)", [gs, params](const Vec& x) {
                         double worst = gs.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
                         for (const Expr& g : gs) worst = std::max(worst, eval(g, x, params));
                         Vec out(x.size() + 1);
                         out << x, worst;
                         return out;
                       }};
  r.backward = PointMap{"drop s", [](const Vec& z) { return Vec(z.head(z.size() - 1)); }};
  r.value_map = ValueMap::unrelated();
  return r;
}

TransformResult sense_transform(const Problem& p) {
  TransformResult r{"sense", "concave maximization as convex minimization", canonical_sense(p), identity_map(),
                    identity_map(), p.sense == Sense::kMaximize ? ValueMap::negation() : ValueMap::identity()};
  return r;
}

TransformResult least_squares_to_qp(const Problem& p) {
  if (p.sense != Sense::kMinimize || p.objective.op() != Op::kNorm2) {
    throw InapplicableError("NotApplicable", "objective is not a minimized norm2");
  }
  const ExprNode& n = p.objective.node();
  const Mat q = 2.0 * n.mat.transpose() * n.mat;
  const Vec c = 2.0 * n.mat.transpose() * n.vec;
  TransformResult r;
  r.rule = "least-squares";
  r.certificate = "Proposition 2";
  r.transformed = p;
  Expr obj = Expr::quad(q, n.args);
  if (!c.isZero(0.0)) obj = Expr::add(obj, Expr::dot(c, n.args));
  r.transformed.objective = obj;
  r.forward = identity_map();
  r.backward = identity_map();
  r.value_map.steps = {{ValueStep::Kind::kAdd, n.vec.squaredNorm()}, {ValueStep::Kind::kSqrt, 0.0}};
  return r;
}

TransformChain compose(const Problem& source, std::vector<TransformResult> steps) {
  TransformChain chain;
  chain.result = steps.empty() ? source : steps.back().transformed;
  std::vector<std::function<Vec(const Vec&)>> fwd, bwd;
  std::string fdesc, bdesc;
  bool have_fwd = true, have_bwd = true;
  for (const TransformResult& s : steps) {
    chain.value_map = chain.value_map.after(s.value_map);
    have_fwd = have_fwd && s.forward.has_value();
    have_bwd = have_bwd && s.backward.has_value();
    if (s.forward) {
      fwd.push_back(s.forward->apply);
      if (s.forward->description != "identity") fdesc += (fdesc.empty() ? "" : " ; ") + s.forward->description;
    }
    if (s.backward) {
      bwd.insert(bwd.begin(), s.backward->apply);
      if (s.backward->description != "identity") bdesc = s.backward->description + (bdesc.empty() ? "" : " ; ") + bdesc;
    }
  }
  if (have_fwd) {
    chain.forward = {fdesc.empty() ? "identity" : fdesc, [fwd](const Vec& x) {
                       Vec y = x;
                       for (const auto& f : fwd) y = f(y);
                       return y;
                     }};
  } else {
    chain.forward = {"none", nullptr};
  }
  if (have_bwd) {
    chain.backward = {bdesc.empty() ? "identity" : bdesc, [bwd](const Vec& y) {
                        Vec x = y;
                        for (const auto& f : bwd) x = f(x);
                        return x;
                      }};
  } else {
    chain.backward = {"none", nullptr};
  }
  chain.steps = std::move(steps);
  chain.classification = classify(chain.result);
  return chain;
}

TransformChain to_convex_min(const Problem& p) {
  std::vector<TransformResult> steps;
  Problem cur = p;
  if (cur.sense == Sense::kMaximize) {
    steps.push_back(sense_transform(cur));
    cur = steps.back().transformed;
  }
  if (cur.objective.op() == Op::kNorm2) {
    steps.push_back(least_squares_to_qp(cur));
    cur = steps.back().transformed;
  }
  Classification cls = classify(cur);
  if (cls.problem_class == ProblemClass::kGP) {
    steps.push_back(gp_log_transform(cur));
    cur = steps.back().transformed;
  } else if (cls.problem_class == ProblemClass::kSOCP) {
    bool reducible = true;
    for (const SocBlock& b : cls.evidence.soc) reducible = reducible && b.a.isZero(0.0);
    if (reducible) {
      steps.push_back(socp_to_lp(cur));
      cur = steps.back().transformed;
    }
  }
  return compose(p, std::move(steps));
}

}  // namespace ontopt
