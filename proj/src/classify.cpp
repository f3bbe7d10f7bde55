#include "ontopt/classify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "ontopt/errors.hpp"

namespace ontopt {

namespace {

using Kind = NormalizedConstraint::Kind;

constexpr std::uint64_t kWitnessSeed = 0x0C1A55;

std::vector<ChainLink> chain_for(ProblemClass c, bool convex, bool reducible_socp) {
  const ChainLink conic{"ConicProgram", "Definition 5"};
  const ChainLink optima{"ConvexOptima", "Definition 1"};
  switch (c) {
    case ProblemClass::kLP:
      return {{"LP", "Lemma 1"}, conic, optima};
    case ProblemClass::kSOCP:
      if (reducible_socp) return {{"SOCP", "Proposition 1"}, {"LP", "Lemma 1"}, conic, optima};
      return {{"SOCP", "Lemma 2"}, conic, optima};
    case ProblemClass::kSDP:
      return {{"SDP", "Lemma 3"}, conic, optima};
    case ProblemClass::kConicProgram:
      return {conic, optima};
    case ProblemClass::kGP:
      return {{"GP", "Lemma 4"}, {"ConvexOptima", "Proposition 2"}};
    case ProblemClass::kQP:
      if (convex) return {{"QP", "Lemma 5"}, optima};
      return {{"QP", "Definition 7"}};
    case ProblemClass::kQCQP:
      if (convex) return {{"QCQP", "Proposition 2"}, optima};
      return {{"QCQP", "Proposition 2"}};
    case ProblemClass::kConvexNLP:
      return {{"ConvexNLP", "Definition 1"}, optima};
    case ProblemClass::kNLP:
      break;
  }
  return {{"NLP", "Definition 8"}};
}

struct Piece {
  NormalizedConstraint nc;
  StructureVerdict sv;
};

class Classifier {
 public:
  explicit Classifier(const Problem& p)
      : p_(p), dim_(p.dimension()), params_(p.param_map()), objective_(min_objective(p)) {
    sobj_ = analyze_structure(objective_, dim_, params_);
    for (NormalizedConstraint& nc : normalize_constraints(p)) {
      has_soc_ |= nc.kind == Kind::kSecondOrder;
      has_psd_ |= nc.kind == Kind::kPsd;
      StructureVerdict sv;
      if (nc.kind == Kind::kInequality || nc.kind == Kind::kEquality) sv = analyze_structure(nc.g, dim_, params_);
      pieces_.push_back({std::move(nc), std::move(sv)});
    }
  }

  Classification run() {
    Classification out;
    if (p_.constraints.empty()) out.flags.push_back("empty-constraints");

    const bool rows_affine = all_rows([](const Piece& pc) { return pc.sv.is_affine; });

    if (has_psd_) {
      if (sobj_.is_affine && rows_affine && soc_affine_bounds()) {
        return finish(out, has_soc_ ? ProblemClass::kConicProgram : ProblemClass::kSDP, Convexity::kConvex);
      }
      return fallback(out);
    }
    if (!has_soc_ && sobj_.is_affine && rows_affine) {
      if (p_.constraints.empty()) out.flags.push_back("LP-with-empty-constraints");
      out.evidence.lp = extract_lp(p_);
      return finish(out, ProblemClass::kLP, Convexity::kConvex);
    }
    if (has_soc_) {
      if (sobj_.is_affine && rows_affine && soc_affine_bounds()) {
        bool reducible = true;
        for (const SocBlock& b : out.evidence.soc = soc_blocks()) reducible &= b.a.isZero(0.0);
        if (reducible) out.flags.push_back("reducible-SOCP");
        return finish(out, ProblemClass::kSOCP, Convexity::kConvex, reducible);
      }
      return fallback(out);
    }

    // Quadratic families. A non-convex quadratic match yields to GP when the
    // problem also fits the posynomial pattern.
    std::optional<ProblemClass> quad_class;
    Convexity quad_convexity = Convexity::kUnknown;
    if (sobj_.is_quadratic) {
      const bool eqs_affine = all_rows([](const Piece& pc) { return pc.nc.kind != Kind::kEquality || pc.sv.is_affine; });
      const bool ineqs_quadratic = all_rows([](const Piece& pc) { return pc.sv.is_quadratic; });
      if (rows_affine) {
        quad_class = ProblemClass::kQP;
      } else if (eqs_affine && ineqs_quadratic) {
        quad_class = ProblemClass::kQCQP;
      }
      if (quad_class) {
        out.evidence.objective_quadratic = sobj_.quadratic;
        quad_convexity = quadratic_convexity(out, *quad_class);
        if (quad_convexity == Convexity::kConvex) return finish(out, *quad_class, quad_convexity);
      }
    }
    if (auto gp = gp_data()) {
      out.evidence.gp = std::move(gp);
      out.evidence.objective_quadratic.reset();
      out.evidence.quadratic_constraints.clear();
      out.evidence.min_eigenvalue.reset();
      return finish(out, ProblemClass::kGP, Convexity::kConvex);
    }
    if (quad_class) return finish(out, *quad_class, quad_convexity);
    return fallback(out);
  }

 private:
  template <typename Pred>
  bool all_rows(Pred pred) const {
    for (const Piece& pc : pieces_) {
      if (pc.nc.kind != Kind::kInequality && pc.nc.kind != Kind::kEquality) continue;
      if (!pred(pc)) return false;
    }
    return true;
  }

  bool soc_affine_bounds() const {
    for (const Piece& pc : pieces_) {
      if (pc.nc.kind != Kind::kSecondOrder) continue;
      if (pc.nc.norm.op() != Op::kNorm2) return false;
      if (!analyze_structure(pc.nc.bound, dim_, params_).is_affine) return false;
    }
    return true;
  }

  std::vector<SocBlock> soc_blocks() const {
    std::vector<SocBlock> out;
    for (const Piece& pc : pieces_) {
      if (pc.nc.kind != Kind::kSecondOrder) continue;
      const ExprNode& n = pc.nc.norm.node();
      SocBlock b;
      b.a = Mat::Zero(n.mat.rows(), dim_);
      for (std::size_t j = 0; j < n.indices.size(); ++j) b.a.col(n.indices[j]) += n.mat.col(static_cast<int>(j));
      b.b = n.vec;
      const StructureVerdict bound = analyze_structure(pc.nc.bound, dim_, params_);
      b.c = bound.quadratic.c;
      b.d = bound.quadratic.k;
      b.source = pc.nc.source;
      out.push_back(std::move(b));
    }
    return out;
  }

  Convexity quadratic_convexity(Classification& out, ProblemClass cls) const {
    const PsdResult obj = psd_check(sobj_.quadratic.q);
    if (!obj.is_psd) {
      out.evidence.min_eigenvalue = obj.min_eigenvalue;
      return Convexity::kNonconvex;
    }
    if (cls == ProblemClass::kQP) return Convexity::kConvex;
    for (const Piece& pc : pieces_) {
      if (pc.nc.kind != Kind::kInequality) continue;
      out.evidence.quadratic_constraints.push_back(pc.sv.quadratic);
      const PsdResult r = psd_check(pc.sv.quadratic.q);
      if (!r.is_psd) {
        out.evidence.min_eigenvalue = r.min_eigenvalue;
        return Convexity::kUnknown;
      }
    }
    return Convexity::kConvex;
  }

  // lhs/rhs posynomial ≤ monomial constraints, monomial equalities, positive
  // orthant, posynomial minimize-sense objective.
  std::optional<GpData> gp_data() const {
    if (p_.variables.empty()) return std::nullopt;
    for (const VariableSpec& v : p_.variables) {
      if (v.domain != VarDomain::kStrictlyPositive || v.kind == VarKind::kSymmetricMatrix) return std::nullopt;
    }
    if (p_.sense != Sense::kMinimize || !sobj_.is_posynomial) return std::nullopt;
    GpData gp;
    gp.objective = sobj_.terms;
    for (std::size_t i = 0; i < p_.constraints.size(); ++i) {
      const Constraint& c = p_.constraints[i];
      if (c.relation == Relation::kInCone) return std::nullopt;
      const Expr& small = c.relation == Relation::kGe ? c.rhs : c.lhs;
      const Expr& big = c.relation == Relation::kGe ? c.lhs : c.rhs;
      const StructureVerdict s = analyze_structure(small, dim_, params_);
      const StructureVerdict b = analyze_structure(big, dim_, params_);
      if (!b.is_monomial || !s.is_posynomial) return std::nullopt;
      if (c.relation == Relation::kEq) {
        if (!s.is_monomial) return std::nullopt;
        gp.equalities.push_back(divide(s.terms, b.terms.front()).front());
        gp.equality_sources.push_back(static_cast<int>(i));
      } else {
        gp.inequalities.push_back(divide(s.terms, b.terms.front()));
        gp.inequality_sources.push_back(static_cast<int>(i));
      }
    }
    return gp;
  }

  static std::vector<MonomialTerm> divide(std::vector<MonomialTerm> terms, const MonomialTerm& by) {
    for (MonomialTerm& t : terms) {
      t.coef /= by.coef;
      t.exponents -= by.exponents;
    }
    return terms;
  }

  Classification& finish(Classification& out, ProblemClass cls, Convexity conv, bool reducible = false) {
    out.problem_class = cls;
    out.convexity = conv;
    out.chain = chain_for(cls, conv == Convexity::kConvex, reducible);
    if (conv != Convexity::kConvex) return out;
    if (cls == ProblemClass::kGP) {
      const GpData& gp = *out.evidence.gp;
      out.certified_convex.push_back(log_space_expr(gp.objective, p_, false));
      for (const auto& t : gp.inequalities) out.certified_convex.push_back(log_space_expr(t, p_, true));
      for (const auto& t : gp.equalities) {
        const Expr e = log_space_expr({t}, p_, true);
        out.certified_convex.push_back(e);
        out.certified_convex.push_back(negate(e));
      }
      return out;
    }
    out.certified_convex.push_back(objective_);
    for (const Piece& pc : pieces_) {
      if (pc.nc.kind == Kind::kPsd) continue;
      out.certified_convex.push_back(pc.nc.g);
      if (pc.nc.kind == Kind::kEquality) out.certified_convex.push_back(negate(pc.nc.g));
    }
    return out;
  }

  Classification fallback(Classification& out) {
    bool convex = curvature(objective_, params_).is_convex();
    for (const Piece& pc : pieces_) {
      switch (pc.nc.kind) {
        case Kind::kInequality:
          convex = convex && curvature(pc.nc.g, params_).is_convex();
          break;
        case Kind::kEquality:
          convex = convex && (pc.sv.is_affine || curvature(pc.nc.g, params_).is_affine());
          break;
        case Kind::kSecondOrder:
          convex = convex && curvature(pc.nc.g, params_).is_convex();
          break;
        case Kind::kPsd:
          break;
      }
    }
    if (convex) return finish(out, ProblemClass::kConvexNLP, Convexity::kConvex);
    if (!has_psd_) out.evidence.chord_witness = chord_witness();
    return finish(out, ProblemClass::kNLP, out.evidence.chord_witness ? Convexity::kNonconvex : Convexity::kUnknown);
  }

  // Searches feasible point pairs whose midpoint lies strictly above the chord
  // of the objective; such a pair refutes convexity.
  std::optional<std::pair<Vec, Vec>> chord_witness() const {
    std::mt19937_64 rng(kWitnessSeed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::pair<double, double>> box;
    for (const VariableSpec& v : p_.variables) {
      const std::pair<double, double> range = v.domain == VarDomain::kFree ? std::pair{-3.0, 3.0} : std::pair{1e-3, 3.0};
      for (int j = 0; j < v.flat_size(); ++j) box.push_back(range);
    }
    auto value = [&](const Vec& x) -> std::optional<double> {
      if (max_violation(p_, x) > 1e-9) return std::nullopt;
      try {
        return eval(objective_, x, params_);
      } catch (const Error&) {
        return std::nullopt;
      }
    };
    for (int trial = 0; trial < 4000; ++trial) {
      Vec u(dim_), v(dim_);
      const double spread = trial % 2 == 0 ? 1.0 : 0.05;
      for (int j = 0; j < dim_; ++j) {
        const auto [lo, hi] = box[j];
        u(j) = lo + (hi - lo) * unit(rng);
        v(j) = std::clamp(u(j) + spread * (hi - lo) * (unit(rng) - 0.5), lo, hi);
      }
      const auto fu = value(u), fv = value(v), fm = value(0.5 * (u + v));
      if (!fu || !fv || !fm) continue;
      const double chord = 0.5 * (*fu + *fv);
      if (*fm > chord + 1e-9 * (1.0 + std::abs(chord))) return std::pair{u, v};
    }
    return std::nullopt;
  }

  const Problem& p_;
  int dim_;
  ParamMap params_;
  Expr objective_;
  StructureVerdict sobj_;
  std::vector<Piece> pieces_;
  bool has_soc_ = false;
  bool has_psd_ = false;
};

}  // namespace

const char* class_name(ProblemClass c) {
  switch (c) {
    case ProblemClass::kLP:
      return "LP";
    case ProblemClass::kQP:
      return "QP";
    case ProblemClass::kQCQP:
      return "QCQP";
    case ProblemClass::kSOCP:
      return "SOCP";
    case ProblemClass::kSDP:
      return "SDP";
    case ProblemClass::kConicProgram:
      return "ConicProgram";
    case ProblemClass::kGP:
      return "GP";
    case ProblemClass::kConvexNLP:
      return "ConvexNLP";
    case ProblemClass::kNLP:
      break;
  }
  return "NLP";
}

const char* convexity_name(Convexity c) {
  switch (c) {
    case Convexity::kConvex:
      return "convex";
    case Convexity::kNonconvex:
      return "nonconvex";
    case Convexity::kUnknown:
      break;
  }
  return "unknown";
}

Classification classify(const Problem& p) { return Classifier(p).run(); }

std::string ontology_chain(const Classification& c) {
  std::string out;
  for (const ChainLink& link : c.chain) out += link.node + " [" + link.justification + "]\n";
  return out;
}

std::string chain_summary(const Classification& c) {
  std::string out;
  for (std::size_t i = 0; i < c.chain.size(); ++i) {
    if (i) out += " ⊨ ";
    out += c.chain[i].node;
  }
  if (!c.chain.empty()) out += " [" + c.chain.front().justification + "]";
  return out;
}

std::string verdict_summary(const Classification& c) {
  std::ostringstream out;
  out << class_name(c.problem_class) << ", " << convexity_name(c.convexity);
  if (c.convexity != Convexity::kConvex && c.evidence.min_eigenvalue) {
    out << " (min eig " << *c.evidence.min_eigenvalue << ")";
  }
  return out.str();
}

Expr log_space_expr(const std::vector<MonomialTerm>& terms, const Problem& p, bool affine_single) {
  auto affine = [&](const MonomialTerm& t) {
    const Expr lc = Expr::constant(std::log(t.coef));
    if (t.exponents.isZero(0.0)) return lc;
    const Expr d = Expr::dot(t.exponents, p.all_variable_refs());
    return t.coef == 1.0 ? d : Expr::add(d, lc);
  };
  if (affine_single && terms.size() == 1) return affine(terms.front());
  std::vector<Expr> exps;
  for (const MonomialTerm& t : terms) exps.push_back(Expr::exp(affine(t)));
  return Expr::sum(std::move(exps));
}

std::optional<LpData> extract_lp(const Problem& p) {
  const int dim = p.dimension();
  const ParamMap params = p.param_map();
  const StructureVerdict obj = analyze_structure(min_objective(p), dim, params);
  if (!obj.is_affine) return std::nullopt;
  LpData lp;
  lp.c = obj.quadratic.c;
  lp.c0 = obj.quadratic.k;
  for (const NormalizedConstraint& nc : normalize_constraints(p)) {
    if (nc.kind != Kind::kInequality && nc.kind != Kind::kEquality) return std::nullopt;
    const StructureVerdict s = analyze_structure(nc.g, dim, params);
    if (!s.is_affine) return std::nullopt;
    lp.rows.push_back({s.quadratic.c, -s.quadratic.k, nc.kind == Kind::kEquality, -1});
  }
  const auto slots = p.slots();
  for (std::size_t v = 0; v < p.variables.size(); ++v) {
    if (p.variables[v].domain == VarDomain::kFree) continue;
    for (int j = 0; j < slots[v].size; ++j) {
      const int idx = slots[v].offset + j;
      Vec a = Vec::Zero(dim);
      a(idx) = -1.0;
      lp.rows.push_back({a, 0.0, false, idx});
    }
  }
  return lp;
}

}  // namespace ontopt
