#include <cmath>

#include "ontopt/expr.hpp"
#include "ontopt/linalg.hpp"

namespace ontopt {

namespace {

enum class Sign { kNonneg, kNonpos, kUnknown };

struct Fact {
  Curvature curv = Curvature::kUnknown;
  Sign sign = Sign::kUnknown;
};

bool convexish(Curvature c) { return c == Curvature::kConstant || c == Curvature::kAffine || c == Curvature::kConvex; }
bool concaveish(Curvature c) { return c == Curvature::kConstant || c == Curvature::kAffine || c == Curvature::kConcave; }
bool affineish(Curvature c) { return c == Curvature::kConstant || c == Curvature::kAffine; }

Curvature flip(Curvature c) {
  if (c == Curvature::kConvex) return Curvature::kConcave;
  if (c == Curvature::kConcave) return Curvature::kConvex;
  return c;
}

Sign flip(Sign s) {
  if (s == Sign::kNonneg) return Sign::kNonpos;
  if (s == Sign::kNonpos) return Sign::kNonneg;
  return s;
}

Sign sign_of(double v) { return v >= 0 ? Sign::kNonneg : Sign::kNonpos; }

bool is_integer(double p) { return std::floor(p) == p && std::abs(p) < 1e15; }

class Analyzer {
 public:
  Analyzer(const ParamMap& params, std::vector<std::string>& rules) : params_(params), rules_(rules) {}

  Fact run(const Expr& e) {
    const ExprNode& n = e.node();
    switch (n.op) {
      case Op::kConst: {
        if (!n.param.empty()) {
          auto it = params_.find(n.param);
          return note("const:param", {Curvature::kConstant, it == params_.end() ? Sign::kUnknown : sign_of(it->second)});
        }
        return note("const", {Curvature::kConstant, sign_of(n.scalar)});
      }
      case Op::kVar:
        if (e.width() != 1) return note("var:vector-as-scalar", {});
        return note("var:affine", {Curvature::kAffine, Sign::kUnknown});
      case Op::kAdd:
      case Op::kSum: {
        std::vector<Fact> facts;
        for (const Expr& a : n.args) facts.push_back(run(a));
        return note("sum", combine_sum(facts));
      }
      case Op::kNeg: {
        const Fact f = run(n.args.at(0));
        return note("neg:flip", {flip(f.curv), flip(f.sign)});
      }
      case Op::kScale: {
        const Fact f = run(n.args.at(0));
        std::optional<double> c;
        if (n.param.empty()) {
          c = n.scalar;
        } else if (auto it = params_.find(n.param); it != params_.end()) {
          c = it->second;
        }
        if (!c) {
          if (affineish(f.curv)) return note("scale:param-affine", {f.curv, Sign::kUnknown});
          return note("scale:param-unknown-sign", {});
        }
        if (*c == 0.0) return note("scale:zero", {Curvature::kConstant, Sign::kNonneg});
        if (*c > 0) return note("scale:positive", f);
        return note("scale:negative", {flip(f.curv), flip(f.sign)});
      }
      case Op::kDot:
        if (n.vec.size() > 0 && n.vec.isZero(0.0)) return note("dot:zero", {Curvature::kConstant, Sign::kNonneg});
        return note("dot:affine", {Curvature::kAffine, Sign::kUnknown});
      case Op::kQuad: {
        if (n.mat.rows() != n.mat.cols() || n.mat.size() == 0) return note("quad:malformed", {});
        if (n.mat.isZero(0.0)) return note("quad:zero", {Curvature::kConstant, Sign::kNonneg});
        if (psd_check(n.mat).is_psd) return note("quad:psd", {Curvature::kConvex, Sign::kNonneg});
        if (psd_check(-n.mat).is_psd) return note("quad:nsd", {Curvature::kConcave, Sign::kNonpos});
        return note("quad:indefinite", {});
      }
      case Op::kNorm2:
        if (n.mat.size() == 0 || n.mat.isZero(0.0)) return note("norm2:constant", {Curvature::kConstant, Sign::kNonneg});
        return note("norm2:convex", {Curvature::kConvex, Sign::kNonneg});
      case Op::kExp: {
        const Fact f = run(n.args.at(0));
        if (f.curv == Curvature::kConstant) return note("exp:constant", {Curvature::kConstant, Sign::kNonneg});
        if (convexish(f.curv)) return note("exp:convex-arg", {Curvature::kConvex, Sign::kNonneg});
        return note("exp:unknown", {Curvature::kUnknown, Sign::kNonneg});
      }
      case Op::kLog: {
        const Fact f = run(n.args.at(0));
        if (f.curv == Curvature::kConstant) return note("log:constant", {Curvature::kConstant, Sign::kUnknown});
        if (concaveish(f.curv)) return note("log:concave-arg", {Curvature::kConcave, Sign::kUnknown});
        return note("log:unknown", {});
      }
      case Op::kPow:
        return pow_rule(run(n.args.at(0)), n.scalar);
      case Op::kMonomial:
        return monomial_rule(n);
    }
    return {};
  }

 private:
  Fact note(const char* rule, Fact f) {
    rules_.emplace_back(rule);
    return f;
  }

  static Fact combine_sum(const std::vector<Fact>& facts) {
    bool all_const = true, all_affine = true, all_convex = true, all_concave = true;
    bool all_nonneg = true, all_nonpos = true;
    for (const Fact& f : facts) {
      all_const &= f.curv == Curvature::kConstant;
      all_affine &= affineish(f.curv);
      all_convex &= convexish(f.curv);
      all_concave &= concaveish(f.curv);
      all_nonneg &= f.sign == Sign::kNonneg;
      all_nonpos &= f.sign == Sign::kNonpos;
    }
    Fact out;
    out.sign = all_nonneg ? Sign::kNonneg : (all_nonpos ? Sign::kNonpos : Sign::kUnknown);
    if (all_const) {
      out.curv = Curvature::kConstant;
    } else if (all_affine) {
      out.curv = Curvature::kAffine;
    } else if (all_convex) {
      out.curv = Curvature::kConvex;
    } else if (all_concave) {
      out.curv = Curvature::kConcave;
    }
    return out;
  }

  // Domains: integer p ≥ 0 on ℝ; fractional p > 0 needs base ≥ 0; p < 0 needs
  // base > 0. Every convex/concave claim below holds on a convex domain.
  Fact pow_rule(const Fact& u, double p) {
    if (p == 0.0) return note("pow:zero-exponent", {Curvature::kConstant, Sign::kNonneg});
    if (p == 1.0) return note("pow:identity", u);
    const bool even = is_integer(p) && std::fmod(p, 2.0) == 0.0;
    const Sign out_sign = (even || !is_integer(p) || p < 0 || u.sign == Sign::kNonneg) ? Sign::kNonneg : Sign::kUnknown;
    if (u.curv == Curvature::kConstant) return note("pow:constant", {Curvature::kConstant, out_sign});
    if (p > 1.0) {
      if (even) {
        if (affineish(u.curv)) return note("pow:even-of-affine", {Curvature::kConvex, Sign::kNonneg});
        if (u.curv == Curvature::kConvex && u.sign == Sign::kNonneg) return note("pow:even-of-nonneg-convex", {Curvature::kConvex, Sign::kNonneg});
        if (u.curv == Curvature::kConcave && u.sign == Sign::kNonpos) return note("pow:even-of-nonpos-concave", {Curvature::kConvex, Sign::kNonneg});
        return note("pow:unknown", {Curvature::kUnknown, Sign::kNonneg});
      }
      if (!is_integer(p) && affineish(u.curv)) return note("pow:fractional-of-affine", {Curvature::kConvex, Sign::kNonneg});
      if (u.curv == Curvature::kConvex && u.sign == Sign::kNonneg) return note("pow:of-nonneg-convex", {Curvature::kConvex, Sign::kNonneg});
      return note("pow:unknown", {Curvature::kUnknown, out_sign});
    }
    if (p > 0.0) {
      if (concaveish(u.curv)) return note("pow:root-of-concave", {Curvature::kConcave, Sign::kNonneg});
      return note("pow:unknown", {Curvature::kUnknown, Sign::kNonneg});
    }
    if (concaveish(u.curv)) return note("pow:negative-of-concave", {Curvature::kConvex, Sign::kNonneg});
    return note("pow:unknown", {Curvature::kUnknown, Sign::kNonneg});
  }

  // Hessian of c·∏xᵢ^aᵢ is c·D(aaᵀ − diag(a))D with D = diag(1/x) > 0, so the
  // sign of aaᵀ − diag(a) decides curvature exactly.
  Fact monomial_rule(const ExprNode& n) {
    if (n.vec.size() == 0 || static_cast<int>(n.indices.size()) != n.vec.size()) return note("monomial:malformed", {});
    if (n.scalar == 0.0 || n.vec.isZero(0.0)) return note("monomial:constant", {Curvature::kConstant, sign_of(n.scalar)});
    const Mat m = n.vec * n.vec.transpose() - Mat(n.vec.asDiagonal());
    Curvature c = Curvature::kUnknown;
    if (psd_check(m).is_psd) {
      c = Curvature::kConvex;
    } else if (psd_check(-m).is_psd) {
      c = Curvature::kConcave;
    }
    if (n.scalar > 0) return note("monomial:exponent-matrix", {c, Sign::kNonneg});
    return note("monomial:negative-coef", {flip(c), Sign::kNonpos});
  }

  const ParamMap& params_;
  std::vector<std::string>& rules_;
};

}  // namespace

const char* curvature_name(Curvature c) {
  switch (c) {
    case Curvature::kConstant:
      return "constant";
    case Curvature::kAffine:
      return "affine";
    case Curvature::kConvex:
      return "convex";
    case Curvature::kConcave:
      return "concave";
    case Curvature::kUnknown:
      break;
  }
  return "unknown";
}

bool CurvatureVerdict::is_convex() const { return convexish(curvature); }
bool CurvatureVerdict::is_concave() const { return concaveish(curvature); }
bool CurvatureVerdict::is_affine() const { return affineish(curvature); }

CurvatureVerdict curvature(const Expr& expr, const ParamMap& params) {
  CurvatureVerdict v;
  Analyzer a(params, v.rules);
  v.curvature = a.run(expr).curv;
  return v;
}

}  // namespace ontopt
