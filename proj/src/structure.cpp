#include <cmath>

#include "ontopt/errors.hpp"
#include "ontopt/expr.hpp"

namespace ontopt {

namespace {

using Terms = std::vector<MonomialTerm>;

bool is_integer(double p) { return std::floor(p) == p && std::abs(p) < 1e15; }

// Value of a subtree that references no variables.
std::optional<double> constant_value(const Expr& e, const ParamMap& params) {
  if (e.min_dimension() > 0) return std::nullopt;
  try {
    return eval(e, Vec(), params);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<double> scale_coef(const ExprNode& n, const ParamMap& params) {
  if (n.param.empty()) return n.scalar;
  auto it = params.find(n.param);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

class Extractor {
 public:
  Extractor(int dim, const ParamMap& params) : dim_(dim), params_(params) {}

  std::optional<QuadraticForm> quadratic(const Expr& e) const {
    const ExprNode& n = e.node();
    if (auto k = constant_value(e, params_)) return constant_form(*k);
    switch (n.op) {
      case Op::kVar: {
        if (e.width() != 1) return std::nullopt;
        QuadraticForm f = constant_form(0.0);
        f.c(n.var.offset + std::max(n.element, 0)) = 1.0;
        return f;
      }
      case Op::kAdd:
      case Op::kSum: {
        QuadraticForm f = constant_form(0.0);
        for (const Expr& a : n.args) {
          auto g = quadratic(a);
          if (!g) return std::nullopt;
          f.q += g->q;
          f.c += g->c;
          f.k += g->k;
        }
        return f;
      }
      case Op::kNeg:
        return scaled(quadratic(n.args.at(0)), -1.0);
      case Op::kScale: {
        auto c = scale_coef(n, params_);
        if (!c) return std::nullopt;
        return scaled(quadratic(n.args.at(0)), *c);
      }
      case Op::kDot: {
        if (!payload_ok(n, static_cast<int>(n.vec.size()))) return std::nullopt;
        QuadraticForm f = constant_form(0.0);
        for (std::size_t i = 0; i < n.indices.size(); ++i) f.c(n.indices[i]) += n.vec(static_cast<int>(i));
        return f;
      }
      case Op::kQuad: {
        if (n.mat.rows() != n.mat.cols() || !payload_ok(n, static_cast<int>(n.mat.rows()))) return std::nullopt;
        QuadraticForm f = constant_form(0.0);
        scatter(f.q, n.indices, n.mat);
        return f;
      }
      case Op::kNorm2:
        return std::nullopt;  // A = 0 handled by constant_value
      case Op::kPow:
        return power(n);
      case Op::kMonomial:
        return monomial(n);
      default:
        return std::nullopt;
    }
  }

  std::optional<Terms> posynomial(const Expr& e) const {
    const ExprNode& n = e.node();
    if (auto k = constant_value(e, params_)) {
      if (*k < 0) return std::nullopt;
      if (*k == 0) return Terms{};
      return Terms{{*k, Vec::Zero(dim_)}};
    }
    switch (n.op) {
      case Op::kVar: {
        if (e.width() != 1) return std::nullopt;
        MonomialTerm t{1.0, Vec::Zero(dim_)};
        t.exponents(n.var.offset + std::max(n.element, 0)) = 1.0;
        return Terms{t};
      }
      case Op::kAdd:
      case Op::kSum: {
        Terms out;
        for (const Expr& a : n.args) {
          auto t = posynomial(a);
          if (!t) return std::nullopt;
          for (MonomialTerm& m : *t) merge(out, std::move(m));
        }
        return out;
      }
      case Op::kNeg: {
        auto t = posynomial(n.args.at(0));
        if (t && t->empty()) return t;
        return std::nullopt;
      }
      case Op::kScale: {
        auto c = scale_coef(n, params_);
        auto t = posynomial(n.args.at(0));
        if (!c || !t) return std::nullopt;
        if (*c == 0.0 || t->empty()) return Terms{};
        if (*c < 0) return std::nullopt;
        for (MonomialTerm& m : *t) m.coef *= *c;
        return t;
      }
      case Op::kDot: {
        if (!payload_ok(n, static_cast<int>(n.vec.size())) || (n.vec.array() < 0).any()) return std::nullopt;
        Terms out;
        for (std::size_t i = 0; i < n.indices.size(); ++i) {
          const double c = n.vec(static_cast<int>(i));
          if (c == 0) continue;
          MonomialTerm t{c, Vec::Zero(dim_)};
          t.exponents(n.indices[i]) = 1.0;
          merge(out, std::move(t));
        }
        return out;
      }
      case Op::kQuad: {
        if (n.mat.rows() != n.mat.cols() || !payload_ok(n, static_cast<int>(n.mat.rows())) || (n.mat.array() < 0).any()) {
          return std::nullopt;
        }
        Terms out;
        for (int i = 0; i < n.mat.rows(); ++i) {
          for (int j = 0; j < n.mat.cols(); ++j) {
            if (n.mat(i, j) == 0) continue;
            MonomialTerm t{0.5 * n.mat(i, j), Vec::Zero(dim_)};
            t.exponents(n.indices[i]) += 1.0;
            t.exponents(n.indices[j]) += 1.0;
            merge(out, std::move(t));
          }
        }
        return out;
      }
      case Op::kPow: {
        auto t = posynomial(n.args.at(0));
        if (!t || t->empty()) return std::nullopt;
        const double p = n.scalar;
        if (t->size() == 1) {
          MonomialTerm m = t->front();
          m.coef = std::pow(m.coef, p);
          m.exponents *= p;
          return Terms{m};
        }
        if (!is_integer(p) || p < 1 || p > 4) return std::nullopt;
        Terms acc = *t;
        for (int k = 1; k < static_cast<int>(p); ++k) acc = multiply(acc, *t);
        return acc;
      }
      case Op::kMonomial: {
        if (!payload_ok(n, static_cast<int>(n.vec.size())) || !(n.scalar > 0)) return std::nullopt;
        MonomialTerm t{n.scalar, Vec::Zero(dim_)};
        for (std::size_t i = 0; i < n.indices.size(); ++i) t.exponents(n.indices[i]) += n.vec(static_cast<int>(i));
        return Terms{t};
      }
      default:
        return std::nullopt;
    }
  }

 private:
  QuadraticForm constant_form(double k) const { return {Mat::Zero(dim_, dim_), Vec::Zero(dim_), k}; }

  bool payload_ok(const ExprNode& n, int expected) const {
    if (static_cast<int>(n.indices.size()) != expected || expected == 0) return false;
    for (int i : n.indices) {
      if (i >= dim_) return false;
    }
    return true;
  }

  static std::optional<QuadraticForm> scaled(std::optional<QuadraticForm> f, double c) {
    if (!f) return f;
    f->q *= c;
    f->c *= c;
    f->k *= c;
    return f;
  }

  static void scatter(Mat& q, const std::vector<int>& idx, const Mat& local) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) q(idx[i], idx[j]) += local(static_cast<int>(i), static_cast<int>(j));
    }
  }

  std::optional<QuadraticForm> power(const ExprNode& n) const {
    const double p = n.scalar;
    const Expr& base = n.args.at(0);
    if (p == 1.0) return quadratic(base);
    if (p != 2.0) return std::nullopt;
    if (base.op() == Op::kNorm2) {
      const ExprNode& b = base.node();
      if (b.vec.size() != b.mat.rows() || !payload_ok(b, static_cast<int>(b.mat.cols()))) return std::nullopt;
      QuadraticForm f = constant_form(b.vec.squaredNorm());
      scatter(f.q, b.indices, 2.0 * b.mat.transpose() * b.mat);
      const Vec lin = 2.0 * b.mat.transpose() * b.vec;
      for (std::size_t i = 0; i < b.indices.size(); ++i) f.c(b.indices[i]) += lin(static_cast<int>(i));
      return f;
    }
    auto a = quadratic(base);
    if (!a || !a->q.isZero(0.0)) return std::nullopt;
    // (cᵀx + k)² = ½xᵀ(2ccᵀ)x + 2k·cᵀx + k²
    return QuadraticForm{2.0 * a->c * a->c.transpose(), 2.0 * a->k * a->c, a->k * a->k};
  }

  std::optional<QuadraticForm> monomial(const ExprNode& n) const {
    if (!payload_ok(n, static_cast<int>(n.vec.size()))) return std::nullopt;
    Vec deg = Vec::Zero(dim_);
    for (std::size_t i = 0; i < n.indices.size(); ++i) deg(n.indices[i]) += n.vec(static_cast<int>(i));
    double total = 0;
    for (int i = 0; i < dim_; ++i) {
      if (deg(i) < 0 || !is_integer(deg(i))) return std::nullopt;
      total += deg(i);
    }
    if (total > 2) return std::nullopt;
    QuadraticForm f = constant_form(0.0);
    std::vector<int> vars;
    for (int i = 0; i < dim_; ++i) {
      for (int k = 0; k < static_cast<int>(deg(i)); ++k) vars.push_back(i);
    }
    const double c = n.scalar;
    if (vars.empty()) {
      f.k = c;
    } else if (vars.size() == 1) {
      f.c(vars[0]) = c;
    } else {
      f.q(vars[0], vars[1]) += c;
      f.q(vars[1], vars[0]) += c;
    }
    return f;
  }

  static void merge(Terms& terms, MonomialTerm t) {
    if (t.coef == 0) return;
    for (MonomialTerm& m : terms) {
      if (m.exponents == t.exponents) {
        m.coef += t.coef;
        return;
      }
    }
    terms.push_back(std::move(t));
  }

  static Terms multiply(const Terms& a, const Terms& b) {
    Terms out;
    for (const MonomialTerm& x : a) {
      for (const MonomialTerm& y : b) merge(out, {x.coef * y.coef, x.exponents + y.exponents});
    }
    return out;
  }

  int dim_;
  const ParamMap& params_;
};

}  // namespace

StructureVerdict analyze_structure(const Expr& expr, int dim, const ParamMap& params) {
  StructureVerdict v;
  Extractor ex(dim, params);
  if (auto q = ex.quadratic(expr)) {
    v.is_quadratic = true;
    v.is_affine = q->q.isZero(0.0);
    v.quadratic = std::move(*q);
  }
  if (auto t = ex.posynomial(expr); t && !t->empty()) {
    v.is_posynomial = true;
    v.is_monomial = t->size() == 1;
    v.terms = std::move(*t);
  }
  return v;
}

double eval_terms(const std::vector<MonomialTerm>& terms, const Vec& point) {
  double total = 0.0;
  for (const MonomialTerm& t : terms) {
    double v = t.coef;
    for (int i = 0; i < t.exponents.size(); ++i) {
      if (t.exponents(i) == 0) continue;
      if (!(point(i) > 0)) throw DomainError("posynomial at a non-positive coordinate");
      v *= std::pow(point(i), t.exponents(i));
    }
    total += v;
  }
  return total;
}

}  // namespace ontopt
