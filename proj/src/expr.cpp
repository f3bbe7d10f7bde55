#include "ontopt/expr.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "ontopt/errors.hpp"

namespace ontopt {

namespace {

constexpr const char* kOpNames[] = {"const", "var", "add",  "neg", "scale",    "dot", "quad",
                                    "norm2", "exp", "log",  "pow", "monomial", "sum"};

WarningHandler& warning_handler() {
  static WarningHandler handler = [](const std::string& msg) { std::cerr << "warning: " << msg << "\n"; };
  return handler;
}

void warn(const std::string& msg) {
  if (warning_handler()) warning_handler()(msg);
}

std::vector<int> gather_indices(const std::vector<Expr>& vars) {
  std::vector<int> idx;
  for (const Expr& v : vars) {
    if (v.op() != Op::kVar) return {};
    const ExprNode& n = v.node();
    if (n.element >= 0) {
      idx.push_back(n.var.offset + n.element);
    } else {
      for (int i = 0; i < n.var.size; ++i) idx.push_back(n.var.offset + i);
    }
  }
  return idx;
}

bool is_integer(double p) { return std::floor(p) == p && std::abs(p) < 1e15; }

}  // namespace

const char* op_name(Op op) { return kOpNames[static_cast<int>(op)]; }

std::optional<Op> op_from_name(const std::string& name) {
  for (int i = 0; i < static_cast<int>(std::size(kOpNames)); ++i) {
    if (name == kOpNames[i]) return static_cast<Op>(i);
  }
  return std::nullopt;
}

WarningHandler set_warning_handler(WarningHandler handler) {
  WarningHandler old = std::move(warning_handler());
  warning_handler() = std::move(handler);
  return old;
}

Expr Expr::make(ExprNode node) { return Expr(std::make_shared<const ExprNode>(std::move(node))); }

Expr Expr::constant(double value) {
  ExprNode n;
  n.op = Op::kConst;
  n.scalar = value;
  return make(std::move(n));
}

Expr Expr::parameter(std::string name) {
  ExprNode n;
  n.op = Op::kConst;
  n.param = std::move(name);
  return make(std::move(n));
}

Expr Expr::var(const VarSlot& slot) {
  ExprNode n;
  n.op = Op::kVar;
  n.var = slot;
  return make(std::move(n));
}

Expr Expr::element(const VarSlot& slot, int index) {
  ExprNode n;
  n.op = Op::kVar;
  n.var = slot;
  n.element = index;
  return make(std::move(n));
}

Expr Expr::add(Expr a, Expr b) {
  ExprNode n;
  n.op = Op::kAdd;
  n.args = {std::move(a), std::move(b)};
  return make(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  ExprNode n;
  n.op = Op::kSum;
  n.args = std::move(terms);
  return make(std::move(n));
}

Expr Expr::neg(Expr a) {
  ExprNode n;
  n.op = Op::kNeg;
  n.args = {std::move(a)};
  return make(std::move(n));
}

Expr Expr::scale(double coef, Expr a) {
  ExprNode n;
  n.op = Op::kScale;
  n.scalar = coef;
  n.args = {std::move(a)};
  return make(std::move(n));
}

Expr Expr::scale(std::string param, Expr a) {
  ExprNode n;
  n.op = Op::kScale;
  n.param = std::move(param);
  n.args = {std::move(a)};
  return make(std::move(n));
}

Expr Expr::dot(Vec coef, std::vector<Expr> vars) {
  ExprNode n;
  n.op = Op::kDot;
  n.vec = std::move(coef);
  n.indices = gather_indices(vars);
  n.args = std::move(vars);
  return make(std::move(n));
}

Expr Expr::quad(Mat q, std::vector<Expr> vars) {
  ExprNode n;
  n.op = Op::kQuad;
  if (q.rows() == q.cols()) {
    n.asymmetry = (q - q.transpose()).cwiseAbs().maxCoeff();
    if (q.size() == 0) n.asymmetry = 0.0;
    if (n.asymmetry > 1e-12) {
      std::ostringstream msg;
      msg << "quad matrix asymmetric by " << n.asymmetry << "; symmetrized";
      warn(msg.str());
    }
    n.mat = 0.5 * (q + q.transpose());
  } else {
    n.mat = std::move(q);
  }
  n.indices = gather_indices(vars);
  n.args = std::move(vars);
  return make(std::move(n));
}

Expr Expr::norm2(Mat a, Vec b, std::vector<Expr> vars) {
  ExprNode n;
  n.op = Op::kNorm2;
  n.mat = std::move(a);
  n.vec = std::move(b);
  n.indices = gather_indices(vars);
  n.args = std::move(vars);
  return make(std::move(n));
}

Expr Expr::exp(Expr a) {
  ExprNode n;
  n.op = Op::kExp;
  n.args = {std::move(a)};
  return make(std::move(n));
}

Expr Expr::log(Expr a) {
  ExprNode n;
  n.op = Op::kLog;
  n.args = {std::move(a)};
  return make(std::move(n));
}

Expr Expr::pow(Expr a, double exponent) {
  ExprNode n;
  n.op = Op::kPow;
  n.scalar = exponent;
  n.args = {std::move(a)};
  return make(std::move(n));
}

Expr Expr::monomial(double coef, Vec exponents, std::vector<Expr> vars) {
  ExprNode n;
  n.op = Op::kMonomial;
  n.scalar = coef;
  n.vec = std::move(exponents);
  n.indices = gather_indices(vars);
  n.args = std::move(vars);
  return make(std::move(n));
}

int Expr::width() const {
  if (op() == Op::kVar && node_->element < 0) return node_->var.size;
  return 1;
}

int Expr::min_dimension() const {
  int dim = 0;
  if (op() == Op::kVar) dim = node_->var.offset + node_->var.size;
  for (const Expr& a : args()) dim = std::max(dim, a.min_dimension());
  return dim;
}

// ---------------------------------------------------------------------------
// Evaluation and derivatives

namespace {

struct Derivs {
  double v = 0.0;
  Vec g;
  Mat h;
};

class Evaluator {
 public:
  Evaluator(const Vec& x, const ParamMap& params, int order) : x_(x), params_(params), order_(order) {}

  Derivs run(const Expr& e) const {
    const ExprNode& n = e.node();
    const int dim = static_cast<int>(x_.size());
    Derivs d = zero(dim);
    switch (n.op) {
      case Op::kConst:
        d.v = n.param.empty() ? n.scalar : param(n.param);
        break;
      case Op::kVar: {
        if (e.width() != 1) throw DimensionError("vector variable '" + n.var.name + "' used as a scalar");
        const int i = n.var.offset + std::max(n.element, 0);
        if (i >= dim) throw UnboundError("variable '" + n.var.name + "' is not bound by the point");
        d.v = x_(i);
        if (order_ >= 1) d.g(i) = 1.0;
        break;
      }
      case Op::kAdd:
      case Op::kSum:
        for (const Expr& a : n.args) accumulate(d, run(a), 1.0);
        break;
      case Op::kNeg:
        accumulate(d, run(n.args.at(0)), -1.0);
        break;
      case Op::kScale: {
        const double c = n.param.empty() ? n.scalar : param(n.param);
        accumulate(d, run(n.args.at(0)), c);
        break;
      }
      case Op::kDot: {
        const Vec xs = gather(n, static_cast<int>(n.vec.size()));
        d.v = n.vec.dot(xs);
        if (order_ >= 1) scatter_grad(d, n.indices, n.vec);
        break;
      }
      case Op::kQuad: {
        if (n.mat.rows() != n.mat.cols()) throw DimensionError("quad matrix is not square");
        const Vec xs = gather(n, static_cast<int>(n.mat.rows()));
        const Vec qx = n.mat * xs;
        d.v = 0.5 * xs.dot(qx);
        if (order_ >= 1) scatter_grad(d, n.indices, qx);
        if (order_ >= 2) scatter_hess(d, n.indices, n.mat);
        break;
      }
      case Op::kNorm2: {
        if (n.vec.size() != n.mat.rows()) throw DimensionError("norm2 offset length differs from matrix rows");
        const Vec xs = gather(n, static_cast<int>(n.mat.cols()));
        const Vec r = n.mat * xs + n.vec;
        d.v = r.norm();
        if (order_ >= 1) {
          if (d.v == 0.0) throw NondifferentiableError("norm2 is not differentiable where its argument is zero");
          const Vec atr = n.mat.transpose() * r;
          scatter_grad(d, n.indices, atr / d.v);
          if (order_ >= 2) {
            const Mat local = (n.mat.transpose() * n.mat - atr * atr.transpose() / (d.v * d.v)) / d.v;
            scatter_hess(d, n.indices, local);
          }
        }
        break;
      }
      case Op::kExp: {
        const Derivs u = run(n.args.at(0));
        d.v = std::exp(u.v);
        chain(d, u, d.v, d.v);
        break;
      }
      case Op::kLog: {
        const Derivs u = run(n.args.at(0));
        if (!(u.v > 0.0)) throw DomainError("log of non-positive argument");
        d.v = std::log(u.v);
        chain(d, u, 1.0 / u.v, -1.0 / (u.v * u.v));
        break;
      }
      case Op::kPow: {
        const Derivs u = run(n.args.at(0));
        const double p = n.scalar;
        if (p < 0 && !(u.v > 0.0)) throw DomainError("pow with negative exponent needs a positive base");
        if (!is_integer(p) && u.v < 0.0) throw DomainError("pow with fractional exponent needs a nonnegative base");
        d.v = std::pow(u.v, p);
        if (order_ >= 1) {
          if (u.v == 0.0 && ((p > 0 && p < 1) || (order_ >= 2 && !is_integer(p) && p < 2))) {
            throw NondifferentiableError("pow is not differentiable at a zero base");
          }
          const double d1 = p == 0 ? 0.0 : p * std::pow(u.v, p - 1);
          const double d2 = (p == 0 || p == 1) ? 0.0 : p * (p - 1) * std::pow(u.v, p - 2);
          chain(d, u, d1, d2);
        }
        break;
      }
      case Op::kMonomial: {
        const Vec xs = gather(n, static_cast<int>(n.vec.size()));
        double v = n.scalar;
        for (int i = 0; i < xs.size(); ++i) {
          if (!(xs(i) > 0.0)) throw DomainError("monomial at a non-positive coordinate");
          v *= std::pow(xs(i), n.vec(i));
        }
        d.v = v;
        if (order_ >= 1) {
          const Vec local_g = v * n.vec.cwiseQuotient(xs);
          scatter_grad(d, n.indices, local_g);
          if (order_ >= 2) {
            Mat local_h = local_g * n.vec.cwiseQuotient(xs).transpose();
            for (int i = 0; i < xs.size(); ++i) local_h(i, i) -= v * n.vec(i) / (xs(i) * xs(i));
            scatter_hess(d, n.indices, local_h);
          }
        }
        break;
      }
    }
    return d;
  }

 private:
  Derivs zero(int dim) const {
    Derivs d;
    if (order_ >= 1) d.g = Vec::Zero(dim);
    if (order_ >= 2) d.h = Mat::Zero(dim, dim);
    return d;
  }

  double param(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw UnboundError("parameter '" + name + "' has no value");
    return it->second;
  }

  Vec gather(const ExprNode& n, int expected) const {
    if (static_cast<int>(n.indices.size()) != expected || n.indices.empty()) {
      throw DimensionError(std::string(op_name(n.op)) + ": payload size does not match its variable arguments");
    }
    Vec xs(expected);
    for (int i = 0; i < expected; ++i) {
      if (n.indices[i] >= x_.size()) throw UnboundError("variable index not bound by the point");
      xs(i) = x_(n.indices[i]);
    }
    return xs;
  }

  void accumulate(Derivs& d, const Derivs& u, double c) const {
    d.v += c * u.v;
    if (order_ >= 1) d.g += c * u.g;
    if (order_ >= 2) d.h += c * u.h;
  }

  // d = φ(u) with φ' = d1, φ'' = d2; d.v already set.
  void chain(Derivs& d, const Derivs& u, double d1, double d2) const {
    if (order_ >= 1) d.g = d1 * u.g;
    if (order_ >= 2) d.h = d1 * u.h + d2 * u.g * u.g.transpose();
  }

  static void scatter_grad(Derivs& d, const std::vector<int>& idx, const Vec& local) {
    for (std::size_t i = 0; i < idx.size(); ++i) d.g(idx[i]) += local(static_cast<int>(i));
  }

  static void scatter_hess(Derivs& d, const std::vector<int>& idx, const Mat& local) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = 0; j < idx.size(); ++j) {
        d.h(idx[i], idx[j]) += local(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }

  const Vec& x_;
  const ParamMap& params_;
  int order_;
};

}  // namespace

double eval(const Expr& expr, const Vec& point, const ParamMap& params) {
  return Evaluator(point, params, 0).run(expr).v;
}

Vec gradient(const Expr& expr, const Vec& point, GradientMode mode, double step, const ParamMap& params) {
  if (mode == GradientMode::kAnalytic) return Evaluator(point, params, 1).run(expr).g;
  Vec g(point.size());
  Vec x = point;
  for (int i = 0; i < point.size(); ++i) {
    x(i) = point(i) + step;
    const double up = eval(expr, x, params);
    x(i) = point(i) - step;
    const double down = eval(expr, x, params);
    x(i) = point(i);
    g(i) = (up - down) / (2.0 * step);
  }
  return g;
}

Mat hessian(const Expr& expr, const Vec& point, const ParamMap& params) {
  return Evaluator(point, params, 2).run(expr).h;
}

}  // namespace ontopt
