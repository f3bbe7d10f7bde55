#include <cmath>
#include <limits>

#include "ontopt/errors.hpp"
#include "ontopt/solvers.hpp"

namespace ontopt {

namespace {

// H + τI, with τ grown until the Cholesky factorization succeeds.
Mat regularized(const Mat& h) {
  Eigen::LLT<Mat> llt(h);
  if (llt.info() == Eigen::Success) return h;
  const double scale = 1.0 + h.cwiseAbs().maxCoeff();
  for (double tau = 1e-12 * scale;; tau *= 10.0) {
    Mat r = h + tau * Mat::Identity(h.rows(), h.cols());
    if (Eigen::LLT<Mat>(r).info() == Eigen::Success) return r;
  }
}

double safe_eval(const Expr& f, const Vec& x, const ParamMap& params) {
  try {
    const double v = eval(f, x, params);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  } catch (const NondifferentiableError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

Solution solve_newton(const Problem& p, const SolverConfig& cfg) {
  const ParamMap params = p.param_map();
  const int n = p.dimension();
  for (const VariableSpec& v : p.variables) {
    if (v.domain != VarDomain::kFree) {
      throw InapplicableError("NotApplicable", "newton needs free variables; '" + v.name + "' has a restricted domain");
    }
  }
  std::vector<Vec> rows;
  std::vector<double> offsets;
  for (const NormalizedConstraint& nc : normalize_constraints(p)) {
    const StructureVerdict s = analyze_structure(nc.g, n, params);
    if (nc.kind != NormalizedConstraint::Kind::kEquality || !s.is_affine) {
      throw InapplicableError("NotApplicable", "newton handles affine equality constraints only; try barrier, simplex or grid");
    }
    rows.push_back(s.quadratic.c);
    offsets.push_back(s.quadratic.k);
  }
  const Expr f = min_objective(p);
  const CurvatureVerdict cv = curvature(f, params);
  if (!cv.is_convex()) {
    throw InapplicableError("NotApplicable", std::string("newton needs a convex objective, curvature is ") +
                                                 curvature_name(cv.curvature) + "; try --rule to-convex or grid");
  }
  const int me = static_cast<int>(rows.size());
  Mat a(me, n);
  Vec k(me);
  for (int i = 0; i < me; ++i) {
    a.row(i) = rows[i].transpose();
    k(i) = offsets[i];
  }

  Solution s;
  s.method = "newton";
  Vec x = cfg.start ? *cfg.start : Vec::Zero(n);
  if (x.size() != n) throw DimensionError("start point has " + std::to_string(x.size()) + " entries, expected " + std::to_string(n));
  if (me > 0) x += a.completeOrthogonalDecomposition().solve(-(a * x + k));
  if (!cfg.start && !std::isfinite(safe_eval(f, x, params))) {
    x = Vec::Ones(n);
    if (me > 0) x += a.completeOrthogonalDecomposition().solve(-(a * x + k));
  }
  double fx = safe_eval(f, x, params);
  if (!std::isfinite(fx)) throw InapplicableError("NotApplicable", "start point lies outside the objective's domain");

  Vec nu = Vec::Zero(me);
  s.status = SolveStatus::kMaxIterations;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    Vec g;
    Mat h;
    try {
      g = gradient(f, x, GradientMode::kAnalytic, 1e-5, params);
      h = hessian(f, x, params);
    } catch (const NondifferentiableError&) {
      s.status = SolveStatus::kNondifferentiableFailure;
      break;
    }
    Vec d;
    double residual;
    if (me == 0) {
      d = regularized(h).llt().solve(-g);
      residual = g.cwiseAbs().maxCoeff();
    } else {
      Mat kkt = Mat::Zero(n + me, n + me);
      kkt.topLeftCorner(n, n) = regularized(h);
      kkt.topRightCorner(n, me) = a.transpose();
      kkt.bottomLeftCorner(me, n) = a;
      Vec rhs = Vec::Zero(n + me);
      rhs.head(n) = -g;
      const Vec sol = kkt.fullPivLu().solve(rhs);
      d = sol.head(n);
      nu = a.transpose().completeOrthogonalDecomposition().solve(-g);
      residual = (g + a.transpose() * nu).cwiseAbs().maxCoeff();
    }
    if (n == 0) residual = 0.0;
    const double dnorm = n ? d.cwiseAbs().maxCoeff() : 0.0;
    const double xnorm = n ? x.cwiseAbs().maxCoeff() : 0.0;
    if (residual <= cfg.newton_grad_tol && dnorm <= 1e-6 * (1.0 + xnorm)) {
      s.status = SolveStatus::kOptimal;
      break;
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      d = -g;
      if (me > 0) d -= a.completeOrthogonalDecomposition().solve(a * d);
      slope = g.dot(d);
    }
    double alpha = 1.0;
    double fnew = safe_eval(f, x + d, params);
    while (!(fnew <= fx + cfg.armijo_c * alpha * slope) && alpha > 1e-16) {
      alpha *= 0.5;
      fnew = safe_eval(f, x + alpha * d, params);
    }
    ++s.iterations;
    if (!(fnew <= fx + cfg.armijo_c * alpha * slope)) {
      // line search stalled at rounding level
      if (residual <= cfg.newton_grad_tol) s.status = SolveStatus::kOptimal;
      break;
    }
    x += alpha * d;
    fx = fnew;
    s.history.push_back(fx);
  }
  s.point = x;
  s.value = original_value(p, fx);
  Vec mult(2 * me);
  for (int i = 0; i < me; ++i) {
    mult(2 * i) = std::max(nu(i), 0.0);
    mult(2 * i + 1) = std::max(-nu(i), 0.0);
  }
  s.multipliers = mult;
  return s;
}

Solution solve_auto(const Problem& p, const SolverConfig& cfg) {
  const Classification cls = classify(p);
  if (cls.problem_class == ProblemClass::kLP) return solve_simplex(p, cfg);
  return solve_newton(p, cfg);
}

}  // namespace ontopt
