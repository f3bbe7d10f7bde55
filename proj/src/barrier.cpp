#include <cmath>
#include <limits>

#include "ontopt/errors.hpp"
#include "ontopt/solvers.hpp"

namespace ontopt {

namespace {

/// Central path of min cᵀx s.t. Ax ≤ b from a strictly feasible x: centering
/// by damped Newton, t ← μt until m/t ≤ gap. Returns false when the iterates
/// leave the unbounded_norm ball. `t` receives the final barrier weight.
bool path_follow(const Vec& c, const Mat& a, const Vec& b, const SolverConfig& cfg, Vec& x, Solution& s, double& t) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(b.size());

  // φ(x + αd) − φ(x), computed without cancelling the large t·cᵀx terms
  auto barrier_change = [&](const Vec& slack, const Vec& ad, double alpha, const Vec& d) {
    const Vec ratio = (ad.array() * alpha / slack.array()).matrix();
    if ((ratio.array() >= 1.0).any()) return std::numeric_limits<double>::infinity();
    return t * alpha * c.dot(d) - (-ratio.array()).log1p().sum();
  };

  t = 1.0;
  for (int outer = 0; outer < 64; ++outer) {
    for (int inner = 0; inner < cfg.max_iterations; ++inner) {
      const Vec slack = b - a * x;
      const Vec inv = slack.cwiseInverse();
      const Vec g = t * c + a.transpose() * inv;
      Mat h = a.transpose() * inv.cwiseAbs2().asDiagonal() * a;
      Eigen::LDLT<Mat> ldlt(h);
      if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
        h += 1e-10 * (1.0 + h.cwiseAbs().maxCoeff()) * Mat::Identity(n, n);
        ldlt.compute(h);
      }
      const Vec d = ldlt.solve(-g);
      const double decrement = -g.dot(d);
      if (decrement <= 1e-10 || g.cwiseAbs().maxCoeff() <= 1e-10 * t) break;
      const Vec ad = a * d;
      double alpha = 1.0;
      while (alpha > 1e-16 && !(barrier_change(slack, ad, alpha, d) <= -cfg.armijo_c * alpha * decrement)) alpha *= 0.5;
      if (alpha <= 1e-16) break;
      x += alpha * d;
      ++s.iterations;
      if (x.cwiseAbs().maxCoeff() > cfg.unbounded_norm) return false;
    }
    s.history.push_back(c.dot(x));
    if (m / t <= cfg.barrier_gap) return true;
    t *= cfg.barrier_mu;
  }
  return true;
}

}  // namespace

Solution solve_barrier(const Problem& p, const SolverConfig& cfg) {
  const Classification cls = classify(p);
  if (cls.problem_class != ProblemClass::kLP || !cls.evidence.lp) {
    throw InapplicableError("NotApplicable", std::string("barrier needs an LP, got ") + class_name(cls.problem_class));
  }
  const LpData& lp = *cls.evidence.lp;
  const int n = static_cast<int>(lp.c.size());
  const int m = static_cast<int>(lp.rows.size());
  for (const LpRow& r : lp.rows) {
    if (r.equality) throw InapplicableError("NoInterior", "equality constraints leave no strict interior");
  }
  Mat a(m, n);
  Vec b(m);
  for (int i = 0; i < m; ++i) {
    a.row(i) = lp.rows[i].a.transpose();
    b(i) = lp.rows[i].b;
  }

  Solution s;
  s.method = "barrier";
  if (m == 0) {
    if (!lp.c.isZero(0.0)) {
      s.status = SolveStatus::kUnbounded;
      s.value = original_value(p, -std::numeric_limits<double>::infinity());
      return s;
    }
    s.status = SolveStatus::kOptimal;
    s.point = Vec::Zero(n);
    s.value = original_value(p, lp.c0);
    s.multipliers = Vec(0);
    return s;
  }

  // Phase 1: min σ s.t. Ax − σ ≤ b, σ ≥ −1.
  LpData ph;
  ph.c = Vec::Zero(n + 1);
  ph.c(n) = 1.0;
  for (int i = 0; i < m; ++i) {
    Vec row(n + 1);
    row << lp.rows[i].a, -1.0;
    ph.rows.push_back({row, b(i), false, -1});
  }
  Vec lower = Vec::Zero(n + 1);
  lower(n) = -1.0;
  ph.rows.push_back({lower, 1.0, false, -1});
  const LpResult start = simplex_lp(ph, cfg);
  if (start.status != SolveStatus::kOptimal || start.value >= -cfg.interior_margin) {
    throw InapplicableError("NoInterior", "no point satisfies every row with margin " + std::to_string(cfg.interior_margin));
  }
  s.iterations = start.pivots;

  // Unboundedness is decided by a ray: min cᵀd s.t. Ad ≤ 0, |dⱼ| ≤ 1.
  LpData ray;
  ray.c = lp.c;
  for (int i = 0; i < m; ++i) ray.rows.push_back({lp.rows[i].a, 0.0, false, -1});
  for (int j = 0; j < n; ++j) {
    Vec e = Vec::Zero(n);
    e(j) = 1.0;
    ray.rows.push_back({e, 1.0, false, -1});
    ray.rows.push_back({-e, 1.0, false, -1});
  }
  const LpResult recession = simplex_lp(ray, cfg);
  if (recession.status == SolveStatus::kOptimal && recession.value < -cfg.simplex_tol) {
    s.status = SolveStatus::kUnbounded;
    s.value = original_value(p, -std::numeric_limits<double>::infinity());
    return s;
  }

  Vec x = start.x.head(n);
  double t = 1.0;
  if (!path_follow(lp.c, a, b, cfg, x, s, t)) {
    // Bounded LP whose optimal face is unbounded: the barrier drifts along
    // it. Re-run inside a box that contains an optimal vertex.
    const LpResult vertex = simplex_lp(lp, cfg);
    const double radius = 10.0 * (1.0 + vertex.x.cwiseAbs().maxCoeff() + start.x.head(n).cwiseAbs().maxCoeff());
    Mat boxed(m + 2 * n, n);
    boxed << a, Mat::Identity(n, n), -Mat::Identity(n, n);
    Vec boxed_b(m + 2 * n);
    boxed_b << b, Vec::Constant(2 * n, radius);
    x = start.x.head(n);
    s.history.clear();
    if (!path_follow(lp.c, boxed, boxed_b, cfg, x, s, t)) {
      throw NumericalError("barrier path left the bounding box");
    }
  }
  s.status = SolveStatus::kOptimal;
  s.point = x;
  s.value = original_value(p, lp.c.dot(x) + lp.c0);
  for (double& h : s.history) h += lp.c0;

  const Vec slack = b - a * x;
  Vec lambda = (slack.array() * t).inverse().matrix();
  // Near-active rows carry the multipliers; a nonnegative least-squares fit
  // on them removes the rounding noise of 1/(t·s) at tiny slacks.
  std::vector<int> active;
  for (int i = 0; i < m; ++i) {
    if (slack(i) <= 1e-6 * (1.0 + std::abs(b(i)))) active.push_back(i);
  }
  if (!active.empty()) {
    Mat at(n, static_cast<int>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) at.col(static_cast<long>(k)) = a.row(active[k]).transpose();
    const Vec fit = at.completeOrthogonalDecomposition().solve(-lp.c);
    const double residual = (lp.c + at * fit).cwiseAbs().maxCoeff();
    if (fit.minCoeff() >= 0.0 && residual < (lp.c + a.transpose() * lambda).cwiseAbs().maxCoeff()) {
      lambda.setZero();
      for (std::size_t k = 0; k < active.size(); ++k) lambda(active[k]) = fit(static_cast<long>(k));
    }
  } else if (lp.c.isZero(0.0)) {
    lambda.setZero();
  }
  s.multipliers = lambda;
  return s;
}

}  // namespace ontopt
