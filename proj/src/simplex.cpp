#include <algorithm>
#include <cmath>

#include "ontopt/errors.hpp"
#include "ontopt/solvers.hpp"
#include "internal.hpp"

namespace ontopt {

namespace {

constexpr double kPivotEps = 1e-12;

// Dense tableau over columns [structural | slack | artificial | rhs].
class Tableau {
 public:
  Tableau(int rows, int cols) : t_(Mat::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  double& at(int r, int c) { return t_(r, c); }
  double rhs(int r) const { return t_(r, t_.cols() - 1); }
  int rows() const { return static_cast<int>(t_.rows()) - 1; }
  int cols() const { return static_cast<int>(t_.cols()) - 1; }
  std::vector<int>& basis() { return basis_; }

  // Objective row holds reduced costs; its rhs holds −value.
  void set_objective(const Vec& cost) {
    t_.row(rows()).setZero();
    t_.row(rows()).head(cost.size()) = cost.transpose();
    for (int r = 0; r < rows(); ++r) {
      const int b = basis_[r];
      if (b >= 0 && cost(b) != 0.0) t_.row(rows()) -= cost(b) * t_.row(r);
    }
  }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i <= rows(); ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[r] = c;
  }

  // Bland's rule. Returns kOptimal, kUnbounded or kMaxIterations.
  SolveStatus optimize(const std::vector<bool>& allowed, double tol, int max_pivots, int& pivots) {
    while (true) {
      int enter = -1;
      for (int c = 0; c < cols(); ++c) {
        if (allowed[c] && t_(rows(), c) < -tol) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return SolveStatus::kOptimal;
      int leave = -1;
      double best = 0.0;
      for (int r = 0; r < rows(); ++r) {
        if (basis_[r] < 0 || t_(r, enter) <= kPivotEps) continue;
        const double ratio = rhs(r) / t_(r, enter);
        if (leave < 0 || ratio < best - 1e-14 || (std::abs(ratio - best) <= 1e-14 && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return SolveStatus::kUnbounded;
      if (++pivots > max_pivots) return SolveStatus::kMaxIterations;
      pivot(leave, enter);
    }
  }

  const Mat& raw() const { return t_; }

 private:
  Mat t_;
  std::vector<int> basis_;
};

}  // namespace

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kMaxIterations:
      return "max-iterations";
    case SolveStatus::kNondifferentiableFailure:
      return "nondifferentiable-failure";
  }
  return "?";
}

double original_value(const Problem& p, double min_value) {
  double v = p.sense == Sense::kMaximize ? -min_value : min_value;
  return p.value_negated ? -v : v;
}

LpResult simplex_lp(const LpData& lp, const SolverConfig& cfg) {
  const int n = static_cast<int>(lp.c.size());
  const int m = static_cast<int>(lp.rows.size());
  LpResult out;
  out.duals = Vec::Zero(m);

  // x = x⁺ − x⁻; row i reads ±(aᵢᵀx⁺ − aᵢᵀx⁻ + sᵢ) = ±bᵢ with the sign making the rhs ≥ 0.
  std::vector<int> slack_col(m, -1), art_col(m, -1);
  std::vector<double> flip(m, 1.0);
  int cols = 2 * n;
  for (int i = 0; i < m; ++i) {
    if (!lp.rows[i].equality) slack_col[i] = cols++;
    if (lp.rows[i].b < 0) flip[i] = -1.0;
  }
  const int first_art = cols;
  for (int i = 0; i < m; ++i) {
    if (lp.rows[i].equality || flip[i] < 0) art_col[i] = cols++;
  }
  Tableau tab(m, cols);
  double bmax = 0.0;
  for (int i = 0; i < m; ++i) {
    const LpRow& row = lp.rows[i];
    for (int j = 0; j < n; ++j) {
      tab.at(i, j) = flip[i] * row.a(j);
      tab.at(i, n + j) = -flip[i] * row.a(j);
    }
    if (slack_col[i] >= 0) tab.at(i, slack_col[i]) = flip[i];
    if (art_col[i] >= 0) tab.at(i, art_col[i]) = 1.0;
    tab.at(i, cols) = flip[i] * row.b;
    tab.basis()[i] = art_col[i] >= 0 ? art_col[i] : slack_col[i];
    bmax = std::max(bmax, std::abs(row.b));
  }

  std::vector<bool> allowed(cols, true);
  if (first_art < cols) {
    Vec cost = Vec::Zero(cols);
    for (int c = first_art; c < cols; ++c) cost(c) = 1.0;
    tab.set_objective(cost);
    const SolveStatus s1 = tab.optimize(allowed, cfg.simplex_tol, cfg.simplex_max_pivots, out.pivots);
    if (s1 == SolveStatus::kMaxIterations) {
      out.status = s1;
      return out;
    }
    if (-tab.raw()(m, cols) > 1e-9 * (1.0 + bmax)) {
      out.status = SolveStatus::kInfeasible;
      return out;
    }
    // Drive artificials out of the basis; rows where that is impossible are redundant.
    for (int r = 0; r < m; ++r) {
      if (tab.basis()[r] < first_art) continue;
      int c = 0;
      for (; c < first_art; ++c) {
        if (std::abs(tab.raw()(r, c)) > 1e-9) break;
      }
      if (c < first_art) {
        tab.pivot(r, c);
      } else {
        tab.basis()[r] = -1;
      }
    }
    for (int c = first_art; c < cols; ++c) allowed[c] = false;
  }

  Vec cost = Vec::Zero(cols);
  cost.head(n) = lp.c;
  cost.segment(n, n) = -lp.c;
  tab.set_objective(cost);
  out.status = tab.optimize(allowed, cfg.simplex_tol, cfg.simplex_max_pivots, out.pivots);
  if (out.status == SolveStatus::kUnbounded) {
    out.value = -std::numeric_limits<double>::infinity();
    return out;
  }
  if (out.status != SolveStatus::kOptimal) return out;

  Vec z = Vec::Zero(cols);
  std::vector<int> live_rows, live_cols;
  for (int r = 0; r < m; ++r) {
    if (tab.basis()[r] < 0) continue;
    z(tab.basis()[r]) = tab.rhs(r);
    live_rows.push_back(r);
    live_cols.push_back(tab.basis()[r]);
  }
  out.x = z.head(n) - z.segment(n, n);
  out.value = lp.c.dot(out.x) + lp.c0;

  // Duals from Bᵀy = c_B on the sign-normalized rows, then λ = −flip·y.
  const int k = static_cast<int>(live_rows.size());
  if (k > 0) {
    Mat b(k, k);
    Vec cb(k);
    for (int jj = 0; jj < k; ++jj) {
      const int col = live_cols[jj];
      for (int ii = 0; ii < k; ++ii) {
        const int row = live_rows[ii];
        const LpRow& lr = lp.rows[row];
        double entry = 0.0;
        if (col < n) {
          entry = flip[row] * lr.a(col);
        } else if (col < 2 * n) {
          entry = -flip[row] * lr.a(col - n);
        } else if (col == slack_col[row]) {
          entry = flip[row];
        }
        b(ii, jj) = entry;
      }
      cb(jj) = cost(col);
    }
    const Vec y = b.transpose().fullPivLu().solve(cb);
    for (int ii = 0; ii < k; ++ii) {
      const int row = live_rows[ii];
      double lambda = -flip[row] * y(ii);
      if (!lp.rows[row].equality && !(lambda > 0.0)) lambda = 0.0;
      out.duals(row) = lambda;
    }
  }
  return out;
}

Vec expand_equality_multipliers(const LpData& lp, const Vec& duals) {
  int count = 0;
  for (const LpRow& r : lp.rows) count += r.equality ? 2 : 1;
  Vec out(count);
  int k = 0;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    if (lp.rows[i].equality) {
      out(k++) = std::max(duals(i), 0.0);
      out(k++) = std::max(-duals(i), 0.0);
    } else {
      out(k++) = duals(i);
    }
  }
  return out;
}

Solution solve_simplex(const Problem& p, const SolverConfig& cfg) {
  const Classification cls = classify(p);
  if (cls.problem_class != ProblemClass::kLP || !cls.evidence.lp) {
    throw InapplicableError("NotApplicable", std::string("simplex needs an LP, got ") + class_name(cls.problem_class) +
                                                 (cls.problem_class == ProblemClass::kSOCP ? "; try --rule socp2lp" : ""));
  }
  const LpData& lp = *cls.evidence.lp;
  const LpResult r = simplex_lp(lp, cfg);
  Solution s;
  s.method = "simplex";
  s.status = r.status;
  s.iterations = r.pivots;
  if (r.status == SolveStatus::kOptimal) {
    s.point = r.x;
    s.value = original_value(p, r.value);
    s.multipliers = expand_equality_multipliers(lp, r.duals);
    s.history.push_back(r.value);
  } else if (r.status == SolveStatus::kUnbounded) {
    s.value = original_value(p, r.value);
  }
  return s;
}

}  // namespace ontopt
