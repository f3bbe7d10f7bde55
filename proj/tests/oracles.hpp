#pragma once

// Test-only reference implementations, written independently of the library
// algorithms they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Roots of the characteristic polynomial of a symmetric 1×1, 2×2 or 3×3
/// matrix, ascending.
inline Vec char_poly_eigenvalues(const Mat& m) {
  const long n = m.rows();
  Vec out(n);
  if (n == 1) {
    out << m(0, 0);
  } else if (n == 2) {
    // λ² − tr·λ + det
    const double tr = m(0, 0) + m(1, 1);
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double disc = std::sqrt(std::max(tr * tr / 4 - det, 0.0));
    out << tr / 2 - disc, tr / 2 + disc;
  } else {
    // trigonometric solution of the depressed cubic
    const double q = m.trace() / 3;
    const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
    const double p2 = (m(0, 0) - q) * (m(0, 0) - q) + (m(1, 1) - q) * (m(1, 1) - q) + (m(2, 2) - q) * (m(2, 2) - q) + 2 * p1;
    const double p = std::sqrt(p2 / 6);
    if (p == 0.0) {
      out << q, q, q;
      return out;
    }
    const Mat b = (m - q * Mat::Identity(3, 3)) / p;
    const double r = std::clamp(b.determinant() / 2, -1.0, 1.0);
    const double phi = std::acos(r) / 3;
    const double e1 = q + 2 * p * std::cos(phi);
    const double e3 = q + 2 * p * std::cos(phi + 2 * M_PI / 3);
    out << e3, 3 * q - e1 - e3, e1;
    std::sort(out.data(), out.data() + 3);
  }
  return out;
}

inline double double_sum(const Mat& a, const Mat& b) {
  double s = 0;
  for (long i = 0; i < a.rows(); ++i) {
    for (long j = 0; j < a.cols(); ++j) s += a(i, j) * b(i, j);
  }
  return s;
}

enum class LpStatus { kOptimal, kUnbounded, kInfeasible };

struct LpAnswer {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0;
  Vec x;
};

/// min cᵀx s.t. Ax ≤ b (rows flagged in `eq` hold with equality), by
/// enumerating every basis of n active constraints inside the box |xⱼ| ≤ M.
/// Run at M and 2M: a value that moves with the box means unbounded.
inline LpAnswer vertex_enumeration(const Mat& a, const Vec& b, const Vec& c, const std::vector<bool>& eq = {},
                                   double big = 1e6) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(a.rows());
  auto solve_box = [&](double box) {
    Mat rows(m + 2 * n, n);
    Vec rhs(m + 2 * n);
    rows.topRows(m) = a;
    rhs.head(m) = b;
    for (int j = 0; j < n; ++j) {
      rows.row(m + 2 * j).setZero();
      rows(m + 2 * j, j) = 1;
      rhs(m + 2 * j) = box;
      rows.row(m + 2 * j + 1).setZero();
      rows(m + 2 * j + 1, j) = -1;
      rhs(m + 2 * j + 1) = box;
    }
    const int total = m + 2 * n;
    LpAnswer best;
    best.value = std::numeric_limits<double>::infinity();
    std::vector<int> pick(n);
    std::function<void(int, int)> rec = [&](int start, int depth) {
      if (depth == n) {
        Mat s(n, n);
        Vec r(n);
        for (int k = 0; k < n; ++k) {
          s.row(k) = rows.row(pick[k]);
          r(k) = rhs(pick[k]);
        }
        Eigen::FullPivLU<Mat> lu(s);
        if (lu.rank() < n) return;
        const Vec x = lu.solve(r);
        for (int i = 0; i < total; ++i) {
          const double slack = rhs(i) - rows.row(i).dot(x);
          const double tol = 1e-7 * (1 + std::abs(rhs(i)));
          if (slack < -tol) return;
          if (i < m && !eq.empty() && eq[i] && std::abs(slack) > tol) return;
        }
        const double v = c.dot(x);
        if (v < best.value - 1e-12 || (std::abs(v - best.value) <= 1e-12 && best.status != LpStatus::kOptimal)) {
          best.value = v;
          best.x = x;
          best.status = LpStatus::kOptimal;
        }
        return;
      }
      for (int i = start; i < total; ++i) {
        pick[depth] = i;
        rec(i + 1, depth + 1);
      }
    };
    if (n == 0) {
      best.status = LpStatus::kOptimal;
      best.value = 0;
      best.x = Vec(0);
      for (int i = 0; i < m; ++i) {
        if (b(i) < -1e-9 || (!eq.empty() && eq[i] && std::abs(b(i)) > 1e-9)) best.status = LpStatus::kInfeasible;
      }
      return best;
    }
    rec(0, 0);
    return best;
  };
  LpAnswer small = solve_box(big);
  if (small.status != LpStatus::kOptimal) return small;
  const LpAnswer large = solve_box(2 * big);
  if (std::abs(large.value - small.value) > 1e-6 * (1 + std::abs(small.value))) {
    small.status = LpStatus::kUnbounded;
    small.value = -std::numeric_limits<double>::infinity();
  }
  return small;
}

struct GridAnswer {
  bool found = false;
  double value = std::numeric_limits<double>::infinity();
  Vec x;
};

/// Brute-force minimum of f over the feasible grid points of a box (dim ≤ 3).
inline GridAnswer grid_min(const std::function<double(const Vec&)>& f, const std::function<bool(const Vec&)>& feasible,
                           const Vec& lo, const Vec& hi, double step) {
  const int n = static_cast<int>(lo.size());
  std::vector<long> counts(n);
  for (int j = 0; j < n; ++j) counts[j] = static_cast<long>(std::floor((hi(j) - lo(j)) / step + 1e-9)) + 1;
  GridAnswer best;
  Vec x(n);
  std::function<void(int)> rec = [&](int j) {
    if (j == n) {
      if (!feasible(x)) return;
      const double v = f(x);
      if (v < best.value) {
        best.value = v;
        best.x = x;
        best.found = true;
      }
      return;
    }
    for (long k = 0; k < counts[j]; ++k) {
      x(j) = lo(j) + k * step;
      rec(j + 1);
    }
  };
  rec(0);
  return best;
}

}  // namespace oracle
