#include "ontopt/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "ontopt/errors.hpp"

namespace ontopt {

namespace {

double off_diagonal_norm(const Mat& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

Vec jacobi_eigenvalues(const Mat& m) {
  if (m.rows() != m.cols()) throw DimensionError("jacobi_eigenvalues: matrix is not square");
  if (!m.allFinite()) throw DomainError("jacobi_eigenvalues: non-finite entry");
  Mat a = 0.5 * (m + m.transpose());
  const int n = static_cast<int>(a.rows());
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(a) > 1e-10; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        // Rotation angle zeroing a(p,q), computed the stable way.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vec eig = a.diagonal();
  std::sort(eig.begin(), eig.end());
  return eig;
}

double default_psd_tolerance(const Mat& m) {
  double inf_norm = 0.0;
  for (int i = 0; i < m.rows(); ++i) inf_norm = std::max(inf_norm, m.row(i).cwiseAbs().sum());
  return 1e-8 * (1.0 + inf_norm);
}

PsdResult psd_check(const Mat& m, double tol) {
  if (!m.allFinite()) throw DomainError("psd_check: non-finite entry");
  if (m.rows() == 0) return {true, 0.0};
  const Vec eig = jacobi_eigenvalues(m);
  if (tol < 0) tol = default_psd_tolerance(m);
  return {eig(0) >= -tol, eig(0)};
}

double trace_inner_product(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw DimensionError("trace_inner_product: operands must be square of equal size");
  }
  return a.cwiseProduct(b).sum();
}

}  // namespace ontopt
