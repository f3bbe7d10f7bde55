#pragma once

#include "ontopt/expr.hpp"

namespace ontopt {

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, run until the
/// off-diagonal Frobenius norm is at most 1e-10. Sorted ascending.
Vec jacobi_eigenvalues(const Mat& m);

struct PsdResult {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
};

/// Default scale-aware tolerance: 1e-8·(1 + ‖M‖∞).
double default_psd_tolerance(const Mat& m);

/// is_psd ⇔ λ_min ≥ −tol. A negative tol selects default_psd_tolerance(m).
/// Throws DomainError on non-finite entries.
PsdResult psd_check(const Mat& m, double tol = -1.0);

/// ⟨A, B⟩ = Σᵢⱼ AᵢⱼBᵢⱼ = tr(AᵀB).
double trace_inner_product(const Mat& a, const Mat& b);

}  // namespace ontopt
