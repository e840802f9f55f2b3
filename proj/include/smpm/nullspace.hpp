#pragma once

#include "smpm/schur.hpp"
#include "smpm/types.hpp"

namespace smpm {

/// Left null vectors of the singular Schur and Poisson operators, used to
/// project right-hand sides onto the respective range spaces. u_S is the
/// unit left null vector of S; u_L = normalize(A^{-T} B^T u_S) is the left
/// null vector of L. Signs are fixed by making the largest-magnitude entry
/// positive. Computed once during setup, single-threaded.
struct NullSpace {
  Vector u_S;
  Vector u_L;
  double sigma = 0.0;  // inverse-iteration shift actually used
  int iterations = 0;
};

/// Shifted inverse iteration on S^T - sigma I. A sigma of zero selects the
/// default 1e-8 * ||S||_F / sqrt(k). The shifted matrix is LU-factored dense
/// up to dense_limit rows and as a sparse banded factorization beyond.
/// Converges when ||u^T S||_2 <= tol * ||S||_F; throws on non-convergence,
/// carrying the last residual.
Vector left_null_vector_s(const SchurSystem& sys, double sigma = 0.0, double tol = 1e-10,
                          int max_iter = 25, int* iterations_out = nullptr,
                          double* sigma_out = nullptr, Index dense_limit = 3200);

/// u_L = normalize(A^{-T} B^T u_S).
Vector left_null_vector_l(const SmpmOperator& op, const Vector& u_S);

/// Convenience: both vectors with default settings.
NullSpace compute_nullspace(const SchurSystem& sys);

/// v - dir (dir^T v) for a unit direction; idempotent.
Vector project_out(const Vector& v, const Vector& dir);

}  // namespace smpm
