#pragma once

#include "smpm/gmres.hpp"
#include "smpm/schur.hpp"
#include "smpm/types.hpp"

namespace smpm {

/// Coarse space for deflation: Z stacks the 0/1 indicator vectors of the
/// d = m_x - 1 interfaces, so Z^T sums interface values and Z broadcasts
/// them; Z^T Z = 2 n m_z I. The coarse matrix C = Z^T S Z is tridiagonal
/// (verified at build time, not assumed). For the singular zero-wavenumber
/// case the coarse division is regularized through the rank-one shift
/// (C + u_C u_C^T) with u_C = normalize(Z^T u_S) and a projected right-hand
/// side; invertible systems solve C directly, by the Thomas algorithm when
/// the tridiagonality check passed.
struct CoarseSpace {
  int d = 0;
  Matrix C;
  bool singular = false;
  bool tridiagonal = false;
  Vector u_C;  // meaningful only in the singular case
  Vector u_S;  // left null direction of S, kept to scrub amplified round-off
  Eigen::PartialPivLU<Matrix> lu;  // of C + u_C u_C^T (singular) or C (fallback)
  Vector sub, diag, sup;           // Thomas bands (invertible tridiagonal case)
};

/// Broadcast coarse values onto their interfaces.
Vector apply_Z(const Decomposition& dec, const Vector& y);
/// Sum values along each interface.
Vector apply_Zt(const Decomposition& dec, const Vector& v);

/// Builds C column-wise as Z^T S (Z e_j). Pass u_S for the singular Poisson
/// system; pass nullptr for an invertible (shifted) system.
CoarseSpace build_coarse(const SchurSystem& sys, const Vector* u_S);

Vector coarse_solve(const CoarseSpace& cs, const Vector& b);

/// P v = v - S Z coarse_solve(Z^T v); one S application per call.
Vector apply_P(const CoarseSpace& cs, const SchurSystem& sys, const Vector& v);
/// Q v = v - Z coarse_solve(Z^T S v).
Vector apply_Q(const CoarseSpace& cs, const SchurSystem& sys, const Vector& v);

struct SchurSolveResult {
  Vector x_S;
  KrylovReport report;
  std::uint64_t krylov_s_applies = 0;  // S applications during the GMRES call
};

/// Deflated, block-Jacobi right-preconditioned solve of S x_S = b_S:
/// GMRES on P S M^{-1} against P b_S, a Q M^{-1} correction, plus the direct
/// coarse term Z C \ Z^T b_S. Expects b_S already projected out of u_S in
/// the singular case; the identity S x_S - b_S = -(Krylov residual) then
/// holds exactly, so convergence is targeted at tol * ||b_S||.
SchurSolveResult deflated_solve(const SchurSystem& sys, const CoarseSpace& cs, const Vector& b_S,
                                double tol, int max_iter);

/// Two-level additive Schwarz: GMRES on S (M^{-1} + Z C \ Z^T), one S
/// application per iteration.
SchurSolveResult two_level_schwarz_solve(const SchurSystem& sys, const CoarseSpace& cs,
                                         const Vector& b_S, double tol, int max_iter);

}  // namespace smpm
