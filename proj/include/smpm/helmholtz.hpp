#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "smpm/deflation.hpp"
#include "smpm/fourier.hpp"
#include "smpm/nullspace.hpp"
#include "smpm/solver.hpp"

namespace smpm {

/// Real Schur form U T U^T of each distinct strip block of A, reused for all
/// wavenumber shifts: (A - mu I)^{-1} b = U (T - mu I)^{-1} U^T b costs
/// O(block_dim^2) per right-hand side (two dense multiplies plus a
/// quasi-triangular back-substitution). The counter tracks the floating
/// point operations actually spent in shifted solves.
struct BlockSchurFactor {
  std::vector<Matrix> u;  // per strip kind, orthogonal
  std::vector<Matrix> t;  // per strip kind, quasi-upper-triangular
  std::shared_ptr<std::atomic<std::uint64_t>> flops =
      std::make_shared<std::atomic<std::uint64_t>>(0);
};

/// Factors every distinct strip block; throws if the iteration fails to
/// converge, naming the kind.
BlockSchurFactor factor_unshifted_blocks(const SmpmOperator& op);

/// (A_kind - mu I)^{-1} rhs for one strip kind, multi-column.
Matrix shifted_solve_kind(const BlockSchurFactor& f, int kind, double mu, const Matrix& rhs);
/// Full-grid (A - mu I)^{-1} b, real right-hand side.
Vector shifted_solve(const SmpmOperator& op, const BlockSchurFactor& f, double mu,
                     const Vector& b);
/// Full-grid complex solve; real and imaginary parts decouple under the real
/// factorization. Detects an exactly singular shift and throws.
ComplexVector shifted_block_solve(const SmpmOperator& op, const BlockSchurFactor& f, double k_j,
                                  const ComplexVector& b);

/// One transverse wavenumber's Schur machinery. Only j = 0 is singular; all
/// shifted systems factor and solve without regularization.
struct WavenumberSystem {
  double k_j = 0.0;
  std::shared_ptr<SchurSystem> schur;
  CoarseSpace coarse;
};

/// Fourier-extended context: per-wavenumber Schur systems sharing one
/// operator, one penalty weight, and one block factorization. Wavenumbers
/// k_j = 2 pi j / l_y for j = 0 .. m_y/2 - 1 (the Nyquist mode is dropped).
/// Per-wavenumber assembly is independent; everything is immutable after
/// construction.
struct FourierContext {
  std::shared_ptr<const SmpmOperator> op;
  int m_y = 0;
  double l_y = 0.0;
  BlockSchurFactor factors;
  NullSpace ns;  // null vectors of the j = 0 system
  std::vector<WavenumberSystem> systems;
};

FourierContext build_fourier_context(std::shared_ptr<const SmpmOperator> op, int m_y, double l_y);

struct Solve3dResult {
  Matrix u;  // r x m_y
  KrylovReport report;
  double rel_residual = 0.0;  // stacked Schur relative residual
};

/// Solves the transverse-periodic Poisson problem: transverse FFT, one
/// stacked GMRES over all wavenumber Schur systems (real and imaginary
/// components vectorized under the real operators), per-wavenumber recovery
/// through the shifted factorization, inverse FFT. method selects deflation
/// (dbj) or two-level additive Schwarz; stacked=false solves each wavenumber
/// in its own GMRES instead (the report then carries the largest iteration
/// count).
Solve3dResult solve_3d(const FourierContext& ctx, const Matrix& f, double tol, int max_iter,
                       Method method = Method::dbj, bool stacked = true);

/// Predicted per-rank flop count for the stacked 3D solve: transverse FFTs,
/// 6 m_y m_x / n_p block solves, and one K-iteration GMRES; all proportionality
/// constants taken as one and log base two.
double flop_model(int n, int m_x, int m_z, int m_y, int n_p, double gmres_iterations);

}  // namespace smpm
