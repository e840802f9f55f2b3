#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "smpm/operator.hpp"
#include "smpm/types.hpp"

namespace smpm {

/// Assembled Schur complement S = I + B A^{-1} E, stored as one dense block
/// per interface plus an implicit identity.
///
/// The block of interface i holds the columns of B A^{-1} E belonging to the
/// 2 n m_z slots of Gamma_i; its rows cover at most four contiguous
/// half-interface segments (left of Gamma_{i-1}, both sides of Gamma_i,
/// right of Gamma_{i+1}), so S couples each interface only to its neighbors.
///
/// Assembly is independent per strip kind; applications are read-only and
/// thread-safe. The apply counter tracks cost accounting for the solvers.
struct SchurSystem {
  std::shared_ptr<const SmpmOperator> op;
  Index k = 0;
  int d = 0;
  double shift = 0.0;  // block solves used (A - shift I)^{-1}

  struct InterfaceBlock {
    Matrix entries;  // (sum of segment lengths) x 2 n m_z
    std::vector<std::pair<Index, Index>> row_segments;  // (gamma start, length), ascending
  };
  std::vector<InterfaceBlock> blocks;
  double frob = 0.0;  // ||S||_F

  struct JacobiBlock {
    Index begin = 0, size = 0;
    Eigen::PartialPivLU<Matrix> lu;
  };
  std::vector<JacobiBlock> jacobi;

  std::shared_ptr<std::atomic<std::uint64_t>> applies =
      std::make_shared<std::atomic<std::uint64_t>>(0);
};

/// Solves one strip-kind block against a multi-column right-hand side.
using BlockSolver = std::function<Matrix(int kind, const Matrix& rhs)>;

/// Assembles S column-wise through the factored strip blocks (2 n m_z solves
/// per strip kind). Requires m_x >= 2.
SchurSystem assemble_schur(std::shared_ptr<const SmpmOperator> op);
/// Same assembly with a caller-supplied block solver, e.g. shifted solves.
SchurSystem assemble_schur(std::shared_ptr<const SmpmOperator> op, const BlockSolver& solver,
                           double shift);

Vector apply_S(const SchurSystem& sys, const Vector& v);
Vector apply_St(const SchurSystem& sys, const Vector& v);
/// Matrix-free definitional form v + B A^{-1} E v (shift 0 path).
Vector apply_S_definition(const SchurSystem& sys, const Vector& v);

/// b_S = B A^{-1} f; f is expected to be projected out of the left null
/// space of L beforehand.
Vector schur_rhs(const SchurSystem& sys, const Vector& f);

/// Non-overlapping block-Jacobi preconditioner: diagonal blocks of S pairing
/// consecutive interfaces (Gamma_1 u Gamma_2), (Gamma_3 u Gamma_4), ...; the
/// last block covers a single interface when m_x - 1 is odd. Throws if a
/// block factors as singular.
void build_block_jacobi(SchurSystem& sys);
Vector apply_block_jacobi_inv(const SchurSystem& sys, const Vector& v);

/// Per-strip back-substitution u = A^{-1}(f - E x_S).
Vector recover_solution(const SchurSystem& sys, const Vector& f, const Vector& x_S);

/// Dense k x k copy (small grids / tests).
Matrix dense_schur(const SchurSystem& sys);

/// Binary dump of the interface blocks: little-endian int64 header
/// {n, m_x, m_z, k}, then per block {rows, cols, nseg, (start, len)*,
/// column-major doubles}.
void dump_schur_blocks(const SchurSystem& sys, const std::string& path);
struct DumpedSchur {
  std::int64_t n = 0, m_x = 0, m_z = 0, k = 0;
  std::vector<SchurSystem::InterfaceBlock> blocks;
};
DumpedSchur read_schur_blocks(const std::string& path);

}  // namespace smpm
