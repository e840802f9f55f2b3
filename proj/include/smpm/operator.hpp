#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "smpm/mesh.hpp"
#include "smpm/types.hpp"

namespace smpm {

/// Discrete Poisson-Neumann operator in split form L = A + E B.
///
/// A is block diagonal over the vertical strips and holds the collocation
/// Laplacian, the Neumann rows on the physical boundary, the intra-strip
/// (vertical) penalty fluxes, and the Robin self-terms of every penalty row.
/// B holds only the neighbor traces of the cross-strip (horizontal) fluxes:
/// row t of B evaluates -tau * (I + n.grad) of the adjacent strip at the node
/// matching interface slot t. Each A block is a decoupled Poisson-Robin
/// problem and is invertible once m_x >= 2.
///
/// On a uniform rectangular mesh at most three distinct strip matrices occur
/// (boundary-west, interior, boundary-east); blocks are stored and factored
/// once per distinct kind. Assembly and factorization are independent per
/// kind; all applications are read-only and thread-safe afterwards.
struct SmpmOperator {
  Mesh mesh;
  Decomposition dec;
  double tau = 0.0;    // reported penalty scale, c_tau * n^2 / min(h_x, h_z)
  double tau_x = 0.0;  // per-direction weights c_tau * n^2 / h: x fluxes
  double tau_z = 0.0;  // and z fluxes; all equal on square elements
  Index block_dim = 0;  // n^2 m_z

  Eigen::SparseMatrix<double> B;  // k x r

  struct BlockKind {
    bool west_iface = false;  // west side faces another strip (Robin self-term)
    bool east_iface = false;
  };
  std::vector<BlockKind> kinds;
  std::vector<int> kind_of;                            // strip -> kind
  std::vector<Eigen::SparseMatrix<double>> a_sparse;   // per kind, block_dim^2
  std::vector<Eigen::PartialPivLU<Matrix>> lu;         // per kind; empty when m_x == 1
};

/// Penalty weight heuristic tau = c_tau * n^2 / min(h_x, h_z).
double penalty_tau(int n, double h_x, double h_z, double c_tau = 1.0);

/// Assembles A (factored per distinct strip kind) and B. Throws if a strip
/// block factors as numerically singular, naming the strip kind.
SmpmOperator assemble_operator(const Mesh& mesh, const Decomposition& dec, double tau);

/// Dense copy of one strip's local matrix.
Matrix subdomain_matrix(const SmpmOperator& op, int strip);

Vector apply_A(const SmpmOperator& op, const Vector& u);
Vector apply_B(const SmpmOperator& op, const Vector& u);
/// L u = A u + E (B u); the residual form used for all consistency checks.
Vector apply_L(const SmpmOperator& op, const Vector& u);
Vector apply_Bt(const SmpmOperator& op, const Vector& v);

/// Block solves with the factored strips (requires m_x >= 2).
Vector solve_A(const SmpmOperator& op, const Vector& f);
/// Transposed block solves, A^{-T} f.
Vector solve_At(const SmpmOperator& op, const Vector& f);

using ScalarField = std::function<double(double, double)>;
/// Boundary data g(x, z, nx, nz) with (nx, nz) the outward unit normal.
using BoundaryField = std::function<double(double, double, double, double)>;

/// Nodal forcing plus tau-weighted Neumann data accumulated on physical
/// boundary rows (domain corners receive both sides' contributions).
Vector assemble_rhs(const SmpmOperator& op, const ScalarField& f, const BoundaryField& g);

}  // namespace smpm
