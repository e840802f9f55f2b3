#pragma once

#include "smpm/types.hpp"

namespace smpm {

/// Gauss-Lobatto-Legendre collocation basis on the reference interval [-1,1].
///
/// Holds the n collocation nodes (strictly increasing, endpoints included,
/// symmetric about zero), the quadrature weights (summing to 2, exact for
/// polynomials of degree <= 2n-3), and the spectral differentiation matrix
/// diff(i,j) = l_j'(nodes(i)) of the Lagrange cardinal basis.
///
/// Values are immutable after construction and safe to share across threads.
struct GllBasis {
  int n = 0;
  Vector nodes;
  Vector weights;
  Matrix diff;
};

/// Builds the order-n GLL basis. Interior nodes are the roots of P'_{n-1}
/// (Legendre), found by Newton iteration from Chebyshev-Lobatto initial
/// guesses to 1e-14 absolute. Throws std::invalid_argument for n < 2.
GllBasis gll_basis(int n);

/// First-derivative collocation matrix for arbitrary distinct nodes, built
/// from barycentric weights with the diagonal set by the negative-sum trick,
/// so each row sums to zero exactly.
Matrix lagrange_diff_matrix(const Vector& nodes);

}  // namespace smpm
