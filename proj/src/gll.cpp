#include "smpm/gll.hpp"

#include <cmath>
#include <stdexcept>

namespace smpm {

namespace {

// P_N(x) and P_N'(x) by the three-term recurrence.
void legendre(int N, double x, double& p, double& dp) {
  double p0 = 1.0, d0 = 0.0;
  double p1 = x, d1 = 1.0;
  if (N == 0) {
    p = p0;
    dp = d0;
    return;
  }
  for (int j = 2; j <= N; ++j) {
    const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
    const double d2 = d0 + (2 * j - 1) * p1;
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  p = p1;
  dp = d1;
}

// Newton iteration for a root of P_N'. The second derivative comes from the
// Legendre ODE (1-x^2) P'' = 2x P' - N(N+1) P, valid for |x| < 1.
double interior_node(int N, double guess) {
  double x = guess;
  for (int it = 0; it < 100; ++it) {
    double p, dp;
    legendre(N, x, p, dp);
    const double ddp = (2.0 * x * dp - N * (N + 1) * p) / (1.0 - x * x);
    const double step = dp / ddp;
    x -= step;
    if (std::abs(step) <= 1e-14) return x;
  }
  throw std::runtime_error("gll_basis: Newton iteration failed to converge");
}

}  // namespace

Matrix lagrange_diff_matrix(const Vector& nodes) {
  const Index n = nodes.size();
  // Barycentric weights, normalized by their largest magnitude.
  Vector lambda = Vector::Ones(n);
  for (Index j = 0; j < n; ++j)
    for (Index m = 0; m < n; ++m)
      if (m != j) lambda(j) /= nodes(j) - nodes(m);
  lambda /= lambda.cwiseAbs().maxCoeff();

  Matrix d(n, n);
  for (Index i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      d(i, j) = (lambda(j) / lambda(i)) / (nodes(i) - nodes(j));
      row_sum += d(i, j);
    }
    d(i, i) = -row_sum;
  }
  return d;
}

GllBasis gll_basis(int n) {
  if (n < 2) throw std::invalid_argument("gll_basis: order must be at least 2");
  const int N = n - 1;

  GllBasis basis;
  basis.n = n;
  basis.nodes = Vector::Zero(n);
  basis.nodes(0) = -1.0;
  basis.nodes(N) = 1.0;

  // Interior roots on the negative half, mirrored to enforce exact symmetry.
  for (int i = 1; i <= (N - 1) / 2; ++i) {
    const double x = interior_node(N, -std::cos(M_PI * i / N));
    basis.nodes(i) = x;
    basis.nodes(N - i) = -x;
  }
  if (N % 2 == 0 && N >= 2) basis.nodes(N / 2) = 0.0;

  basis.weights = Vector(n);
  for (int i = 0; i < n; ++i) {
    double p, dp;
    legendre(N, basis.nodes(i), p, dp);
    basis.weights(i) = 2.0 / (N * (N + 1) * p * p);
  }

  basis.diff = lagrange_diff_matrix(basis.nodes);
  return basis;
}

}  // namespace smpm
