#include "smpm/nullspace.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

#include "smpm/rng.hpp"

namespace smpm {

namespace {

void fix_sign(Vector& v) {
  Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0.0) v = -v;
}

}  // namespace

Vector left_null_vector_s(const SchurSystem& sys, double sigma, double tol, int max_iter,
                          int* iterations_out, double* sigma_out, Index dense_limit) {
  const Index k = sys.k;
  if (sigma == 0.0) sigma = 1e-8 * sys.frob / std::sqrt(static_cast<double>(k));
  if (sigma_out) *sigma_out = sigma;

  // deterministic starting vector
  Rng rng(0x5eed0001u);
  Vector v(k);
  for (Index i = 0; i < k; ++i) v(i) = rng.uniform() - 0.5;
  v.normalize();

  std::function<Vector(const Vector&)> solve;
  Eigen::PartialPivLU<Matrix> dense_lu;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> sparse_lu;
  if (k <= dense_limit) {
    Matrix st = dense_schur(sys).transpose();
    st.diagonal().array() -= sigma;
    dense_lu.compute(st);
    solve = [&dense_lu](const Vector& b) { return Vector(dense_lu.solve(b)); };
  } else {
    std::vector<Eigen::Triplet<double>> trip;
    const Index w2 = sys.op->dec.iface_size();
    for (Index i = 0; i < k; ++i) trip.emplace_back(i, i, 1.0 - sigma);
    for (int i = 0; i < sys.d; ++i) {
      const auto& blk = sys.blocks[i];
      Index off = 0;
      for (const auto& [start, len] : blk.row_segments) {
        for (Index rr = 0; rr < len; ++rr)
          for (Index cc = 0; cc < w2; ++cc)
            trip.emplace_back(i * w2 + cc, start + rr, blk.entries(off + rr, cc));
        off += len;
      }
    }
    Eigen::SparseMatrix<double> st(k, k);
    st.setFromTriplets(trip.begin(), trip.end());
    sparse_lu.compute(st);
    if (sparse_lu.info() != Eigen::Success)
      throw std::runtime_error("left_null_vector_s: sparse factorization failed");
    solve = [&sparse_lu](const Vector& b) { return Vector(sparse_lu.solve(b)); };
  }

  double resid = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    v = solve(v);
    v.normalize();
    resid = apply_St(sys, v).norm();
    if (resid <= tol * sys.frob) {
      if (iterations_out) *iterations_out = it;
      fix_sign(v);
      return v;
    }
  }
  throw std::runtime_error("left_null_vector_s: no convergence, residual " +
                           std::to_string(resid / sys.frob) + " of ||S||_F");
}

Vector left_null_vector_l(const SmpmOperator& op, const Vector& u_S) {
  Vector u = solve_At(op, apply_Bt(op, u_S));
  u.normalize();
  fix_sign(u);
  return u;
}

NullSpace compute_nullspace(const SchurSystem& sys) {
  NullSpace ns;
  ns.u_S = left_null_vector_s(sys, 0.0, 1e-10, 25, &ns.iterations, &ns.sigma);
  ns.u_L = left_null_vector_l(*sys.op, ns.u_S);
  return ns;
}

Vector project_out(const Vector& v, const Vector& dir) { return v - dir * dir.dot(v); }

}  // namespace smpm
