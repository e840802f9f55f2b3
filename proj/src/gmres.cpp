#include "smpm/gmres.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace smpm {

namespace {

inline void apply_reflector(const Matrix& w, int j, Vector& v) {
  const auto wj = w.col(j);
  v -= wj * (2.0 * wj.dot(v));
}

}  // namespace

GmresResult gmres(const LinearOperator& op, const Vector& b, const GmresOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const Index nn = b.size();

  GmresResult res;
  res.x = Vector::Zero(nn);
  KrylovReport& rep = res.report;
  rep.rel_residual_history.push_back(1.0);

  const double bnorm = b.norm();
  if (!(bnorm > 0.0)) {
    rep.converged = true;
    rep.rel_residual_history.back() = 0.0;
    return res;
  }
  const double target = opt.abs_tol > 0.0 ? opt.abs_tol : opt.rel_tol * bnorm;

  const int m = static_cast<int>(std::min<Index>(opt.max_iter, nn));
  int cap = std::min(m, 64);
  Matrix W(nn, cap + 1);  // Householder unit vectors
  Matrix V(nn, cap);      // Krylov basis
  Matrix R(cap + 1, cap);  // triangularized Hessenberg columns
  Vector g = Vector::Zero(m + 1);
  std::vector<double> cs(m), sn(m);

  Vector z = b;
  double h_max = 0.0;
  int iters = 0;

  for (int j = 0; j <= m; ++j) {
    if (j + 1 > cap) {  // grow workspace
      const int newcap = std::min(m, 2 * cap);
      W.conservativeResize(Eigen::NoChange, newcap + 1);
      V.conservativeResize(Eigen::NoChange, newcap);
      Matrix r2 = Matrix::Zero(newcap + 1, newcap);
      r2.topLeftCorner(R.rows(), R.cols()) = R;
      R.swap(r2);
      cap = newcap;
    }

    // Householder vector zeroing z below entry j
    const double sigma = z.tail(nn - j).norm();
    double alpha = 0.0;
    W.col(j).setZero();
    if (sigma > 0.0) {
      alpha = z(j) >= 0.0 ? -sigma : sigma;
      W.col(j).tail(nn - j) = z.tail(nn - j);
      W(j, j) -= alpha;
      const double wn = W.col(j).norm();
      if (wn > 0.0) W.col(j) /= wn;
    }

    if (j == 0) {
      g(0) = alpha;  // = +-||b||
    } else {
      // column j-1 of the Hessenberg matrix: z(0..j-1) above, alpha on the subdiagonal
      Vector h(j + 1);
      h.head(j) = z.head(j);
      h(j) = alpha;
      h_max = std::max(h_max, h.cwiseAbs().maxCoeff());
      for (int i = 0; i + 1 < j; ++i) {
        const double t1 = h(i), t2 = h(i + 1);
        h(i) = cs[i] * t1 + sn[i] * t2;
        h(i + 1) = -sn[i] * t1 + cs[i] * t2;
      }
      const double rad = std::hypot(h(j - 1), h(j));
      cs[j - 1] = rad > 0.0 ? h(j - 1) / rad : 1.0;
      sn[j - 1] = rad > 0.0 ? h(j) / rad : 0.0;
      h(j - 1) = rad;
      const double g1 = g(j - 1), g2 = g(j);
      g(j - 1) = cs[j - 1] * g1 + sn[j - 1] * g2;
      g(j) = -sn[j - 1] * g1 + cs[j - 1] * g2;
      R.col(j - 1).head(j) = h.head(j);

      iters = j;
      const double res_abs = std::abs(g(j));
      rep.rel_residual_history.push_back(res_abs / bnorm);
      if (res_abs <= target) {
        rep.converged = true;
        break;
      }
      if (std::abs(alpha) <= 1e-14 * h_max) break;  // invariant subspace
    }
    if (j == m) break;

    // basis vector v_j = P_0 ... P_j e_j
    Vector v = Vector::Unit(nn, j);
    for (int i = j; i >= 0; --i) apply_reflector(W, i, v);
    V.col(j) = v;

    // z = P_j ... P_0 op(v_j)
    z = op(v);
    ++rep.operator_applies;
    if (!z.allFinite()) throw std::runtime_error("gmres: operator produced non-finite values");
    for (int i = 0; i <= j; ++i) apply_reflector(W, i, z);
  }

  rep.iterations = iters;
  if (iters > 0) {
    // back-substitute R y = g
    Vector y = Vector::Zero(iters);
    for (int i = iters - 1; i >= 0; --i) {
      double acc = g(i);
      for (int c = i + 1; c < iters; ++c) acc -= R(i, c) * y(c);
      y(i) = std::abs(R(i, i)) > 0.0 ? acc / R(i, i) : 0.0;
    }
    res.x = V.leftCols(iters) * y;
  }
  rep.final_rel_residual = std::abs(g(iters)) / bnorm;
  if (opt.basis_out) *opt.basis_out = V.leftCols(iters);

  if (opt.final_residual_check) {
    const Vector r = b - op(res.x);
    ++rep.operator_applies;
    const double true_rel = r.norm() / bnorm;
    if (true_rel * bnorm > 10.0 * std::max(target, rep.final_rel_residual * bnorm))
      rep.residual_mismatch_warning = true;
    rep.final_rel_residual = true_rel;
  }
  rep.converged = rep.final_rel_residual * bnorm <= target * (1.0 + 1e-12);

  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

GmresResult gmres_right_preconditioned(const LinearOperator& op, const LinearOperator& minv,
                                       const Vector& b, const GmresOptions& opt) {
  auto composed = [&](const Vector& v) { return op(minv(v)); };
  GmresResult res = gmres(composed, b, opt);
  res.x = minv(res.x);
  return res;
}

}  // namespace smpm
