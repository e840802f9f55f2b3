#include "smpm/deflation.hpp"

#include <cmath>
#include <stdexcept>

namespace smpm {

Vector apply_Z(const Decomposition& dec, const Vector& y) {
  if (y.size() != dec.d) throw std::invalid_argument("apply_Z: wrong length");
  Vector v(dec.k);
  const Index w2 = dec.iface_size();
  for (int i = 0; i < dec.d; ++i) v.segment(i * w2, w2).setConstant(y(i));
  return v;
}

Vector apply_Zt(const Decomposition& dec, const Vector& v) {
  if (v.size() != dec.k) throw std::invalid_argument("apply_Zt: wrong length");
  Vector y(dec.d);
  const Index w2 = dec.iface_size();
  for (int i = 0; i < dec.d; ++i) y(i) = v.segment(i * w2, w2).sum();
  return y;
}

CoarseSpace build_coarse(const SchurSystem& sys, const Vector* u_S) {
  const Decomposition& dec = sys.op->dec;
  CoarseSpace cs;
  cs.d = dec.d;
  cs.singular = u_S != nullptr;

  cs.C.resize(cs.d, cs.d);
  for (int j = 0; j < cs.d; ++j)
    cs.C.col(j) = apply_Zt(dec, apply_S(sys, apply_Z(dec, Vector::Unit(cs.d, j))));

  // verify tridiagonal structure rather than assuming it
  const double off_tol = 1e-12 * cs.C.norm();
  cs.tridiagonal = true;
  for (int i = 0; i < cs.d && cs.tridiagonal; ++i)
    for (int j = 0; j < cs.d; ++j)
      if (std::abs(i - j) > 1 && std::abs(cs.C(i, j)) > off_tol) {
        cs.tridiagonal = false;
        break;
      }

  if (cs.singular) {
    cs.u_S = *u_S;
    cs.u_C = apply_Zt(dec, *u_S);
    cs.u_C.normalize();
    Index imax = 0;
    cs.u_C.cwiseAbs().maxCoeff(&imax);
    if (cs.u_C(imax) < 0.0) cs.u_C = -cs.u_C;
    Matrix shifted = cs.C + cs.u_C * cs.u_C.transpose();
    cs.lu.compute(shifted);
    if (cs.lu.rcond() < 1e-14)
      throw std::runtime_error("build_coarse: rank-one-shifted coarse matrix is singular");
  } else if (cs.tridiagonal) {
    cs.diag = cs.C.diagonal();
    cs.sub.resize(cs.d - 1);
    cs.sup.resize(cs.d - 1);
    for (int i = 0; i + 1 < cs.d; ++i) {
      cs.sub(i) = cs.C(i + 1, i);
      cs.sup(i) = cs.C(i, i + 1);
    }
  } else {
    cs.lu.compute(cs.C);
    if (cs.lu.rcond() < 1e-14)
      throw std::runtime_error("build_coarse: coarse matrix is singular");
  }
  return cs;
}

Vector coarse_solve(const CoarseSpace& cs, const Vector& b) {
  if (b.size() != cs.d) throw std::invalid_argument("coarse_solve: wrong length");
  if (cs.singular) {
    const Vector rhs = b - cs.u_C * cs.u_C.dot(b);
    return cs.lu.solve(rhs);
  }
  if (cs.tridiagonal) {
    // Thomas algorithm
    const int d = cs.d;
    Vector c(d), y(d);
    double piv = cs.diag(0);
    y(0) = b(0) / piv;
    for (int i = 1; i < d; ++i) {
      c(i - 1) = cs.sup(i - 1) / piv;
      piv = cs.diag(i) - cs.sub(i - 1) * c(i - 1);
      y(i) = (b(i) - cs.sub(i - 1) * y(i - 1)) / piv;
    }
    for (int i = d - 2; i >= 0; --i) y(i) -= c(i) * y(i + 1);
    return y;
  }
  return cs.lu.solve(b);
}

Vector apply_P(const CoarseSpace& cs, const SchurSystem& sys, const Vector& v) {
  return v - apply_S(sys, apply_Z(sys.op->dec, coarse_solve(cs, apply_Zt(sys.op->dec, v))));
}

Vector apply_Q(const CoarseSpace& cs, const SchurSystem& sys, const Vector& v) {
  return v - apply_Z(sys.op->dec, coarse_solve(cs, apply_Zt(sys.op->dec, apply_S(sys, v))));
}

SchurSolveResult deflated_solve(const SchurSystem& sys, const CoarseSpace& cs, const Vector& b_S,
                                double tol, int max_iter) {
  const Decomposition& dec = sys.op->dec;
  auto op = [&](const Vector& v) {
    return apply_P(cs, sys, apply_S(sys, apply_block_jacobi_inv(sys, v)));
  };
  GmresOptions opt;
  opt.abs_tol = tol * b_S.norm();
  opt.max_iter = max_iter;
  const Vector pb = apply_P(cs, sys, b_S);
  const auto before = sys.applies->load();
  GmresResult g = gmres(op, pb, opt);

  SchurSolveResult out;
  out.krylov_s_applies = sys.applies->load() - before;
  out.report = g.report;
  const Vector x1 = apply_Q(cs, sys, apply_block_jacobi_inv(sys, g.x));
  const Vector x2 = apply_Z(dec, coarse_solve(cs, apply_Zt(dec, b_S)));
  out.x_S = x1 + x2;
  return out;
}

SchurSolveResult two_level_schwarz_solve(const SchurSystem& sys, const CoarseSpace& cs,
                                         const Vector& b_S, double tol, int max_iter) {
  const Decomposition& dec = sys.op->dec;
  auto minv = [&](const Vector& v) {
    return Vector(apply_block_jacobi_inv(sys, v) +
                  apply_Z(dec, coarse_solve(cs, apply_Zt(dec, v))));
  };
  auto op = [&](const Vector& v) { return apply_S(sys, minv(v)); };
  GmresOptions opt;
  opt.abs_tol = tol * b_S.norm();
  opt.max_iter = max_iter;
  const auto before = sys.applies->load();
  GmresResult g = gmres(op, b_S, opt);

  SchurSolveResult out;
  out.krylov_s_applies = sys.applies->load() - before;
  out.report = g.report;
  out.x_S = minv(g.x);
  return out;
}

}  // namespace smpm
