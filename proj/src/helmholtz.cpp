#include "smpm/helmholtz.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace smpm {

namespace {

// Back-substitution of (T - mu I) y = b with T quasi-upper-triangular,
// overwriting b. Returns the flop count spent.
std::uint64_t quasi_tri_shifted_solve(const Matrix& t, double mu, Vector& b) {
  const Index q = t.rows();
  const double scale = t.cwiseAbs().maxCoeff() + std::abs(mu);
  const double tiny = 1e-13 * scale;
  std::uint64_t fl = 0;
  Index i = q - 1;
  while (i >= 0) {
    if (i > 0 && t(i, i - 1) != 0.0) {
      double r1 = b(i - 1), r2 = b(i);
      const Index tail = q - 1 - i;
      if (tail > 0) {
        r1 -= t.row(i - 1).tail(tail).dot(b.tail(tail));
        r2 -= t.row(i).tail(tail).dot(b.tail(tail));
        fl += 4 * static_cast<std::uint64_t>(tail);
      }
      const double a11 = t(i - 1, i - 1) - mu, a12 = t(i - 1, i);
      const double a21 = t(i, i - 1), a22 = t(i, i) - mu;
      const double det = a11 * a22 - a12 * a21;
      if (std::abs(det) <= tiny * (std::abs(a11) + std::abs(a12) + std::abs(a21) + std::abs(a22)))
        throw std::runtime_error("shifted solve: shift coincides with a block eigenvalue");
      b(i - 1) = (a22 * r1 - a12 * r2) / det;
      b(i) = (-a21 * r1 + a11 * r2) / det;
      fl += 14;
      i -= 2;
    } else {
      const Index tail = q - 1 - i;
      double r = b(i);
      if (tail > 0) {
        r -= t.row(i).tail(tail).dot(b.tail(tail));
        fl += 2 * static_cast<std::uint64_t>(tail);
      }
      const double dii = t(i, i) - mu;
      if (std::abs(dii) <= tiny)
        throw std::runtime_error("shifted solve: shift coincides with a block eigenvalue");
      b(i) = r / dii;
      fl += 2;
      --i;
    }
  }
  return fl;
}

}  // namespace

BlockSchurFactor factor_unshifted_blocks(const SmpmOperator& op) {
  BlockSchurFactor f;
  for (std::size_t kind = 0; kind < op.kinds.size(); ++kind) {
    const Matrix a = Matrix(op.a_sparse[kind]);
    Eigen::RealSchur<Matrix> schur(a);
    if (schur.info() != Eigen::Success)
      throw std::runtime_error("factor_unshifted_blocks: iteration failed on kind " +
                               std::to_string(kind));
    f.u.push_back(schur.matrixU());
    f.t.push_back(schur.matrixT());
  }
  return f;
}

Matrix shifted_solve_kind(const BlockSchurFactor& f, int kind, double mu, const Matrix& rhs) {
  const Matrix& u = f.u[kind];
  const Matrix& t = f.t[kind];
  const Index q = u.rows();
  Matrix y = u.transpose() * rhs;
  std::uint64_t fl = 2 * static_cast<std::uint64_t>(q) * q * rhs.cols();
  for (Index c = 0; c < y.cols(); ++c) {
    Vector col = y.col(c);
    fl += quasi_tri_shifted_solve(t, mu, col);
    y.col(c) = col;
  }
  Matrix x = u * y;
  fl += 2 * static_cast<std::uint64_t>(q) * q * rhs.cols();
  f.flops->fetch_add(fl, std::memory_order_relaxed);
  return x;
}

Vector shifted_solve(const SmpmOperator& op, const BlockSchurFactor& f, double mu,
                     const Vector& b) {
  if (b.size() != op.dec.r) throw std::invalid_argument("shifted_solve: wrong length");
  const Index q = op.block_dim;
  Vector x(op.dec.r);
  for (int s = 0; s < op.mesh.m_x; ++s)
    x.segment(s * q, q) = shifted_solve_kind(f, op.kind_of[s], mu, b.segment(s * q, q));
  return x;
}

ComplexVector shifted_block_solve(const SmpmOperator& op, const BlockSchurFactor& f, double k_j,
                                  const ComplexVector& b) {
  if (b.size() != op.dec.r) throw std::invalid_argument("shifted_block_solve: wrong length");
  const double mu = k_j * k_j;
  const Vector re = shifted_solve(op, f, mu, b.real());
  const Vector im = shifted_solve(op, f, mu, b.imag());
  ComplexVector x(b.size());
  x.real() = re;
  x.imag() = im;
  return x;
}

FourierContext build_fourier_context(std::shared_ptr<const SmpmOperator> op, int m_y,
                                     double l_y) {
  if (m_y < 2 || (m_y & (m_y - 1)) != 0)
    throw std::invalid_argument("build_fourier_context: m_y must be a power of two >= 2");
  if (l_y <= 0.0) throw std::invalid_argument("build_fourier_context: l_y must be positive");

  FourierContext ctx;
  ctx.op = op;
  ctx.m_y = m_y;
  ctx.l_y = l_y;
  ctx.factors = factor_unshifted_blocks(*op);

  ctx.systems.resize(m_y / 2);
  for (int j = 0; j < m_y / 2; ++j) {
    auto& ws = ctx.systems[j];
    ws.k_j = 2.0 * M_PI * j / l_y;
    if (j == 0) {
      ws.schur = std::make_shared<SchurSystem>(assemble_schur(op));
    } else {
      const double mu = ws.k_j * ws.k_j;
      auto solver = [&ctx, mu](int kind, const Matrix& rhs) {
        return shifted_solve_kind(ctx.factors, kind, mu, rhs);
      };
      ws.schur = std::make_shared<SchurSystem>(assemble_schur(op, solver, mu));
    }
    build_block_jacobi(*ws.schur);
  }
  ctx.ns = compute_nullspace(*ctx.systems[0].schur);
  for (int j = 0; j < m_y / 2; ++j)
    ctx.systems[j].coarse =
        build_coarse(*ctx.systems[j].schur, j == 0 ? &ctx.ns.u_S : nullptr);
  return ctx;
}

Solve3dResult solve_3d(const FourierContext& ctx, const Matrix& f, double tol, int max_iter,
                       Method method, bool stacked) {
  if (method != Method::dbj && method != Method::two_level_schwarz)
    throw std::invalid_argument("solve_3d: method must be dbj or 2las");
  const SmpmOperator& op = *ctx.op;
  if (f.rows() != op.dec.r || f.cols() != ctx.m_y)
    throw std::invalid_argument("solve_3d: field must be r x m_y");
  const int half = ctx.m_y / 2;
  const Index k = op.dec.k;
  const Decomposition& dec = op.dec;

  ComplexMatrix fhat = fourier_transform_y(f);

  // zero-wavenumber consistency projections; all other systems are regular
  fhat.col(0).real() = project_out(fhat.col(0).real(), ctx.ns.u_L);
  fhat.col(0).imag() = project_out(fhat.col(0).imag(), ctx.ns.u_L);

  ComplexMatrix bhat(k, half);
  for (int j = 0; j < half; ++j) {
    const auto& ws = ctx.systems[j];
    if (j == 0) {
      Vector re = schur_rhs(*ws.schur, fhat.col(0).real());
      Vector im = schur_rhs(*ws.schur, fhat.col(0).imag());
      re = project_out(re, ctx.ns.u_S);
      im = project_out(im, ctx.ns.u_S);
      bhat.col(0).real() = re;
      bhat.col(0).imag() = im;
    } else {
      const ComplexVector ainv =
          shifted_block_solve(op, ctx.factors, ws.k_j, ComplexVector(fhat.col(j)));
      bhat.col(j).real() = apply_B(op, ainv.real());
      bhat.col(j).imag() = apply_B(op, ainv.imag());
    }
  }

  Solve3dResult out;
  ComplexMatrix xhat(k, half);

  auto part_of = [&](const ComplexMatrix& m, int j, int part) {
    return part == 0 ? Vector(m.col(j).real()) : Vector(m.col(j).imag());
  };

  if (stacked) {
    const Index stride = k;
    const Index total = static_cast<Index>(2 * half) * stride;
    Vector rhs(total);
    double bnorm2 = 0.0;
    for (int j = 0; j < half; ++j)
      for (int part = 0; part < 2; ++part) {
        Vector b = part_of(bhat, j, part);
        bnorm2 += b.squaredNorm();
        const auto& ws = ctx.systems[j];
        if (method == Method::dbj) b = apply_P(ws.coarse, *ws.schur, b);
        rhs.segment((2 * j + part) * stride, stride) = b;
      }

    auto apply_stacked = [&](const Vector& v) {
      Vector y(total);
      for (int j = 0; j < half; ++j) {
        const auto& ws = ctx.systems[j];
        for (int part = 0; part < 2; ++part) {
          const Vector seg = v.segment((2 * j + part) * stride, stride);
          Vector w;
          if (method == Method::dbj) {
            w = apply_P(ws.coarse, *ws.schur,
                        apply_S(*ws.schur, apply_block_jacobi_inv(*ws.schur, seg)));
          } else {
            w = apply_S(*ws.schur,
                        apply_block_jacobi_inv(*ws.schur, seg) +
                            apply_Z(dec, coarse_solve(ws.coarse, apply_Zt(dec, seg))));
          }
          y.segment((2 * j + part) * stride, stride) = w;
        }
      }
      return y;
    };

    GmresOptions opt;
    opt.abs_tol = tol * std::sqrt(bnorm2);
    opt.max_iter = max_iter;
    GmresResult g = gmres(apply_stacked, rhs, opt);
    out.report = g.report;

    for (int j = 0; j < half; ++j) {
      const auto& ws = ctx.systems[j];
      for (int part = 0; part < 2; ++part) {
        const Vector xp = g.x.segment((2 * j + part) * stride, stride);
        const Vector b = part_of(bhat, j, part);
        Vector x;
        if (method == Method::dbj) {
          x = apply_Q(ws.coarse, *ws.schur, apply_block_jacobi_inv(*ws.schur, xp)) +
              apply_Z(dec, coarse_solve(ws.coarse, apply_Zt(dec, b)));
        } else {
          x = apply_block_jacobi_inv(*ws.schur, xp) +
              apply_Z(dec, coarse_solve(ws.coarse, apply_Zt(dec, xp)));
        }
        if (part == 0)
          xhat.col(j).real() = x;
        else
          xhat.col(j).imag() = x;
      }
    }
  } else {
    // independent GMRES per wavenumber component
    out.report.converged = true;
    for (int j = 0; j < half; ++j) {
      const auto& ws = ctx.systems[j];
      for (int part = 0; part < 2; ++part) {
        const Vector b = part_of(bhat, j, part);
        SchurSolveResult r;
        if (method == Method::dbj)
          r = deflated_solve(*ws.schur, ws.coarse, b, tol, max_iter);
        else
          r = two_level_schwarz_solve(*ws.schur, ws.coarse, b, tol, max_iter);
        out.report.iterations = std::max(out.report.iterations, r.report.iterations);
        out.report.converged = out.report.converged && r.report.converged;
        out.report.wall_time_s += r.report.wall_time_s;
        out.report.operator_applies += r.report.operator_applies;
        if (part == 0)
          xhat.col(j).real() = r.x_S;
        else
          xhat.col(j).imag() = r.x_S;
      }
    }
  }

  // residual accounting and recovery
  double res2 = 0.0, b2 = 0.0;
  ComplexMatrix uhat(op.dec.r, half);
  for (int j = 0; j < half; ++j) {
    const auto& ws = ctx.systems[j];
    for (int part = 0; part < 2; ++part) {
      const Vector b = part_of(bhat, j, part);
      const Vector x = part_of(xhat, j, part);
      res2 += (apply_S(*ws.schur, x) - b).squaredNorm();
      b2 += b.squaredNorm();
    }
    ComplexVector g(op.dec.r);
    g.real() = fhat.col(j).real() - apply_E(dec, part_of(xhat, j, 0));
    g.imag() = fhat.col(j).imag() - apply_E(dec, part_of(xhat, j, 1));
    if (j == 0) {
      ComplexVector u0(op.dec.r);
      u0.real() = solve_A(op, g.real());
      u0.imag() = solve_A(op, g.imag());
      uhat.col(0) = u0;
    } else {
      uhat.col(j) = shifted_block_solve(op, ctx.factors, ws.k_j, g);
    }
  }
  out.rel_residual = b2 > 0.0 ? std::sqrt(res2 / b2) : std::sqrt(res2);
  out.u = inverse_fourier_y(uhat, ctx.m_y);
  return out;
}

double flop_model(int n, int m_x, int m_z, int m_y, int n_p, double gmres_iterations) {
  if (n <= 0 || m_x <= 0 || m_z <= 0 || m_y <= 0 || n_p <= 0)
    throw std::invalid_argument("flop_model: parameters must be positive");
  const double n2mz = static_cast<double>(n) * n * m_z;
  const double mx_per_rank = static_cast<double>(m_x) / n_p;
  const double fft = 2.0 * n2mz * mx_per_rank * (m_y * std::log2(static_cast<double>(m_y)));
  const double solves = 6.0 * m_y * mx_per_rank * n2mz * n2mz;
  const double gmres = mx_per_rank * std::pow(gmres_iterations, 3) * 16.0 * m_y *
                       static_cast<double>(n) * n * static_cast<double>(m_z) * m_z;
  return fft + solves + gmres;
}

}  // namespace smpm
