#include "smpm/solver.hpp"

#include <chrono>
#include <stdexcept>

namespace smpm {

Method method_from_string(const std::string& name) {
  if (name == "schur") return Method::schur;
  if (name == "bj") return Method::bj;
  if (name == "dbj") return Method::dbj;
  if (name == "2las") return Method::two_level_schwarz;
  throw std::invalid_argument("unknown method '" + name + "' (schur|bj|dbj|2las)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::schur: return "schur";
    case Method::bj: return "bj";
    case Method::dbj: return "dbj";
    case Method::two_level_schwarz: return "2las";
  }
  return "?";
}

PoissonSetup build_poisson_setup(int n, int m_x, int m_z, double l_x, double l_z, double c_tau) {
  const auto t0 = std::chrono::steady_clock::now();
  PoissonSetup s;
  const Mesh mesh = build_mesh(n, m_x, m_z, l_x, l_z);
  const Decomposition dec = build_decomposition(mesh);
  const double tau = penalty_tau(n, mesh.h_x, mesh.h_z, c_tau);
  s.op = std::make_shared<const SmpmOperator>(assemble_operator(mesh, dec, tau));
  s.schur = std::make_shared<SchurSystem>(assemble_schur(s.op));
  build_block_jacobi(*s.schur);
  s.ns = compute_nullspace(*s.schur);
  s.coarse = build_coarse(*s.schur, &s.ns.u_S);
  s.setup_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

PoissonSolveResult solve_poisson(const PoissonSetup& setup, const Vector& f, Method method,
                                 double tol, int max_iter, bool with_checks) {
  const auto t0 = std::chrono::steady_clock::now();
  const SchurSystem& sys = *setup.schur;

  const Vector f_tilde = project_out(f, setup.ns.u_L);
  Vector b_S = schur_rhs(sys, f_tilde);
  b_S = project_out(b_S, setup.ns.u_S);

  PoissonSolveResult out;
  switch (method) {
    case Method::schur: {
      GmresOptions opt;
      opt.rel_tol = tol;
      opt.max_iter = max_iter;
      const auto before = sys.applies->load();
      GmresResult g = gmres([&](const Vector& v) { return apply_S(sys, v); }, b_S, opt);
      out.krylov_s_applies = sys.applies->load() - before;
      out.x_S = std::move(g.x);
      out.report = std::move(g.report);
      break;
    }
    case Method::bj: {
      GmresOptions opt;
      opt.rel_tol = tol;
      opt.max_iter = max_iter;
      const auto before = sys.applies->load();
      GmresResult g = gmres_right_preconditioned(
          [&](const Vector& v) { return apply_S(sys, v); },
          [&](const Vector& v) { return apply_block_jacobi_inv(sys, v); }, b_S, opt);
      out.krylov_s_applies = sys.applies->load() - before;
      out.x_S = std::move(g.x);
      out.report = std::move(g.report);
      break;
    }
    case Method::dbj: {
      SchurSolveResult r = deflated_solve(sys, setup.coarse, b_S, tol, max_iter);
      out.x_S = std::move(r.x_S);
      out.report = std::move(r.report);
      out.krylov_s_applies = r.krylov_s_applies;
      break;
    }
    case Method::two_level_schwarz: {
      SchurSolveResult r = two_level_schwarz_solve(sys, setup.coarse, b_S, tol, max_iter);
      out.x_S = std::move(r.x_S);
      out.report = std::move(r.report);
      out.krylov_s_applies = r.krylov_s_applies;
      break;
    }
  }

  const double bnorm = b_S.norm();
  const Vector schur_residual = apply_S(sys, out.x_S) - b_S;
  out.schur_rel_residual = bnorm > 0.0 ? schur_residual.norm() / bnorm : schur_residual.norm();

  out.u = recover_solution(sys, f_tilde, out.x_S);
  if (with_checks) {
    out.residual_bound_lhs = (apply_L(*setup.op, out.u) - f_tilde).norm();
    out.residual_bound_rhs = schur_residual.norm();
  }
  out.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace smpm
