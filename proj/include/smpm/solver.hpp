#pragma once

#include <memory>
#include <string>

#include "smpm/deflation.hpp"
#include "smpm/nullspace.hpp"

namespace smpm {

enum class Method { schur, bj, dbj, two_level_schwarz };
Method method_from_string(const std::string& name);
std::string method_name(Method m);

/// Grid-dependent state reusable across right-hand sides: the factored
/// operator split, the assembled Schur blocks with their block-Jacobi
/// preconditioner, the left null vectors, and the coarse space.
struct PoissonSetup {
  std::shared_ptr<const SmpmOperator> op;
  std::shared_ptr<SchurSystem> schur;
  NullSpace ns;
  CoarseSpace coarse;
  double setup_seconds = 0.0;
};

PoissonSetup build_poisson_setup(int n, int m_x, int m_z, double l_x, double l_z,
                                 double c_tau = 1.0);

struct PoissonSolveResult {
  Vector u;
  Vector x_S;
  KrylovReport report;
  std::uint64_t krylov_s_applies = 0;  // S applications inside the GMRES loop
  double schur_rel_residual = 0.0;     // ||S x_S - b_S|| / ||b_S||, projected rhs
  double residual_bound_lhs = 0.0;     // ||L u - f~||_2          (with_checks)
  double residual_bound_rhs = 0.0;     // ||S x_S - b_S||_2       (with_checks)
  double solve_seconds = 0.0;
};

/// Full solve of L u = f: project f out of the left null space of L, form
/// and project the Schur right-hand side, solve S x_S = b_S with the chosen
/// method, back-substitute. The solution is determined up to an additive
/// constant. with_checks additionally evaluates ||L u - f~||_2, which is
/// bounded by the Schur residual on every solve.
PoissonSolveResult solve_poisson(const PoissonSetup& setup, const Vector& f, Method method,
                                 double tol = 1e-10, int max_iter = 2000,
                                 bool with_checks = false);

}  // namespace smpm
