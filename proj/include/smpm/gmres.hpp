#pragma once

#include <functional>
#include <vector>

#include "smpm/types.hpp"

namespace smpm {

using LinearOperator = std::function<Vector(const Vector&)>;

struct GmresOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;  // when > 0, overrides rel_tol * ||b||
  int max_iter = 2000;
  bool final_residual_check = true;  // recompute ||b - op x|| at the end
  Matrix* basis_out = nullptr;       // when set, receives the Krylov basis V
};

struct KrylovReport {
  int iterations = 0;
  std::vector<double> rel_residual_history;  // starts at 1, one entry per iteration after
  bool converged = false;
  double final_rel_residual = 0.0;
  bool residual_mismatch_warning = false;  // recomputed residual > 10x estimate
  long operator_applies = 0;
  double wall_time_s = 0.0;
};

struct GmresResult {
  Vector x;
  KrylovReport report;
};

/// Full (non-restarted) GMRES with Householder-reflection orthogonalization
/// in the Arnoldi process. Zero initial guess. The residual estimate sequence
/// is non-increasing by construction; the Krylov basis stays orthonormal to
/// O(machine eps) independent of the operator's conditioning.
///
/// A subdiagonal below 1e-14 * max|H| is treated as an invariant subspace
/// (happy breakdown). Non-finite operator output throws std::runtime_error.
GmresResult gmres(const LinearOperator& op, const Vector& b, const GmresOptions& opt = {});

/// Right-preconditioned GMRES on op(minv(.)); returns x = minv(x'). The
/// reported residuals equal the unpreconditioned residuals for right
/// preconditioning.
GmresResult gmres_right_preconditioned(const LinearOperator& op, const LinearOperator& minv,
                                       const Vector& b, const GmresOptions& opt = {});

}  // namespace smpm
