#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "smpm/helmholtz.hpp"
#include "smpm/solver.hpp"

namespace smpm {

/// One benchmark configuration. Extents of zero derive the sweep defaults
/// (l_x = 4 m_x with l_z = m_z, i.e. element aspect 4).
struct ExperimentConfig {
  std::string method = "dbj";  // schur | bj | dbj | 2las
  int n = 10;
  int m_x = 16;
  int m_z = 10;
  int m_y = 16;       // 3d only
  double l_x = 0.0;   // meters; 0 -> 4 * m_x * (l_z / m_z)
  double l_z = 10.0;  // meters
  double l_y = 1.0;   // meters, 3d only
  double tol = 1e-10;
  int trials = 10;
  std::uint64_t seed = 1234;
  double c_tau = 2.0;
  int max_iter = 4000;
  bool parallel_trials = false;
  std::string out;  // csv path, empty for stdout
};

struct CsvRow {
  std::string method;
  int n = 0, m_x = 0, m_z = 0, m_y = 0;
  double eta = 0.0;
  std::string trial;  // "0".."T-1" or "mean"
  double iterations = 0.0;
  double rel_residual = 0.0;
  double setup_time_s = 0.0;
  double solve_time_s = 0.0;
};

std::string csv_header();
std::string to_csv(const CsvRow& row);
void write_csv(const std::vector<CsvRow>& rows, const std::string& path);

/// Solves `trials` uniform-[0,1) right-hand sides on one grid with one
/// method; every solve's unpreconditioned Schur relative residual is
/// verified against the tolerance and recorded. Appends one row per trial
/// plus a mean row.
std::vector<CsvRow> run_experiment(const ExperimentConfig& cfg, const PoissonSetup& setup);
std::vector<CsvRow> run_experiment(const ExperimentConfig& cfg);

/// The transverse-periodic analogue over the stacked solve.
std::vector<CsvRow> run_experiment_3d(const ExperimentConfig& cfg, const FourierContext& ctx,
                                      double setup_seconds);

/// Aspect-ratio sweep at fixed n, m_x = m_z: widens l_x to reach each eta;
/// runs the unpreconditioned and block-Jacobi methods.
std::vector<CsvRow> sweep_aspect(ExperimentConfig cfg, const std::vector<double>& etas);
/// Strip-count sweep over all four methods at constant element aspect.
std::vector<CsvRow> sweep_mx(ExperimentConfig cfg, const std::vector<int>& mxs);
/// 3d sweep (deflation and two-level Schwarz, stacked solves).
std::vector<CsvRow> sweep_3d(ExperimentConfig cfg, const std::vector<int>& mxs);

struct ValidationReport {
  bool passed = true;
  std::vector<std::string> lines;
};

/// Monolithic dense assembly of the penalty operator, node by node from the
/// per-element residual; kept independent of the strip-local production
/// assembly so the two can check each other.
Matrix dense_poisson_operator(const Mesh& mesh, double tau);

/// Dense-oracle validation on a small grid (refuses r > 5000): monolithic
/// dense assembly against the operator split, SVD null vectors against the
/// inverse-iteration ones, a projected dense least-squares solve against all
/// four methods, the null-vector relations, and the residual bound on 50
/// seeded right-hand sides.
ValidationReport run_oracle_validation(const ExperimentConfig& cfg);

/// Manufactured-solution sweep u* = cos(pi x / l_x) cos(pi z / l_z); returns
/// {n, L_inf_error} rows with the arbitrary constant removed.
std::vector<std::pair<int, double>> run_convergence_study(const ExperimentConfig& cfg,
                                                          const std::vector<int>& ns);

}  // namespace smpm
