#include "smpm/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <future>
#include <sstream>
#include <stdexcept>

#include "smpm/rng.hpp"

namespace smpm {

namespace {

Vector uniform_rhs(Index size, Rng rng) {
  Vector f(size);
  for (Index i = 0; i < size; ++i) f(i) = rng.uniform();
  return f;
}

double resolve_lx(const ExperimentConfig& cfg, int m_x) {
  if (cfg.l_x > 0.0) return cfg.l_x;
  return 4.0 * m_x * (cfg.l_z / cfg.m_z);
}

CsvRow base_row(const ExperimentConfig& cfg, const std::string& method, int m_x, double eta,
                int m_y) {
  CsvRow row;
  row.method = method;
  row.n = cfg.n;
  row.m_x = m_x;
  row.m_z = cfg.m_z;
  row.m_y = m_y;
  row.eta = eta;
  return row;
}

}  // namespace

std::string csv_header() {
  return "method,n,mx,mz,my,eta,trial,iterations,rel_residual,setup_time_s,solve_time_s";
}

std::string to_csv(const CsvRow& r) {
  std::ostringstream os;
  os.precision(12);
  os << r.method << ',' << r.n << ',' << r.m_x << ',' << r.m_z << ',' << r.m_y << ',' << r.eta
     << ',' << r.trial << ',' << r.iterations << ',' << r.rel_residual << ',' << r.setup_time_s
     << ',' << r.solve_time_s;
  return os.str();
}

void write_csv(const std::vector<CsvRow>& rows, const std::string& path) {
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!path.empty()) {
    file.open(path);
    if (!file) throw std::runtime_error("write_csv: cannot open " + path);
    os = &file;
  }
  *os << csv_header() << '\n';
  for (const auto& r : rows) *os << to_csv(r) << '\n';
}

std::vector<CsvRow> run_experiment(const ExperimentConfig& cfg, const PoissonSetup& setup) {
  const Method method = method_from_string(cfg.method);
  const Rng rng(cfg.seed);
  const Index r = setup.op->dec.r;

  auto one_trial = [&](int t) {
    const Vector f = uniform_rhs(r, rng.stream(t));
    return solve_poisson(setup, f, method, cfg.tol, cfg.max_iter);
  };

  std::vector<PoissonSolveResult> results(cfg.trials);
  if (cfg.parallel_trials) {
    std::vector<std::future<PoissonSolveResult>> futs;
    futs.reserve(cfg.trials);
    for (int t = 0; t < cfg.trials; ++t)
      futs.push_back(std::async(std::launch::async, one_trial, t));
    for (int t = 0; t < cfg.trials; ++t) results[t] = futs[t].get();
  } else {
    for (int t = 0; t < cfg.trials; ++t) results[t] = one_trial(t);
  }

  std::vector<CsvRow> rows;
  CsvRow mean = base_row(cfg, cfg.method, setup.op->mesh.m_x, setup.op->mesh.eta, 0);
  mean.trial = "mean";
  mean.setup_time_s = setup.setup_seconds;
  for (int t = 0; t < cfg.trials; ++t) {
    CsvRow row = base_row(cfg, cfg.method, setup.op->mesh.m_x, setup.op->mesh.eta, 0);
    row.trial = std::to_string(t);
    row.iterations = results[t].report.iterations;
    row.rel_residual = results[t].schur_rel_residual;
    row.setup_time_s = setup.setup_seconds;
    row.solve_time_s = results[t].solve_seconds;
    mean.iterations += row.iterations / cfg.trials;
    mean.rel_residual += row.rel_residual / cfg.trials;
    mean.solve_time_s += row.solve_time_s / cfg.trials;
    rows.push_back(std::move(row));
  }
  rows.push_back(std::move(mean));
  return rows;
}

std::vector<CsvRow> run_experiment(const ExperimentConfig& cfg) {
  const auto setup = build_poisson_setup(cfg.n, cfg.m_x, cfg.m_z, resolve_lx(cfg, cfg.m_x),
                                         cfg.l_z, cfg.c_tau);
  return run_experiment(cfg, setup);
}

std::vector<CsvRow> run_experiment_3d(const ExperimentConfig& cfg, const FourierContext& ctx,
                                      double setup_seconds) {
  const Method method = method_from_string(cfg.method);
  if (method != Method::dbj && method != Method::two_level_schwarz)
    throw std::invalid_argument("run_experiment_3d: method must be dbj or 2las");
  const Rng rng(cfg.seed);
  const Index r = ctx.op->dec.r;

  auto one_trial = [&](int t) {
    Rng stream = rng.stream(t);
    Matrix f(r, ctx.m_y);
    for (int q = 0; q < ctx.m_y; ++q)
      for (Index i = 0; i < r; ++i) f(i, q) = stream.uniform();
    const auto t0 = std::chrono::steady_clock::now();
    Solve3dResult res = solve_3d(ctx, f, cfg.tol, cfg.max_iter, method, true);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::pair<Solve3dResult, double>(std::move(res), secs);
  };

  std::vector<CsvRow> rows;
  CsvRow mean = base_row(cfg, cfg.method, ctx.op->mesh.m_x, ctx.op->mesh.eta, ctx.m_y);
  mean.trial = "mean";
  mean.setup_time_s = setup_seconds;
  for (int t = 0; t < cfg.trials; ++t) {
    auto [res, secs] = one_trial(t);
    CsvRow row = base_row(cfg, cfg.method, ctx.op->mesh.m_x, ctx.op->mesh.eta, ctx.m_y);
    row.trial = std::to_string(t);
    row.iterations = res.report.iterations;
    row.rel_residual = res.rel_residual;
    row.setup_time_s = setup_seconds;
    row.solve_time_s = secs;
    mean.iterations += row.iterations / cfg.trials;
    mean.rel_residual += row.rel_residual / cfg.trials;
    mean.solve_time_s += row.solve_time_s / cfg.trials;
    rows.push_back(std::move(row));
  }
  rows.push_back(std::move(mean));
  return rows;
}

std::vector<CsvRow> sweep_aspect(ExperimentConfig cfg, const std::vector<double>& etas) {
  std::vector<CsvRow> rows;
  for (double eta : etas) {
    ExperimentConfig point = cfg;
    point.l_x = eta * cfg.m_x * (cfg.l_z / cfg.m_z);
    const auto setup =
        build_poisson_setup(point.n, point.m_x, point.m_z, point.l_x, point.l_z, point.c_tau);
    for (const char* m : {"schur", "bj"}) {
      point.method = m;
      auto batch = run_experiment(point, setup);
      rows.insert(rows.end(), batch.begin(), batch.end());
    }
  }
  return rows;
}

std::vector<CsvRow> sweep_mx(ExperimentConfig cfg, const std::vector<int>& mxs) {
  std::vector<CsvRow> rows;
  for (int m_x : mxs) {
    ExperimentConfig point = cfg;
    point.m_x = m_x;
    point.l_x = resolve_lx(cfg, m_x);
    const auto setup =
        build_poisson_setup(point.n, m_x, point.m_z, point.l_x, point.l_z, point.c_tau);
    for (const char* m : {"schur", "bj", "dbj", "2las"}) {
      point.method = m;
      auto batch = run_experiment(point, setup);
      rows.insert(rows.end(), batch.begin(), batch.end());
    }
  }
  return rows;
}

std::vector<CsvRow> sweep_3d(ExperimentConfig cfg, const std::vector<int>& mxs) {
  std::vector<CsvRow> rows;
  for (int m_x : mxs) {
    ExperimentConfig point = cfg;
    point.m_x = m_x;
    point.l_x = resolve_lx(cfg, m_x);
    const auto t0 = std::chrono::steady_clock::now();
    const Mesh mesh = build_mesh(point.n, m_x, point.m_z, point.l_x, point.l_z);
    const Decomposition dec = build_decomposition(mesh);
    const double tau = penalty_tau(point.n, mesh.h_x, mesh.h_z, point.c_tau);
    auto op = std::make_shared<const SmpmOperator>(assemble_operator(mesh, dec, tau));
    const FourierContext ctx = build_fourier_context(op, point.m_y, point.l_y);
    const double setup_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const char* m : {"dbj", "2las"}) {
      point.method = m;
      auto batch = run_experiment_3d(point, ctx, setup_seconds);
      rows.insert(rows.end(), batch.begin(), batch.end());
    }
  }
  return rows;
}

// Monolithic dense assembly of the penalty operator, written directly from
// the per-element residual: collocation Laplacian everywhere, per-side Robin
// mismatch against the neighbor copy, Neumann derivative rows on the
// physical boundary. Deliberately independent of the strip-local split used
// by the production assembly.
Matrix dense_poisson_operator(const Mesh& mesh, double tau) {
  const int n = mesh.n;
  Matrix L = Matrix::Zero(mesh.r, mesh.r);
  const Matrix& D = mesh.basis.diff;
  const Matrix D2 = D * D;
  const double cx = 2.0 / mesh.h_x, cz = 2.0 / mesh.h_z;

  for (int ex = 0; ex < mesh.m_x; ++ex)
    for (int ez = 0; ez < mesh.m_z; ++ez) {
      const int e = mesh.element_index(ex, ez);
      for (int ix = 0; ix < n; ++ix)
        for (int iz = 0; iz < n; ++iz) {
          const Index row = mesh.node_index(e, ix, iz);
          for (int m = 0; m < n; ++m) {
            L(row, mesh.node_index(e, m, iz)) += cx * cx * D2(ix, m);
            L(row, mesh.node_index(e, ix, m)) += cz * cz * D2(iz, m);
          }
          if (ix == 0) {
            const int nb = mesh.neighbors(e, Mesh::west);
            for (int m = 0; m < n; ++m) L(row, mesh.node_index(e, m, iz)) += -tau * cx * D(0, m);
            if (nb >= 0) {
              L(row, row) += tau;
              L(row, mesh.node_index(nb, n - 1, iz)) -= tau;
              for (int m = 0; m < n; ++m)
                L(row, mesh.node_index(nb, m, iz)) += tau * cx * D(n - 1, m);
            }
          }
          if (ix == n - 1) {
            const int nb = mesh.neighbors(e, Mesh::east);
            for (int m = 0; m < n; ++m)
              L(row, mesh.node_index(e, m, iz)) += tau * cx * D(n - 1, m);
            if (nb >= 0) {
              L(row, row) += tau;
              L(row, mesh.node_index(nb, 0, iz)) -= tau;
              for (int m = 0; m < n; ++m) L(row, mesh.node_index(nb, m, iz)) += -tau * cx * D(0, m);
            }
          }
          if (iz == 0) {
            const int nb = mesh.neighbors(e, Mesh::south);
            for (int m = 0; m < n; ++m) L(row, mesh.node_index(e, ix, m)) += -tau * cz * D(0, m);
            if (nb >= 0) {
              L(row, row) += tau;
              L(row, mesh.node_index(nb, ix, n - 1)) -= tau;
              for (int m = 0; m < n; ++m)
                L(row, mesh.node_index(nb, ix, m)) += tau * cz * D(n - 1, m);
            }
          }
          if (iz == n - 1) {
            const int nb = mesh.neighbors(e, Mesh::north);
            for (int m = 0; m < n; ++m)
              L(row, mesh.node_index(e, ix, m)) += tau * cz * D(n - 1, m);
            if (nb >= 0) {
              L(row, row) += tau;
              L(row, mesh.node_index(nb, ix, 0)) -= tau;
              for (int m = 0; m < n; ++m) L(row, mesh.node_index(nb, ix, m)) += -tau * cz * D(0, m);
            }
          }
        }
    }
  return L;
}

ValidationReport run_oracle_validation(const ExperimentConfig& cfg) {
  ValidationReport report;
  auto check = [&](bool ok, const std::string& name, double value, double bound) {
    std::ostringstream os;
    os.precision(3);
    os << (ok ? "[ok]   " : "[FAIL] ") << name << ": " << std::scientific << value
       << " (bound " << bound << ")";
    report.lines.push_back(os.str());
    report.passed = report.passed && ok;
  };

  const Index r = static_cast<Index>(cfg.n) * cfg.n * cfg.m_x * cfg.m_z;
  if (r > 5000)
    throw std::invalid_argument("run_oracle_validation: dense oracle refused for r > 5000");

  const double l_x = resolve_lx(cfg, cfg.m_x);
  const PoissonSetup setup =
      build_poisson_setup(cfg.n, cfg.m_x, cfg.m_z, l_x, cfg.l_z, cfg.c_tau);
  const SmpmOperator& op = *setup.op;
  const SchurSystem& sys = *setup.schur;
  const Decomposition& dec = op.dec;
  const Rng rng(cfg.seed);

  const Matrix L = dense_poisson_operator(op.mesh, op.tau);

  // operator split against the monolithic assembly
  {
    double worst = 0.0;
    Rng stream = rng.stream(1);
    for (int t = 0; t < 5; ++t) {
      const Vector u = uniform_rhs(r, stream.stream(t));
      const Vector ref = L * u;
      worst = std::max(worst, (apply_L(op, u) - ref).norm() / ref.norm());
    }
    check(worst <= 1e-12, "operator split L = A + E B vs dense assembly", worst, 1e-12);
  }
  // constants span the right null space
  {
    const double row_scale = L.cwiseAbs().rowwise().sum().maxCoeff();
    const double v = (L * Vector::Ones(r)).lpNorm<Eigen::Infinity>() / row_scale;
    check(v <= 1e-10, "constant vector in the right null space", v, 1e-10);
  }
  // assembled Schur action against its definition
  {
    double worst = 0.0;
    Rng stream = rng.stream(2);
    for (int t = 0; t < 20; ++t) {
      const Vector v = uniform_rhs(dec.k, stream.stream(t));
      worst = std::max(worst,
                       (apply_S(sys, v) - apply_S_definition(sys, v)).norm() / v.norm());
    }
    check(worst <= 1e-11, "assembled S vs definitional form", worst, 1e-11);
  }
  // null vectors against a dense SVD
  {
    Eigen::JacobiSVD<Matrix> svd_s(dense_schur(sys), Eigen::ComputeFullU);
    Vector svd_null = svd_s.matrixU().col(dec.k - 1);
    const double angle_s =
        std::acos(std::min(1.0, std::abs(svd_null.dot(setup.ns.u_S))));
    check(angle_s <= 1e-7, "u_S against dense SVD null vector", angle_s, 1e-7);

    const double claim_a =
        std::acos(std::min(1.0, std::abs(apply_Et(dec, setup.ns.u_L).normalized().dot(setup.ns.u_S))));
    check(claim_a <= 1e-7, "u_S parallel to E^T u_L", claim_a, 1e-7);
    const Vector recon = solve_At(op, apply_Bt(op, setup.ns.u_S)).normalized();
    const double claim_b = std::acos(std::min(1.0, std::abs(recon.dot(setup.ns.u_L))));
    check(claim_b <= 1e-7, "u_L parallel to A^{-T} B^T u_S", claim_b, 1e-7);
    const double null_l = (L.transpose() * setup.ns.u_L).norm() /
                          L.cwiseAbs().rowwise().sum().maxCoeff();
    check(null_l <= 1e-8, "u_L^T L residual", null_l, 1e-8);
  }
  // every method against a dense projected least-squares solve
  {
    const Vector f = uniform_rhs(r, rng.stream(3));
    const Vector f_tilde = project_out(f, setup.ns.u_L);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(L);
    const Vector u_direct = cod.solve(f_tilde);
    for (auto m : {Method::schur, Method::bj, Method::dbj, Method::two_level_schwarz}) {
      const auto res = solve_poisson(setup, f, m, cfg.tol, cfg.max_iter);
      Vector diff = res.u - u_direct;
      diff.array() -= diff.mean();
      const double err = diff.lpNorm<Eigen::Infinity>() / u_direct.lpNorm<Eigen::Infinity>();
      check(err <= 1e-8, "dense-solve agreement (" + method_name(m) + ")", err, 1e-8);
    }
  }
  // residual bound on 50 seeded right-hand sides; the slack scale carries the
  // row magnitude of L times the solution size, which bounds the rounding the
  // recovery itself introduces
  {
    const double row_scale = L.cwiseAbs().rowwise().sum().maxCoeff();
    double worst_excess = 0.0;
    Rng stream = rng.stream(4);
    for (int t = 0; t < 50; ++t) {
      const Vector f = uniform_rhs(r, stream.stream(t));
      const auto res = solve_poisson(setup, f, Method::dbj, cfg.tol, cfg.max_iter, true);
      const double scale = f.norm() + row_scale * res.u.norm();
      const double excess =
          res.residual_bound_lhs - res.residual_bound_rhs - 10.0 * 2.220446049250313e-16 * scale;
      worst_excess = std::max(worst_excess, excess / std::max(scale, 1e-300));
    }
    check(worst_excess <= 0.0, "recovered-solution residual bound (50 rhs)", worst_excess, 0.0);
  }
  // scatter and coarse identities
  {
    const Vector v = uniform_rhs(dec.k, rng.stream(5));
    const double ete = (apply_Et(dec, apply_E(dec, v)) - v).norm();
    check(ete == 0.0, "E^T E = I (exact)", ete, 0.0);
    // exact on indicator columns: the sums are integer counts of ones
    double ztz = 0.0;
    for (int j = 0; j < dec.d; ++j)
      ztz = std::max(ztz, (apply_Zt(dec, apply_Z(dec, Vector::Unit(dec.d, j))) -
                           2.0 * dec.side_size() * Vector::Unit(dec.d, j))
                              .norm());
    check(ztz == 0.0, "Z^T Z = 2 n m_z I (exact on indicators)", ztz, 0.0);
    const double ucc = (setup.coarse.C.transpose() * setup.coarse.u_C).norm();
    check(ucc <= 1e-9 * setup.coarse.C.norm(), "u_C^T C residual", ucc,
          1e-9 * setup.coarse.C.norm());
    check(setup.coarse.tridiagonal, "coarse matrix tridiagonal", setup.coarse.tridiagonal ? 0 : 1,
          0.0);
  }
  return report;
}

std::vector<std::pair<int, double>> run_convergence_study(const ExperimentConfig& cfg,
                                                          const std::vector<int>& ns) {
  const double l_z = cfg.l_z;
  const double l_x = cfg.l_x > 0.0 ? cfg.l_x : l_z * cfg.m_x / cfg.m_z;
  const Method method = method_from_string(cfg.method);

  std::vector<std::pair<int, double>> rows;
  for (int n : ns) {
    const PoissonSetup setup = build_poisson_setup(n, cfg.m_x, cfg.m_z, l_x, l_z, cfg.c_tau);
    const Mesh& mesh = setup.op->mesh;
    auto star = [&](double x, double z) {
      return std::cos(M_PI * x / l_x) * std::cos(M_PI * z / l_z);
    };
    auto forcing = [&](double x, double z) {
      return -(M_PI * M_PI / (l_x * l_x) + M_PI * M_PI / (l_z * l_z)) * star(x, z);
    };
    auto neumann = [&](double x, double z, double nx, double nz) {
      const double ux = -M_PI / l_x * std::sin(M_PI * x / l_x) * std::cos(M_PI * z / l_z);
      const double uz = -M_PI / l_z * std::cos(M_PI * x / l_x) * std::sin(M_PI * z / l_z);
      return nx * ux + nz * uz;
    };
    const Vector f = assemble_rhs(*setup.op, forcing, neumann);
    const auto res = solve_poisson(setup, f, method, cfg.tol, cfg.max_iter);
    Vector err(mesh.r);
    for (Index i = 0; i < mesh.r; ++i)
      err(i) = res.u(i) - star(mesh.coords(i, 0), mesh.coords(i, 1));
    err.array() -= err.mean();
    rows.emplace_back(n, err.lpNorm<Eigen::Infinity>());
  }
  return rows;
}

}  // namespace smpm
