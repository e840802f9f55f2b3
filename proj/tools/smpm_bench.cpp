#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "smpm/bench.hpp"
#include "smpm/schur.hpp"

namespace {

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<int> parse_ints(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

void add_common_flags(CLI::App* cmd, smpm::ExperimentConfig& cfg) {
  cmd->add_option("--n", cfg.n, "GLL points per direction per element");
  cmd->add_option("--mx", cfg.m_x, "elements in x");
  cmd->add_option("--mz", cfg.m_z, "elements in z");
  cmd->add_option("--my", cfg.m_y, "transverse points (3d, power of two)");
  cmd->add_option("--lx", cfg.l_x, "domain width in meters (0 derives aspect-4 sweeps)");
  cmd->add_option("--lz", cfg.l_z, "domain height in meters");
  cmd->add_option("--ly", cfg.l_y, "transverse extent in meters (3d)");
  cmd->add_option("--method", cfg.method, "schur | bj | dbj | 2las");
  cmd->add_option("--tol", cfg.tol, "GMRES relative tolerance");
  cmd->add_option("--trials", cfg.trials, "right-hand sides per grid");
  cmd->add_option("--seed", cfg.seed, "base RNG seed");
  cmd->add_option("--ctau", cfg.c_tau, "penalty scale factor");
  cmd->add_option("--max-iter", cfg.max_iter, "GMRES iteration cap");
  cmd->add_option("--out", cfg.out, "CSV output path (default stdout)");
  cmd->add_flag("--parallel-trials", cfg.parallel_trials, "run trials concurrently");
  cmd->set_config("--config", "", "flat key=value config file; flags override it");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schur-complement Poisson benchmark driver"};
  app.require_subcommand(1);

  smpm::ExperimentConfig cfg;
  std::string etas = "1,5,10,25,50";
  std::string mxs_2d = "8,16,32,64";
  std::string mxs_3d = "8,16,32";
  std::string ns = "6,8,10,12";
  std::string dump_path;

  auto* aspect = app.add_subcommand("sweep-aspect",
                                    "iteration counts vs element aspect ratio (schur and bj)");
  add_common_flags(aspect, cfg);
  aspect->add_option("--etas", etas, "comma-separated aspect ratios");

  auto* mx = app.add_subcommand("sweep-mx", "iteration counts vs strip count (all four methods)");
  add_common_flags(mx, cfg);
  mx->add_option("--mxs", mxs_2d, "comma-separated m_x values");

  auto* three = app.add_subcommand("sweep-3d",
                                   "stacked transverse-periodic solves (dbj and 2las)");
  add_common_flags(three, cfg);
  three->add_option("--mxs", mxs_3d, "comma-separated m_x values");

  auto* validate = app.add_subcommand("validate", "dense-oracle validation on a small grid");
  add_common_flags(validate, cfg);
  validate->add_option("--dump-schur", dump_path, "also dump the Schur blocks to this file");

  auto* conv = app.add_subcommand("convergence", "manufactured-solution accuracy vs order");
  add_common_flags(conv, cfg);
  conv->add_option("--ns", ns, "comma-separated polynomial orders");

  CLI11_PARSE(app, argc, argv);

  try {
    if (aspect->parsed()) {
      smpm::write_csv(smpm::sweep_aspect(cfg, parse_doubles(etas)), cfg.out);
    } else if (mx->parsed()) {
      smpm::write_csv(smpm::sweep_mx(cfg, parse_ints(mxs_2d)), cfg.out);
    } else if (three->parsed()) {
      smpm::write_csv(smpm::sweep_3d(cfg, parse_ints(mxs_3d)), cfg.out);
    } else if (validate->parsed()) {
      // defaults sized for the dense oracle
      if (!validate->count("--n")) cfg.n = 6;
      if (!validate->count("--mx")) cfg.m_x = 6;
      if (!validate->count("--mz")) cfg.m_z = 4;
      if (!validate->count("--lz")) cfg.l_z = double(cfg.m_z);
      const auto report = smpm::run_oracle_validation(cfg);
      for (const auto& line : report.lines) std::puts(line.c_str());
      if (!dump_path.empty()) {
        const double l_x = cfg.l_x > 0 ? cfg.l_x : 4.0 * cfg.m_x * (cfg.l_z / cfg.m_z);
        const auto mesh = smpm::build_mesh(cfg.n, cfg.m_x, cfg.m_z, l_x, cfg.l_z);
        const auto dec = smpm::build_decomposition(mesh);
        auto op = std::make_shared<const smpm::SmpmOperator>(smpm::assemble_operator(
            mesh, dec, smpm::penalty_tau(cfg.n, mesh.h_x, mesh.h_z, cfg.c_tau)));
        smpm::dump_schur_blocks(smpm::assemble_schur(op), dump_path);
        std::printf("schur blocks written to %s\n", dump_path.c_str());
      }
      std::puts(report.passed ? "validation PASSED" : "validation FAILED");
      return report.passed ? 0 : 1;
    } else if (conv->parsed()) {
      if (!conv->count("--mx")) cfg.m_x = 4;
      if (!conv->count("--mz")) cfg.m_z = 4;
      if (!conv->count("--lz")) cfg.l_z = 2.0;
      const auto rows = smpm::run_convergence_study(cfg, parse_ints(ns));
      std::ostream* os = &std::cout;
      std::ofstream file;
      if (!cfg.out.empty()) {
        file.open(cfg.out);
        os = &file;
      }
      *os << "n,L_inf_error\n";
      for (const auto& [order, err] : rows) *os << order << ',' << err << '\n';
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
