// Experiment harness CLI.
//
//   proxsamp run <config>              run an experiment file, write the CSV
//   proxsamp rates <theorem> ...       print a bound curve (k,bound) to stdout
//   proxsamp gaussian-exact ...        print the 1-D closed-form recursion
//   proxsamp prox-point ...            print a proximal point trajectory
//
// Exit codes: 0 success, 1 validation/configuration error, 2 numeric or
// convergence error. Relative output paths resolve under PROXSAMP_OUTPUT_DIR
// when it is set.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proxsamp/experiment.hpp"
#include "proxsamp/potential.hpp"
#include "proxsamp/proxopt.hpp"
#include "proxsamp/rates.hpp"

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string resolve_output_path(const std::string& path,
                                const std::string& override_dir) {
  if (path.empty() || path.front() == '/') return path;
  std::string dir = override_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("PROXSAMP_OUTPUT_DIR")) dir = env;
  }
  if (dir.empty()) return path;
  if (dir.back() != '/') dir += '/';
  return dir + path;
}

int run_command(const std::string& config_path, const std::string& out_dir) {
  std::ifstream in(config_path);
  if (!in)
    throw proxsamp::ConfigurationError("cannot read config '" + config_path +
                                       "'");
  std::stringstream buffer;
  buffer << in.rdbuf();

  proxsamp::ExperimentConfig cfg = proxsamp::parse_config(buffer.str());
  if (!cfg.trajectory_output.empty())
    cfg.trajectory_output = resolve_output_path(cfg.trajectory_output, out_dir);
  const std::vector<proxsamp::ReportRow> rows = proxsamp::run_experiment(cfg);
  const std::string path = resolve_output_path(cfg.output, out_dir);
  proxsamp::write_report(rows, path);

  std::size_t violations = 0;
  for (const auto& r : rows)
    if (!r.satisfied) ++violations;
  std::cout << "wrote " << rows.size() << " rows to " << path;
  if (violations) std::cout << " (" << violations << " bound rows violated)";
  std::cout << "\n";
  return 0;
}

int rates_command(const std::string& theorem, double initial, double alpha,
                  double eta, double q, double r, double loi_constant,
                  std::optional<double> h0, std::uint64_t k_max) {
  auto kind = proxsamp::bound_kind_from_name(theorem);
  if (!kind)
    throw proxsamp::ConfigurationError("unknown theorem '" + theorem + "'");
  proxsamp::RateBound bound;
  bound.kind = *kind;
  bound.initial = initial;
  bound.alpha = alpha;
  bound.eta = eta;
  bound.q = q;
  bound.r = r;
  bound.loi_constant = loi_constant;
  if (h0) bound.h_0 = *h0;

  std::cout << "k,bound\n";
  const std::uint64_t k0 =
      (*kind == proxsamp::BoundKind::LC && !h0) ? 1 : 0;  // undefined at k=0
  for (std::uint64_t k = k0; k <= k_max; ++k)
    std::cout << k << ',' << fmt17(bound.evaluate(k)) << '\n';
  return 0;
}

int gaussian_exact_command(double m0, double sigma0, double sigma_target,
                           double eta, double eps, std::uint64_t k_max) {
  using namespace proxsamp;
  const SymMatrix sigma = SymMatrix::scalar(sigma_target);
  const GaussianState target({0.0}, SymMatrix::scalar(eps * sigma_target));
  GaussianState state = gaussian_1d(m0, sigma0);

  std::cout << "k,mean,variance,kl,w2\n";
  for (std::uint64_t k = 0; k <= k_max; ++k) {
    if (k > 0) state = gaussian_step(state, sigma, eta, eps);
    std::cout << k << ',' << fmt17(state.mean[0]) << ','
              << fmt17(state.cov(0, 0)) << ',' << fmt17(kl_gauss(state, target))
              << ',' << fmt17(w2_gauss(state, target)) << '\n';
  }
  return 0;
}

int prox_point_command(const std::string& potential_name,
                       const std::vector<double>& params,
                       const std::vector<double>& x0, double eta,
                       std::uint64_t steps) {
  using namespace proxsamp;
  const Potential f = builtin(potential_name, params);
  const ProxTrajectory traj = prox_point_run(f, eta, x0, steps);
  std::cout << "k,f_value,residual\n";
  for (std::size_t k = 0; k < traj.values.size(); ++k)
    std::cout << k << ',' << fmt17(traj.values[k]) << ','
              << fmt17(traj.residuals[k]) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proximal sampler experiment harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("config", config_path, "experiment config file")
      ->required();
  run_cmd->add_option("--output-dir", out_dir,
                      "directory for relative output paths "
                      "(overrides PROXSAMP_OUTPUT_DIR)");

  std::string theorem;
  double initial = 1.0, alpha = 1.0, eta = 1.0, q = 2.0, r = 1.0;
  double loi_constant = 68.0;
  std::optional<double> h0;
  std::uint64_t k_max = 20;
  auto* rates_cmd =
      app.add_subcommand("rates", "print a bound curve as CSV (k,bound)");
  rates_cmd
      ->add_option("theorem", theorem,
                   "SLC | LC | LSI_KL | LSI_RENYI | PI_CHI2 | PI_RENYI | LOI "
                   "| EPS_GENERALIZED")
      ->required();
  rates_cmd->add_option("--initial", initial,
                        "initial divergence (W2_0 for SLC/LC)");
  rates_cmd->add_option("--alpha", alpha, "functional inequality constant");
  rates_cmd->add_option("--eta", eta, "step size");
  rates_cmd->add_option("--q", q, "Renyi order");
  rates_cmd->add_option("--r", r, "LOI order in [1,2)");
  rates_cmd->add_option("--loi-constant", loi_constant,
                        "LOI constant (68 stated, 136 proof-conservative)");
  double h0_value = 0.0;
  auto* h0_opt = rates_cmd->add_option("--h0", h0_value,
                                       "initial KL for the refined LC bound");
  rates_cmd->add_option("--k-max", k_max, "last iteration to print");

  double m0 = 1.0, sigma0 = 5.0, sigma_target = 1.0, ge_eta = 1.0, ge_eps = 1.0;
  std::uint64_t ge_k = 10;
  auto* ge_cmd = app.add_subcommand(
      "gaussian-exact", "1-D closed-form recursion (k,mean,variance,kl,w2)");
  ge_cmd->add_option("--m0", m0, "initial mean");
  ge_cmd->add_option("--sigma0", sigma0, "initial variance")->required();
  ge_cmd->add_option("--sigma-target", sigma_target, "target variance");
  ge_cmd->add_option("--eta", ge_eta, "step size");
  ge_cmd->add_option("--eps", ge_eps, "entropy level");
  ge_cmd->add_option("--k", ge_k, "iterations");

  std::string pp_potential = "quadratic";
  std::vector<double> pp_params, pp_x0;
  double pp_eta = 1.0;
  std::uint64_t pp_k = 10;
  auto* pp_cmd = app.add_subcommand(
      "prox-point", "proximal point trajectory (k,f_value,residual)");
  pp_cmd->add_option("--potential", pp_potential, "built-in potential name");
  pp_cmd->add_option("--params", pp_params, "potential parameters");
  pp_cmd->add_option("--x0", pp_x0, "starting point")->required();
  pp_cmd->add_option("--eta", pp_eta, "step size");
  pp_cmd->add_option("--k", pp_k, "iterations");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run_command(config_path, out_dir);
    if (rates_cmd->parsed()) {
      if (h0_opt->count() > 0) h0 = h0_value;
      return rates_command(theorem, initial, alpha, eta, q, r, loi_constant,
                           h0, k_max);
    }
    if (ge_cmd->parsed())
      return gaussian_exact_command(m0, sigma0, sigma_target, ge_eta, ge_eps,
                                    ge_k);
    if (pp_cmd->parsed())
      return prox_point_command(pp_potential, pp_params, pp_x0, pp_eta, pp_k);
  } catch (const proxsamp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
