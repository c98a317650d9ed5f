#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <itw/config_io.hpp>
#include <itw/errors.hpp>
#include <itw/experiments.hpp>
#include <itw/version.hpp>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;

struct CommonOptions {
  std::string config_path;
  std::string format = "csv";
  std::string out_path;
  std::size_t threads = 1;
  bool has_seed = false;
  std::uint64_t seed = 0;
  bool has_paths = false;
  std::size_t paths = 0;
  bool has_levels = false;
  std::size_t levels = 0;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool with_config) {
  if (with_config)
    cmd->add_option("config", opt.config_path, "path to a scenario config file")->required();
  cmd->add_option("--format", opt.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", opt.out_path, "write the report to this file instead of stdout");
  cmd->add_option("--threads", opt.threads, "worker count (results are worker-count independent)")
      ->capture_default_str();
  cmd->add_option("--seed", opt.seed, "override the config's master seed")
      ->trigger_on_parse()
      ->each([&opt](const std::string&) { opt.has_seed = true; });
  cmd->add_option("--paths", opt.paths, "override the config's path count")
      ->trigger_on_parse()
      ->each([&opt](const std::string&) { opt.has_paths = true; });
  cmd->add_option("--levels", opt.levels, "override the config's refinement level count")
      ->trigger_on_parse()
      ->each([&opt](const std::string&) { opt.has_levels = true; });
}

itw::ScenarioConfig load_config(const CommonOptions& opt) {
  itw::ScenarioConfig cfg = itw::load_scenario_file(opt.config_path);
  if (opt.has_seed) cfg.master_seed = opt.seed;
  if (opt.has_paths) cfg.n_paths = opt.paths;
  if (opt.has_levels) cfg.refinement_levels = opt.levels;
  const auto issues = itw::validate_scenario(cfg);
  if (!issues.empty()) {
    std::string what = "invalid scenario:";
    for (const auto& issue : issues) what += "\n  " + issue.str();
    throw itw::ConfigError(what);
  }
  return cfg;
}

void emit(const std::string& text, const CommonOptions& opt) {
  if (opt.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opt.out_path, std::ios::binary);
  if (!out) throw itw::ConfigError("cannot open output file: " + opt.out_path);
  out << text;
}

template <typename Report>
int finish(const Report& report, const CommonOptions& opt) {
  const std::string text =
      opt.format == "json" ? itw::to_json(report).dump(2) + "\n" : itw::to_csv(report);
  emit(text, opt);
  return report.pass ? kExitPass : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pathwise verification of the generalized Ito-Wentzell formula "
               "for jump diffusions"};
  app.set_version_flag("--version", itw::kVersion);
  app.require_subcommand(1);

  CommonOptions verify_opt;
  auto* verify = app.add_subcommand(
      "verify-iw", "residual convergence study of the main formula along common noise");
  add_common_flags(verify, verify_opt, true);

  CommonOptions red_opt;
  auto* reductions =
      app.add_subcommand("reductions", "classical-rule reductions on randomized scenarios");
  add_common_flags(reductions, red_opt, true);

  CommonOptions mol_opt;
  std::vector<double> mol_eps = {0.5, 0.1, 0.02};
  std::size_t mol_nodes = 64;
  auto* mollifier = app.add_subcommand(
      "mollifier", "kernel normalization, smoothing-error bounds and transfer identities");
  add_common_flags(mollifier, mol_opt, false);
  mollifier->add_option("--eps-grid", mol_eps, "kernel widths")->delimiter(',');
  mollifier->add_option("--nodes", mol_nodes, "quadrature nodes per axis")->capture_default_str();

  CommonOptions feps_opt;
  std::vector<double> feps_eps = {0.4, 0.2, 0.1, 0.05};
  auto* feps = app.add_subcommand(
      "feps", "mean-square convergence of the smoothed field to the field");
  add_common_flags(feps, feps_opt, true);
  feps->add_option("--eps-grid", feps_eps, "kernel widths, strictly decreasing")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      const auto cfg = load_config(verify_opt);
      return finish(itw::run_residual_study(cfg, verify_opt.threads), verify_opt);
    }
    if (*reductions) {
      const auto cfg = load_config(red_opt);
      return finish(itw::run_reduction_suite(cfg, red_opt.threads), red_opt);
    }
    if (*mollifier) {
      return finish(itw::run_mollifier_suite(mol_eps, mol_nodes), mol_opt);
    }
    if (*feps) {
      const auto cfg = load_config(feps_opt);
      itw::FepsParams params;
      params.epsilons = feps_eps;
      params.n_paths = feps_opt.has_paths ? feps_opt.paths : cfg.n_paths;
      params.n_threads = feps_opt.threads;
      return finish(itw::run_feps_study(cfg, params), feps_opt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
