// Acceptance suite: one pass/fail line per criterion, exit code equals the
// number of failed criteria. Run through ctest or directly:
//   ./acceptance --cli path/to/itw
// The --cli argument enables the byte-identity check through the real
// command-line surface; without it that criterion falls back to the
// library-level comparison.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include <itw/config_io.hpp>
#include <itw/experiments.hpp>
#include <itw/rng.hpp>
#include <itw/stats.hpp>

#ifndef ITW_CONFIG_DIR
#define ITW_CONFIG_DIR "configs"
#endif

using namespace itw;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int number, std::string title, double time_limit_s)
      : number_(number), title_(std::move(title)), limit_(time_limit_s),
        start_(std::chrono::steady_clock::now()) {}

  void check(bool ok, const std::string& detail) {
    if (!ok) {
      ok_ = false;
      details_ += (details_.empty() ? "" : "; ") + detail;
    }
  }

  void note(const std::string& text) {
    notes_ += (notes_.empty() ? "" : "; ") + text;
  }

  void finish() {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (limit_ > 0.0 && elapsed >= limit_) {
      ok_ = false;
      details_ += (details_.empty() ? "" : "; ") + std::string("runtime ") +
                  std::to_string(elapsed) + "s exceeded " + std::to_string(limit_) + "s";
    }
    std::printf("[%s] criterion %d: %s (%.2fs)%s%s\n", ok_ ? "PASS" : "FAIL", number_,
                title_.c_str(), elapsed, notes_.empty() ? "" : ("  [" + notes_ + "]").c_str(),
                details_.empty() ? "" : ("  <- " + details_).c_str());
    std::fflush(stdout);
    if (!ok_) ++g_failures;
  }

 private:
  int number_;
  std::string title_;
  double limit_;
  bool ok_ = true;
  std::string details_;
  std::string notes_;
  std::chrono::steady_clock::time_point start_;
};

std::string config_path(const char* name) {
  return std::string(ITW_CONFIG_DIR) + "/" + name;
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

MollifierParams params_1d(double eps) {
  MollifierParams p;
  p.epsilon = eps;
  p.dim = 1;
  return p;
}

void criterion_1() {
  Criterion c(1, "kink smoothing error matches eps*sqrt(2/pi) and the printed bound", 1.0);
  const Vec x = {0.0};
  for (double eps : {0.5, 0.1, 0.02}) {
    const double measured = std::abs(mollify(
        [](std::span<const double> y) { return std::abs(y[0]); }, x, params_1d(eps)));
    const double closed = eps * std::sqrt(2.0 / std::numbers::pi);
    const double bound = holder_error_bound(params_1d(eps), {1.0, 1.0});
    c.check(std::abs(measured - closed) <= 1e-6,
            "eps=" + fmt_g(eps) + " |measured-closed|=" + fmt_g(std::abs(measured - closed)));
    c.check(measured <= bound, "eps=" + fmt_g(eps) + " measured exceeds bound");
  }
  c.finish();
}

void criterion_2() {
  Criterion c(2, "kernel normalization, symmetry and closed-form smoothing values", 1.0);
  for (std::size_t dim = 1; dim <= 3; ++dim)
    for (double eps : {0.5, 0.1, 0.02}) {
      MollifierParams p;
      p.epsilon = eps;
      p.dim = dim;
      Vec x(dim, 0.2);
      const double total = mollify([](std::span<const double>) { return 1.0; }, x, p);
      c.check(std::abs(total - 1.0) <= 1e-10,
              "normalization dim=" + std::to_string(dim) + " eps=" + fmt_g(eps));
    }
  {
    MollifierParams p;
    p.epsilon = 0.3;
    p.dim = 2;
    const Vec u = {0.4, -0.9};
    const Vec nu = {-0.4, 0.9};
    c.check(delta_eps(u, p) == delta_eps(nu, p), "kernel symmetry");
  }
  const Vec x0 = {0.0};
  const Vec x2 = {2.0};
  for (double eps : {0.5, 0.1, 0.02}) {
    const double cte =
        mollify([](std::span<const double>) { return 5.0; }, x0, params_1d(eps));
    c.check(std::abs(cte - 5.0) <= 1e-10, "constant eps=" + fmt_g(eps));
    const double lin = mollify([](std::span<const double> y) { return y[0]; }, x2, params_1d(eps));
    c.check(std::abs(lin - 2.0) <= 1e-10, "linear eps=" + fmt_g(eps));
  }
  const double quad =
      mollify([](std::span<const double> y) { return y[0] * y[0]; }, x0, params_1d(0.1));
  c.check(std::abs(quad - 0.01) <= 1e-8, "second moment eps=0.1");
  c.finish();
}

void criterion_3() {
  Criterion c(3, "derivative-transfer identities agree to 1e-6 on the smooth suite", 5.0);
  struct Case {
    const char* name;
    double x;
    ScalarFn f, df, d2f;
  };
  const Case cases[] = {
      {"quadratic", 1.0, [](double y) { return y * y; }, [](double y) { return 2.0 * y; },
       [](double) { return 2.0; }},
      {"cubic", 0.0, [](double y) { return y * y * y; }, [](double y) { return 3.0 * y * y; },
       [](double y) { return 6.0 * y; }},
      {"gaussian", 0.3, [](double y) { return std::exp(-y * y / 2.0); },
       [](double y) { return -y * std::exp(-y * y / 2.0); },
       [](double y) { return (y * y - 1.0) * std::exp(-y * y / 2.0); }},
      {"sine", 0.7, [](double y) { return std::sin(2.0 * y); },
       [](double y) { return 2.0 * std::cos(2.0 * y); },
       [](double y) { return -4.0 * std::sin(2.0 * y); }},
      {"constant", 0.0, [](double) { return 3.0; }, [](double) { return 0.0; },
       [](double) { return 0.0; }},
  };
  for (const auto& tc : cases)
    for (double eps : {0.5, 0.1, 0.02}) {
      const auto [l1, r1] = mollify_grad_transfer(tc.f, tc.df, tc.x, params_1d(eps));
      c.check(std::abs(l1 - r1) <= 1e-6,
              std::string(tc.name) + " grad transfer eps=" + fmt_g(eps) + " diff=" +
                  fmt_g(std::abs(l1 - r1)));
      const auto [l2, r2] = mollify_hess_transfer(tc.f, tc.d2f, tc.x, params_1d(eps));
      c.check(std::abs(l2 - r2) <= 1e-6,
              std::string(tc.name) + " hess transfer eps=" + fmt_g(eps) + " diff=" +
                  fmt_g(std::abs(l2 - r2)));
    }
  c.finish();
}

ConvergenceReport reference_report() {
  const auto cfg = load_scenario_file(config_path("reference.json"));
  return run_residual_study(cfg, 2);
}

void criterion_4(const ConvergenceReport& ref) {
  Criterion c(4, "per-event jump bookkeeping is exact (<= 1e-12 relative)", 0.0);
  double ref_max = 0.0;
  for (const auto& row : ref.rows) ref_max = std::max(ref_max, row.jump_residual_max);
  c.note("reference-study max " + fmt_g(ref_max) + " over " +
         std::to_string(ref.rows.size()) + " levels x 2000 paths");
  c.check(ref_max <= 1e-12, "reference scenario jump deviation " + fmt_g(ref_max));

  // dedicated busy-jump scenario, checked event by event
  auto cfg = load_scenario_file(config_path("feps_smooth.json"));
  cfg.jump_law.total_intensity = 6.0;
  double busy_max = 0.0;
  for (std::size_t path = 0; path < 200; ++path) {
    const auto wiener =
        sample_wiener(cfg.grid_at_level(0), cfg.wiener_dim,
                      derive_path_seed(cfg.master_seed, path, StreamTag::wiener));
    const auto jumps = sample_jumps(cfg.horizon, cfg.jump_law,
                                    derive_path_seed(cfg.master_seed, path, StreamTag::jumps),
                                    derive_path_seed(cfg.master_seed, path, StreamTag::marks));
    const auto v = verify_path(cfg.state_coeffs, cfg.field_spec, cfg.initial_state, wiener, jumps);
    for (double d : v.ledger.jump_deviations) busy_max = std::max(busy_max, d);
  }
  c.check(busy_max <= 1e-12, "busy scenario jump deviation " + fmt_g(busy_max));
  c.finish();
}

void criterion_5(const ConvergenceReport& ref, double elapsed_s) {
  Criterion c(5, "main-formula residual: strictly decreasing rms, slope - 2se >= 0.4", 0.0);
  c.note("slope " + fmt_g(ref.slope.slope) + " +- " + fmt_g(ref.slope.std_error) + ", " +
         std::to_string(ref.rows.size()) + " levels from dt=" + fmt_g(ref.rows.front().dt) +
         ", study " + fmt_g(elapsed_s) + "s");
  c.check(ref.strictly_decreasing, "rms is not strictly decreasing");
  c.check(ref.slope.slope - 2.0 * ref.slope.std_error >= 0.4,
          "slope - 2se = " + fmt_g(ref.slope.slope - 2.0 * ref.slope.std_error));
  c.check(elapsed_s < 60.0, "study runtime " + fmt_g(elapsed_s) + "s >= 60s");
  c.finish();
}

void criterion_6() {
  Criterion c(6, "reductions: classical rule itemwise, chain-rule rate, frozen field", 30.0);
  const auto cfg = load_scenario_file(config_path("reference.json"));
  const auto report = run_reduction_suite(cfg, 2);
  for (const auto& row : report.rows)
    c.check(row.pass, row.name + " measured " + fmt_g(row.measured));
  std::string note;
  for (const auto& row : report.rows)
    note += (note.empty() ? "" : ", ") + row.name + " " + fmt_g(row.measured);
  c.note(note);
  c.finish();
}

void criterion_7() {
  Criterion c(7, "smoothed-field mse: strictly decreasing, slope - 2se >= 1.5", 60.0);
  const auto cfg = load_scenario_file(config_path("feps_smooth.json"));
  FepsParams params;
  params.epsilons = {0.4, 0.2, 0.1, 0.05};
  params.n_paths = 1000;
  params.n_threads = 2;
  const auto report = run_feps_study(cfg, params);
  c.note("slope " + fmt_g(report.table.loglog_fit.slope) + " +- " +
         fmt_g(report.table.loglog_fit.std_error) + ", bound margin " +
         fmt_g(report.table.max_bound_margin));
  c.check(report.table.strictly_decreasing, "mse is not strictly decreasing");
  c.check(report.table.loglog_fit.slope - 2.0 * report.table.loglog_fit.std_error >= 1.5,
          "slope - 2se = " +
              fmt_g(report.table.loglog_fit.slope - 2.0 * report.table.loglog_fit.std_error));
  c.check(report.table.max_bound_margin <= 0.0, "pathwise smoothing error exceeded the bound");
  c.finish();
}

void criterion_8() {
  Criterion c(8, "noise statistics inside pre-registered 99% CIs; telescoping exact", 10.0);
  {
    const TimeGrid grid{100000, 1000.0};  // dt = 0.01
    const auto path = sample_wiener(grid, 1, 813205);
    const double m = mean(path.increments.data());
    const double mean_band = kZ99 * 0.1 / std::sqrt(1e5);
    c.check(std::abs(m) <= mean_band, "wiener mean " + fmt_g(m) + " band " + fmt_g(mean_band));
    const double v = variance(path.increments.data());
    const double var_band = kZ99 * 0.01 * std::sqrt(2.0 / 1e5);
    c.check(std::abs(v - 0.01) <= var_band,
            "wiener variance " + fmt_g(v) + " band " + fmt_g(var_band));
  }
  {
    const MarkDistribution law{2.0, UniformBoxMarks{Vec{-1.0}, Vec{1.0}}};
    const std::size_t n = 100000;
    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s)
      total += static_cast<double>(sample_jumps(3.0, law,
                                                derive_path_seed(271004, s, StreamTag::jumps),
                                                derive_path_seed(271004, s, StreamTag::marks))
                                       .count());
    const double m = total / static_cast<double>(n);
    const double band = kZ99 * std::sqrt(6.0 / static_cast<double>(n));
    c.check(std::abs(m - 6.0) <= band, "poisson mean " + fmt_g(m) + " band " + fmt_g(band));
  }
  {
    const TimeGrid grid{1024, 1.0};
    const auto path = sample_wiener(grid, 1, 5150);
    double fine_sum = 0.0;
    double abs_scale = 0.0;
    for (std::size_t i = 0; i < 1024; ++i) {
      fine_sum += path.increments(i, 0);
      abs_scale += std::abs(path.increments(i, 0));
    }
    for (std::size_t factor : {2, 8, 32, 256, 1024}) {
      const auto coarse = coarsen_wiener(path, factor);
      double s = 0.0;
      for (std::size_t i = 0; i < coarse.grid.steps; ++i) s += coarse.increments(i, 0);
      c.check(std::abs(s - fine_sum) <= 1e-15 * abs_scale,
              "telescoping factor " + std::to_string(factor));
    }
  }
  c.finish();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_9(const std::string& cli) {
  Criterion c(9, "byte-identical reports across worker counts", 0.0);
  if (!cli.empty()) {
    const auto tmp = std::filesystem::temp_directory_path();
    const auto out1 = tmp / "itw_accept_t1.csv";
    const auto out4 = tmp / "itw_accept_t4.csv";
    const std::string base = "\"" + cli + "\" verify-iw \"" + config_path("reference.json") +
                             "\" --paths 200 --levels 4 --seed 424242";
    const std::string cmd1 = base + " --threads 1 --out \"" + out1.string() + "\"";
    const std::string cmd4 = base + " --threads 4 --out \"" + out4.string() + "\"";
    const int rc1 = std::system(cmd1.c_str());
    const int rc4 = std::system(cmd4.c_str());
    c.check(rc1 != -1 && rc4 != -1, "could not launch the CLI");
    const std::string a = read_file(out1);
    const std::string b = read_file(out4);
    c.check(!a.empty(), "first CLI run produced no report");
    c.check(a == b, "CLI reports differ between worker counts");
    c.note("compared " + std::to_string(a.size()) + " bytes through the CLI");
    std::filesystem::remove(out1);
    std::filesystem::remove(out4);
  } else {
    auto cfg = load_scenario_file(config_path("reference.json"));
    cfg.n_paths = 200;
    cfg.refinement_levels = 4;
    const auto a = run_residual_study(cfg, 1);
    const auto b = run_residual_study(cfg, 4);
    c.check(to_csv(a) == to_csv(b), "library reports differ between worker counts");
    c.note("library-level comparison (no --cli given)");
  }
  c.finish();
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];

  criterion_1();
  criterion_2();
  criterion_3();

  const auto t0 = std::chrono::steady_clock::now();
  const ConvergenceReport ref = reference_report();
  const double ref_elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  criterion_4(ref);
  criterion_5(ref, ref_elapsed);
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9(cli);

  if (g_failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  return g_failures;
}
