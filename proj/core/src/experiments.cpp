#include "itw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "itw/config_io.hpp"
#include "itw/errors.hpp"
#include "itw/parallel.hpp"
#include "itw/version.hpp"

namespace itw {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

void check_box(const StateTrajectory& trajectory, const Box& box) {
  for (std::size_t idx = 0; idx < trajectory.count(); ++idx)
    if (!box.contains(trajectory.state(idx)))
      throw StateExcursionError("state left the configured box at t=" +
                                std::to_string(trajectory.times[idx]));
}

}  // namespace

ConvergenceReport run_residual_study(const ScenarioConfig& cfg, std::size_t n_threads) {
  ensure_valid(cfg);
  const std::size_t levels = cfg.refinement_levels;
  const std::size_t n_paths = cfg.n_paths;
  const TimeGrid finest = cfg.grid_at_level(levels - 1);

  Vec residuals(n_paths * levels, 0.0);
  Vec jump_devs(n_paths * levels, 0.0);

  parallel_for(n_paths, n_threads, [&](std::size_t path) {
    const WienerPath finest_path = sample_wiener(
        finest, cfg.wiener_dim, derive_path_seed(cfg.master_seed, path, StreamTag::wiener));
    const JumpStream jumps =
        sample_jumps(cfg.horizon, cfg.jump_law,
                     derive_path_seed(cfg.master_seed, path, StreamTag::jumps),
                     derive_path_seed(cfg.master_seed, path, StreamTag::marks));

    for (std::size_t level = 0; level < levels; ++level) {
      const std::size_t factor = std::size_t{1} << (levels - 1 - level);
      const WienerPath wiener = coarsen_wiener(finest_path, factor);
      const PathVerification v =
          verify_path(cfg.state_coeffs, cfg.field_spec, cfg.initial_state, wiener, jumps);
      if (cfg.field_spec.state_box) check_box(v.trajectory, *cfg.field_spec.state_box);
      residuals[path * levels + level] = v.residual_at_horizon;
      jump_devs[path * levels + level] = v.max_jump_deviation;
    }
  });

  ConvergenceReport report;
  report.version = kVersion;
  report.fingerprint = scenario_fingerprint_hex(cfg);
  report.rows.resize(levels);

  Vec log_dt;
  Vec log_rms;
  for (std::size_t level = 0; level < levels; ++level) {
    Vec sq(n_paths);
    double max_abs = 0.0;
    double jump_max = 0.0;
    for (std::size_t path = 0; path < n_paths; ++path) {
      const double r = residuals[path * levels + level];
      sq[path] = r * r;
      max_abs = std::max(max_abs, std::abs(r));
      jump_max = std::max(jump_max, jump_devs[path * levels + level]);
    }
    const double mse = mean(sq);
    const double rms = std::sqrt(mse);
    auto& row = report.rows[level];
    row.dt = cfg.grid_at_level(level).dt();
    row.n_paths = n_paths;
    row.rms_residual = rms;
    row.max_abs_residual = max_abs;
    row.jump_residual_max = jump_max;
    if (n_paths > 1 && rms > 0.0) {
      const double hw_mse = kZ99 * std::sqrt(variance(sq) / static_cast<double>(n_paths));
      row.ci_halfwidth = hw_mse / (2.0 * rms);
    }
    log_dt.push_back(std::log2(row.dt));
    log_rms.push_back(std::log2(std::max(rms, 1e-300)));
  }

  report.strictly_decreasing = true;
  for (std::size_t level = 1; level < levels; ++level)
    if (!(report.rows[level].rms_residual < report.rows[level - 1].rms_residual))
      report.strictly_decreasing = false;

  double jump_max_all = 0.0;
  for (const auto& row : report.rows) jump_max_all = std::max(jump_max_all, row.jump_residual_max);

  if (levels >= 2) report.slope = fit_line(log_dt, log_rms);
  report.pass = levels >= 2 && report.strictly_decreasing &&
                (report.slope.slope - 2.0 * report.slope.std_error) >= report.slope_threshold &&
                jump_max_all <= report.jump_tolerance;
  return report;
}

// ---------------------------------------------------------------------------
// reduction suite
// ---------------------------------------------------------------------------

namespace {

std::uint64_t matrix_seed(std::uint64_t base, std::size_t index, std::uint64_t variant) {
  return mix64(base ^ mix64(index * 2654435761ULL + variant));
}

/// Randomized bounded-basis scenario for the reduction matrix. With
/// frozen_with_jumps the field coefficients are frozen (all drivers zero)
/// and the state jumps; otherwise everything continuous is active and the
/// jump side is off.
ScenarioConfig make_matrix_scenario(std::uint64_t seed, bool frozen_with_jumps) {
  std::mt19937_64 rng(mix64(seed));
  auto urand = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto irand = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  ScenarioConfig cfg;
  cfg.state_dim = static_cast<std::size_t>(irand(1, 3));
  cfg.wiener_dim = static_cast<std::size_t>(irand(1, 2));
  cfg.mark_dim = 1;
  cfg.horizon = 1.0;
  cfg.base_steps = 16;
  cfg.refinement_levels = 1;
  cfg.n_paths = 1;
  cfg.master_seed = seed;

  const std::size_t n = cfg.state_dim;
  const std::size_t m = cfg.wiener_dim;
  cfg.initial_state.resize(n);
  for (auto& v : cfg.initial_state) v = urand(-0.5, 0.5);

  std::vector<Vec> drift_pieces(2, Vec(n));
  for (auto& piece : drift_pieces)
    for (auto& v : piece) v = urand(-1.0, 1.0);
  cfg.state_coeffs.drift = PiecewiseSchedule<Vec>(std::move(drift_pieces), cfg.horizon);

  std::vector<Mat> diff_pieces(2, Mat(n, m));
  for (auto& piece : diff_pieces)
    for (auto& v : piece.data()) v = urand(-0.7, 0.7);
  cfg.state_coeffs.diffusion = PiecewiseSchedule<Mat>(std::move(diff_pieces), cfg.horizon);

  JumpMapPiece gpiece;
  gpiece.form = JumpMapPiece::Form::linear;
  gpiece.offset.assign(n, 0.0);
  gpiece.coeff = Mat(n, 1);
  double bound = 0.0;
  if (frozen_with_jumps) {
    double bound_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gpiece.offset[i] = urand(-0.2, 0.2);
      gpiece.coeff(i, 0) = urand(-0.2, 0.2);
      const double row = std::abs(gpiece.offset[i]) + std::abs(gpiece.coeff(i, 0));
      bound_sq += row * row;
    }
    bound = std::sqrt(bound_sq) * (1.0 + 1e-9);
  }
  cfg.state_coeffs.jump_coeff.pieces =
      PiecewiseSchedule<JumpMapPiece>({std::move(gpiece)}, cfg.horizon);
  cfg.state_coeffs.jump_coeff.sup_bound = bound;
  cfg.state_coeffs.jump_coeff.out_dim = n;
  cfg.state_coeffs.jump_coeff.mark_dim = 1;

  cfg.jump_law.total_intensity = frozen_with_jumps ? 3.0 : 0.0;
  cfg.jump_law.mark_sampler = UniformBoxMarks{Vec{-1.0}, Vec{1.0}};

  cfg.field_spec.state_dim = n;
  const int basis_count = irand(1, 3);
  for (int p = 0; p < basis_count; ++p) {
    if (irand(0, 1) == 0) {
      GaussianBumpBasis b;
      b.center.resize(n);
      for (auto& v : b.center) v = urand(-0.6, 0.6);
      b.width = urand(0.6, 1.5);
      cfg.field_spec.basis.emplace_back(std::move(b));
    } else {
      SinusoidBasis b;
      b.frequency.resize(n);
      for (auto& v : b.frequency) v = urand(-2.0, 2.0);
      b.phase = urand(0.0, 3.0);
      cfg.field_spec.basis.emplace_back(std::move(b));
    }
    CoefficientDriver drv;
    drv.initial = urand(-1.0, 1.0);
    if (frozen_with_jumps) {
      drv.drift = PiecewiseSchedule<double>::constant(0.0, cfg.horizon);
      drv.diffusion = PiecewiseSchedule<Vec>::constant(Vec(m, 0.0), cfg.horizon);
    } else {
      drv.drift = PiecewiseSchedule<double>({urand(-1.0, 1.0), urand(-1.0, 1.0)}, cfg.horizon);
      std::vector<Vec> dpieces(2, Vec(m));
      for (auto& piece : dpieces)
        for (auto& v : piece) v = urand(-0.5, 0.5);
      drv.diffusion = PiecewiseSchedule<Vec>(std::move(dpieces), cfg.horizon);
    }
    cfg.field_spec.drivers.push_back(std::move(drv));
  }
  return cfg;
}

SmoothFunction frozen_field_function(const FieldSpec& spec) {
  Vec c0(spec.size());
  for (std::size_t p = 0; p < spec.size(); ++p) c0[p] = spec.drivers[p].initial;
  SmoothFunction fn;
  fn.value = [&spec, c0](double, std::span<const double> x) { return eval_field(c0, spec, x); };
  fn.time_derivative = [](double, std::span<const double>) { return 0.0; };
  fn.gradient = [&spec, c0](double, std::span<const double> x, std::span<double> out) {
    eval_field_grad(c0, spec, x, out);
  };
  fn.hessian = [&spec, c0](double, std::span<const double> x, Mat& out) {
    eval_field_hess(c0, spec, x, out);
  };
  return fn;
}

/// Max deviation between the generalized ledger and the deterministic
/// chain-rule ledger of the frozen field, mapped group by group, including
/// the groups each side requires to be zero.
double frozen_field_deviation(const ScenarioConfig& cfg, const WienerPath& wiener,
                              const JumpStream& jumps) {
  const StateTrajectory traj =
      evolve_state(cfg.state_coeffs, cfg.initial_state, wiener, jumps);
  const FieldPath field = evolve_field(cfg.field_spec, wiener, jumps);
  const RhsLedger gen = accumulate_rhs(cfg.state_coeffs, cfg.field_spec, traj, field, wiener, jumps);

  const SmoothFunction fn = frozen_field_function(cfg.field_spec);
  const ItoLedger ito = classical_ito_increment(fn, cfg.state_coeffs, traj, wiener, jumps);

  double max_dev = 0.0;
  for (std::size_t idx = 0; idx < gen.count(); ++idx) {
    max_dev = std::max(
        {max_dev,
         std::abs(gen.item(idx, RhsGroup::state_drift_grad_dt) -
                  ito.item(idx, ItoGroup::drift_grad_dt)),
         std::abs(gen.item(idx, RhsGroup::quad_variation_dt) -
                  ito.item(idx, ItoGroup::quad_variation_dt)),
         std::abs(gen.item(idx, RhsGroup::grad_noise_dw) - ito.item(idx, ItoGroup::grad_noise_dw)),
         std::abs(gen.item(idx, RhsGroup::jump_field_shift) - ito.item(idx, ItoGroup::jump_shift)),
         std::abs(gen.item(idx, RhsGroup::field_drift_dt)),
         std::abs(gen.item(idx, RhsGroup::field_diffusion_dw)),
         std::abs(gen.item(idx, RhsGroup::diffusion_interaction_dt)),
         std::abs(gen.item(idx, RhsGroup::jump_coeff_shift)),
         std::abs(ito.item(idx, ItoGroup::time_derivative_dt))});
  }
  return max_dev;
}

/// Deterministic quadratic-field chain-rule scenario: pure unit drift,
/// frozen polynomial field, no noise, no jumps.
ScenarioConfig chain_rule_scenario() {
  ScenarioConfig cfg;
  cfg.state_dim = 1;
  cfg.wiener_dim = 1;
  cfg.mark_dim = 1;
  cfg.horizon = 1.0;
  cfg.base_steps = 16;
  cfg.refinement_levels = 5;
  cfg.n_paths = 1;
  cfg.master_seed = 7;
  cfg.initial_state = {0.3};
  cfg.state_coeffs.drift = PiecewiseSchedule<Vec>::constant(Vec{1.0}, cfg.horizon);
  cfg.state_coeffs.diffusion = PiecewiseSchedule<Mat>::constant(Mat(1, 1, 0.0), cfg.horizon);
  JumpMapPiece zero;
  zero.offset = {0.0};
  zero.coeff = Mat(1, 1, 0.0);
  cfg.state_coeffs.jump_coeff = JumpMap{PiecewiseSchedule<JumpMapPiece>({zero}, cfg.horizon),
                                        0.0, 1, 1};
  cfg.jump_law.total_intensity = 0.0;
  cfg.jump_law.mark_sampler = UniformBoxMarks{Vec{-1.0}, Vec{1.0}};
  cfg.field_spec.state_dim = 1;
  cfg.field_spec.basis.emplace_back(PolynomialBasis{{2}});
  CoefficientDriver drv;
  drv.initial = 1.0;
  drv.drift = PiecewiseSchedule<double>::constant(0.0, cfg.horizon);
  drv.diffusion = PiecewiseSchedule<Vec>::constant(Vec{0.0}, cfg.horizon);
  cfg.field_spec.drivers.push_back(std::move(drv));
  cfg.field_spec.state_box = Box{Vec{-10.0}, Vec{10.0}};
  return cfg;
}

}  // namespace

ReductionReport run_reduction_suite(const ScenarioConfig& cfg, std::size_t n_threads) {
  ReductionReport report;
  report.version = kVersion;
  report.fingerprint = scenario_fingerprint_hex(cfg);

  constexpr std::size_t kMatrixSize = 100;

  // classical jump-free rule, itemwise
  {
    Vec diffs(kMatrixSize, 0.0);
    parallel_for(kMatrixSize, n_threads, [&](std::size_t k) {
      const ScenarioConfig scen = make_matrix_scenario(matrix_seed(cfg.master_seed, k, 1), false);
      ensure_valid(scen);
      const WienerPath wiener =
          sample_wiener(scen.grid_at_level(0), scen.wiener_dim,
                        derive_path_seed(scen.master_seed, 0, StreamTag::wiener));
      const ReductionComparison cmp =
          reduction_check(scen.state_coeffs, scen.field_spec, scen.initial_state, wiener);
      diffs[k] = std::max(cmp.max_item_diff, cmp.max_jump_group_abs);
    });
    ReductionRow row;
    row.name = "classical-iw-itemwise";
    row.cases = kMatrixSize;
    row.measured = *std::max_element(diffs.begin(), diffs.end());
    row.threshold = 1e-14;
    row.pass = row.measured <= row.threshold;
    report.rows.push_back(row);
  }

  // deterministic chain rule: left-point error of the quadratic field is
  // first order in dt
  {
    const ScenarioConfig scen = chain_rule_scenario();
    ensure_valid(scen);
    const TimeGrid finest = scen.grid_at_level(scen.refinement_levels - 1);
    const WienerPath finest_path =
        sample_wiener(finest, scen.wiener_dim, derive_path_seed(scen.master_seed, 0, StreamTag::wiener));
    Vec log_dt;
    Vec log_res;
    for (std::size_t level = 0; level < scen.refinement_levels; ++level) {
      const std::size_t factor = std::size_t{1} << (scen.refinement_levels - 1 - level);
      const WienerPath wiener = coarsen_wiener(finest_path, factor);
      JumpStream no_jumps;
      no_jumps.horizon = scen.horizon;
      no_jumps.marks = Mat(0, 1);
      const PathVerification v = verify_path(scen.state_coeffs, scen.field_spec,
                                             scen.initial_state, wiener, no_jumps);
      log_dt.push_back(std::log2(wiener.grid.dt()));
      log_res.push_back(std::log2(std::max(std::abs(v.residual_at_horizon), 1e-300)));
    }
    const SlopeFit fit = fit_line(log_dt, log_res);
    ReductionRow row;
    row.name = "chain-rule-slope";
    row.cases = scen.refinement_levels;
    row.measured = fit.slope;
    row.threshold = 0.2;  // |slope - 1| tolerance
    row.pass = std::abs(row.measured - 1.0) <= row.threshold;
    report.rows.push_back(row);
  }

  // noisy quadratic under the deterministic chain rule: refinement slope of
  // the rule's residual with common noise
  {
    StateCoefficients coeffs;
    coeffs.drift = PiecewiseSchedule<Vec>::constant(Vec{0.1}, 1.0);
    coeffs.diffusion = PiecewiseSchedule<Mat>::constant(Mat(1, 1, 0.4), 1.0);
    JumpMapPiece zero;
    zero.offset = {0.0};
    zero.coeff = Mat(1, 1, 0.0);
    coeffs.jump_coeff = JumpMap{PiecewiseSchedule<JumpMapPiece>({zero}, 1.0), 0.0, 1, 1};

    SmoothFunction fn;
    fn.value = [](double, std::span<const double> x) { return x[0] * x[0]; };
    fn.time_derivative = [](double, std::span<const double>) { return 0.0; };
    fn.gradient = [](double, std::span<const double> x, std::span<double> g) {
      g[0] = 2.0 * x[0];
    };
    fn.hessian = [](double, std::span<const double>, Mat& h) { h(0, 0) = 2.0; };

    constexpr std::size_t kPaths = 400;
    constexpr std::size_t kLevels = 4;
    Vec sq(kPaths * kLevels, 0.0);
    parallel_for(kPaths, n_threads, [&](std::size_t path) {
      JumpStream no_jumps;
      no_jumps.horizon = 1.0;
      no_jumps.marks = Mat(0, 1);
      const auto finest =
          sample_wiener(TimeGrid{16 << (kLevels - 1), 1.0}, 1,
                        derive_path_seed(matrix_seed(cfg.master_seed, path, 3), 0,
                                         StreamTag::wiener));
      for (std::size_t level = 0; level < kLevels; ++level) {
        const auto wiener = coarsen_wiener(finest, std::size_t{1} << (kLevels - 1 - level));
        const auto traj = evolve_state(coeffs, Vec{1.0}, wiener, no_jumps);
        const auto ledger = classical_ito_increment(fn, coeffs, traj, wiener, no_jumps);
        const double x_T = traj.state(traj.count() - 1)[0];
        const double r = (x_T * x_T - 1.0) - ledger.final_total();
        sq[path * kLevels + level] = r * r;
      }
    });
    Vec log_dt;
    Vec log_rms;
    for (std::size_t level = 0; level < kLevels; ++level) {
      double acc = 0.0;
      for (std::size_t path = 0; path < kPaths; ++path) acc += sq[path * kLevels + level];
      log_dt.push_back(std::log2(1.0 / static_cast<double>(16 << level)));
      log_rms.push_back(std::log2(std::sqrt(acc / static_cast<double>(kPaths))));
    }
    const SlopeFit fit = fit_line(log_dt, log_rms);
    ReductionRow row;
    row.name = "ito-quadratic-slope";
    row.cases = kPaths;
    row.measured = fit.slope;
    row.threshold = 0.4;
    row.pass = row.measured >= row.threshold;
    report.rows.push_back(row);
  }

  // frozen field against the jump-diffusion chain rule
  {
    Vec diffs(kMatrixSize, 0.0);
    parallel_for(kMatrixSize, n_threads, [&](std::size_t k) {
      const ScenarioConfig scen = make_matrix_scenario(matrix_seed(cfg.master_seed, k, 2), true);
      ensure_valid(scen);
      const WienerPath wiener =
          sample_wiener(scen.grid_at_level(0), scen.wiener_dim,
                        derive_path_seed(scen.master_seed, 0, StreamTag::wiener));
      const JumpStream jumps =
          sample_jumps(scen.horizon, scen.jump_law,
                       derive_path_seed(scen.master_seed, 0, StreamTag::jumps),
                       derive_path_seed(scen.master_seed, 0, StreamTag::marks));
      diffs[k] = frozen_field_deviation(scen, wiener, jumps);
    });
    ReductionRow row;
    row.name = "frozen-field-ito";
    row.cases = kMatrixSize;
    row.measured = *std::max_element(diffs.begin(), diffs.end());
    row.threshold = 1e-12;
    row.pass = row.measured <= row.threshold;
    report.rows.push_back(row);
  }

  report.pass = true;
  for (const auto& row : report.rows) report.pass = report.pass && row.pass;
  return report;
}

// ---------------------------------------------------------------------------
// mollifier suite
// ---------------------------------------------------------------------------

namespace {

/// E|Z|^s for standard normal Z: 2^{s/2} Gamma((s+1)/2) / sqrt(pi).
double abs_normal_moment(double s) {
  return std::pow(2.0, s / 2.0) * std::tgamma((s + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
}

}  // namespace

MollifierReport run_mollifier_suite(const Vec& eps_grid, std::size_t nodes_per_axis,
                                    double cutoff_radius) {
  MollifierReport report;
  report.version = kVersion;
  report.bound_note =
      "exponent-1 rows use the exact closed-form bound constant; exponent < 1 "
      "rows extend the same shape with eps^s and are empirical";

  auto make_params = [&](double eps, std::size_t dim) {
    MollifierParams p;
    p.epsilon = eps;
    p.dim = dim;
    p.nodes_per_axis = nodes_per_axis;
    p.cutoff_radius = cutoff_radius;
    return p;
  };

  auto add_row = [&](std::string name, double eps, double measured, double reference,
                     double tolerance, double bound, bool pass) {
    report.rows.push_back(
        {std::move(name), eps, measured, reference, tolerance, bound, pass});
  };

  // Holder-kink rows: measured smoothing error at the kink versus the
  // closed-form value eps^s * E|Z|^s and the printed bound.
  const double holder_exponents[] = {1.0, 0.75, 0.5};
  for (double s : holder_exponents) {
    Vec log_eps;
    Vec log_err;
    for (double eps : eps_grid) {
      const MollifierParams params = make_params(eps, 1);
      const double x0 = 0.0;
      const double measured = std::abs(mollify(
          [s](std::span<const double> y) { return std::pow(std::abs(y[0]), s); },
          std::span<const double>(&x0, 1), params));
      const double reference = std::pow(eps, s) * abs_normal_moment(s);
      const double bound = holder_error_bound(params, HolderWitness{1.0, s});
      const double tolerance = s == 1.0 ? 1e-6 : 1e-4;
      const bool pass = std::abs(measured - reference) <= tolerance && measured <= bound;
      char name[64];
      std::snprintf(name, sizeof(name), "holder-kink-%.2f", s);
      add_row(name, eps, measured, reference, tolerance, bound, pass);
      log_eps.push_back(std::log(eps));
      log_err.push_back(std::log(std::max(measured, 1e-300)));
    }
    if (eps_grid.size() >= 2) {
      const SlopeFit fit = fit_line(log_eps, log_err);
      char name[64];
      std::snprintf(name, sizeof(name), "smoothing-order-%.2f", s);
      const bool pass = fit.slope >= s - 0.05;
      add_row(name, 0.0, fit.slope, s, 0.05, std::numeric_limits<double>::infinity(), pass);
    }
  }

  // normalization of the kernel itself, dimensions 1..3
  for (std::size_t dim = 1; dim <= 3; ++dim) {
    for (double eps : eps_grid) {
      const MollifierParams params = make_params(eps, dim);
      Vec x(dim, 0.25);
      const double measured =
          mollify([](std::span<const double>) { return 1.0; }, x, params);
      const bool pass = std::abs(measured - 1.0) <= 1e-10;
      add_row("normalization-" + std::to_string(dim) + "d", eps, measured, 1.0, 1e-10,
              1.0 + 1e-10, pass);
    }
  }

  // closed-form smoothing values
  for (double eps : eps_grid) {
    const MollifierParams params = make_params(eps, 1);
    const double x_lin = 2.0;
    const double lin = mollify([](std::span<const double> y) { return y[0]; },
                               std::span<const double>(&x_lin, 1), params);
    add_row("linear-at-2", eps, lin, 2.0, 1e-10, 2.0 + 1e-10, std::abs(lin - 2.0) <= 1e-10);

    const double x_quad = 0.0;
    const double quad = mollify([](std::span<const double> y) { return y[0] * y[0]; },
                                std::span<const double>(&x_quad, 1), params);
    const double ref = eps * eps;
    add_row("quadratic-second-moment", eps, quad, ref, 1e-8, ref + 1e-8,
            std::abs(quad - ref) <= 1e-8);

    const double x_c = -1.0;
    const double c = mollify([](std::span<const double>) { return 5.0; },
                             std::span<const double>(&x_c, 1), params);
    add_row("constant-5", eps, c, 5.0, 1e-10, 5.0 + 1e-10, std::abs(c - 5.0) <= 1e-10);
  }

  // derivative-transfer identities on a fixed smooth suite
  struct TransferCase {
    const char* name;
    double x;
    ScalarFn f;
    ScalarFn df;
    ScalarFn d2f;
  };
  const TransferCase cases[] = {
      {"quadratic-at-1", 1.0, [](double y) { return y * y; }, [](double y) { return 2.0 * y; },
       [](double) { return 2.0; }},
      {"cubic-at-0", 0.0, [](double y) { return y * y * y; },
       [](double y) { return 3.0 * y * y; }, [](double y) { return 6.0 * y; }},
      {"gaussian-at-0.3", 0.3, [](double y) { return std::exp(-y * y / 2.0); },
       [](double y) { return -y * std::exp(-y * y / 2.0); },
       [](double y) { return (y * y - 1.0) * std::exp(-y * y / 2.0); }},
      {"sine-at-0.7", 0.7, [](double y) { return std::sin(2.0 * y); },
       [](double y) { return 2.0 * std::cos(2.0 * y); },
       [](double y) { return -4.0 * std::sin(2.0 * y); }},
      {"constant-at-0", 0.0, [](double) { return 3.0; }, [](double) { return 0.0; },
       [](double) { return 0.0; }},
  };
  for (const auto& tc : cases) {
    for (double eps : eps_grid) {
      const MollifierParams params = make_params(eps, 1);
      const auto [lhs1, rhs1] = mollify_grad_transfer(tc.f, tc.df, tc.x, params);
      const double d1 = std::abs(lhs1 - rhs1);
      add_row(std::string("transfer-grad-") + tc.name, eps, d1, 0.0, 1e-6, 1e-6, d1 <= 1e-6);
      const auto [lhs2, rhs2] = mollify_hess_transfer(tc.f, tc.d2f, tc.x, params);
      const double d2 = std::abs(lhs2 - rhs2);
      add_row(std::string("transfer-hess-") + tc.name, eps, d2, 0.0, 1e-6, 1e-6, d2 <= 1e-6);
    }
  }

  report.pass = true;
  for (const auto& row : report.rows) report.pass = report.pass && row.pass;
  return report;
}

FepsReport run_feps_study(const ScenarioConfig& cfg, const FepsParams& params) {
  FepsReport report;
  report.version = kVersion;
  report.fingerprint = scenario_fingerprint_hex(cfg);
  report.table = ms_convergence_study(cfg, params);
  report.slope_criterion_note =
      "slope threshold is an empirical acceptance level; the underlying limit "
      "statement carries no rate";
  report.pass = report.table.strictly_decreasing &&
                (report.table.loglog_fit.slope - 2.0 * report.table.loglog_fit.std_error) >=
                    report.slope_threshold &&
                report.table.max_bound_margin <= 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

std::string to_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "# report=residual-convergence\n";
  os << "# version=" << report.version << "\n";
  os << "# fingerprint=" << report.fingerprint << "\n";
  os << "# slope=" << fmt(report.slope.slope) << " slope_stderr=" << fmt(report.slope.std_error)
     << " slope_threshold=" << fmt_short(report.slope_threshold)
     << " jump_tolerance=" << fmt_short(report.jump_tolerance)
     << " strictly_decreasing=" << (report.strictly_decreasing ? 1 : 0)
     << " pass=" << (report.pass ? 1 : 0) << "\n";
  os << "dt,n_paths,rms_residual,max_abs_residual,jump_residual_max,ci_halfwidth\n";
  for (const auto& row : report.rows)
    os << fmt(row.dt) << ',' << row.n_paths << ',' << fmt(row.rms_residual) << ','
       << fmt(row.max_abs_residual) << ',' << fmt(row.jump_residual_max) << ','
       << fmt(row.ci_halfwidth) << "\n";
  return os.str();
}

std::string to_csv(const ReductionReport& report) {
  std::ostringstream os;
  os << "# report=reduction-suite\n";
  os << "# version=" << report.version << "\n";
  os << "# fingerprint=" << report.fingerprint << "\n";
  os << "# pass=" << (report.pass ? 1 : 0) << "\n";
  os << "name,cases,measured,threshold,pass\n";
  for (const auto& row : report.rows)
    os << row.name << ',' << row.cases << ',' << fmt(row.measured) << ','
       << fmt_short(row.threshold) << ',' << (row.pass ? 1 : 0) << "\n";
  return os.str();
}

std::string to_csv(const MollifierReport& report) {
  std::ostringstream os;
  os << "# report=mollifier-suite\n";
  os << "# version=" << report.version << "\n";
  os << "# note=" << report.bound_note << "\n";
  os << "# pass=" << (report.pass ? 1 : 0) << "\n";
  os << "name,epsilon,measured,reference,tolerance,bound,pass\n";
  for (const auto& row : report.rows)
    os << row.name << ',' << fmt_short(row.epsilon) << ',' << fmt(row.measured) << ','
       << fmt(row.reference) << ',' << fmt_short(row.tolerance) << ',' << fmt(row.bound) << ','
       << (row.pass ? 1 : 0) << "\n";
  return os.str();
}

std::string to_csv(const FepsReport& report) {
  std::ostringstream os;
  os << "# report=feps-ms-convergence\n";
  os << "# version=" << report.version << "\n";
  os << "# fingerprint=" << report.fingerprint << "\n";
  os << "# slope=" << fmt(report.table.loglog_fit.slope)
     << " slope_stderr=" << fmt(report.table.loglog_fit.std_error)
     << " slope_threshold=" << fmt_short(report.slope_threshold)
     << " strictly_decreasing=" << (report.table.strictly_decreasing ? 1 : 0)
     << " max_bound_margin=" << fmt(report.table.max_bound_margin)
     << " pass=" << (report.pass ? 1 : 0) << "\n";
  os << "# note=" << report.slope_criterion_note << "\n";
  os << "epsilon,mse,ci_halfwidth,n_paths,seed\n";
  for (const auto& row : report.table.rows)
    os << fmt_short(row.epsilon) << ',' << fmt(row.mse) << ',' << fmt(row.ci_halfwidth) << ','
       << row.n_paths << ',' << row.seed << "\n";
  return os.str();
}

nlohmann::json to_json(const ConvergenceReport& report) {
  nlohmann::json doc;
  doc["report"] = "residual-convergence";
  doc["version"] = report.version;
  doc["fingerprint"] = report.fingerprint;
  doc["slope"] = report.slope.slope;
  doc["slope_stderr"] = report.slope.std_error;
  doc["slope_threshold"] = report.slope_threshold;
  doc["jump_tolerance"] = report.jump_tolerance;
  doc["strictly_decreasing"] = report.strictly_decreasing;
  doc["pass"] = report.pass;
  auto rows = nlohmann::json::array();
  for (const auto& row : report.rows)
    rows.push_back({{"dt", row.dt},
                    {"n_paths", row.n_paths},
                    {"rms_residual", row.rms_residual},
                    {"max_abs_residual", row.max_abs_residual},
                    {"jump_residual_max", row.jump_residual_max},
                    {"ci_halfwidth", row.ci_halfwidth}});
  doc["rows"] = std::move(rows);
  return doc;
}

nlohmann::json to_json(const ReductionReport& report) {
  nlohmann::json doc;
  doc["report"] = "reduction-suite";
  doc["version"] = report.version;
  doc["fingerprint"] = report.fingerprint;
  doc["pass"] = report.pass;
  auto rows = nlohmann::json::array();
  for (const auto& row : report.rows)
    rows.push_back({{"name", row.name},
                    {"cases", row.cases},
                    {"measured", row.measured},
                    {"threshold", row.threshold},
                    {"pass", row.pass}});
  doc["rows"] = std::move(rows);
  return doc;
}

nlohmann::json to_json(const MollifierReport& report) {
  nlohmann::json doc;
  doc["report"] = "mollifier-suite";
  doc["version"] = report.version;
  doc["note"] = report.bound_note;
  doc["pass"] = report.pass;
  auto rows = nlohmann::json::array();
  for (const auto& row : report.rows)
    rows.push_back({{"name", row.name},
                    {"epsilon", row.epsilon},
                    {"measured", row.measured},
                    {"reference", row.reference},
                    {"tolerance", row.tolerance},
                    {"bound", row.bound},
                    {"pass", row.pass}});
  doc["rows"] = std::move(rows);
  return doc;
}

nlohmann::json to_json(const FepsReport& report) {
  nlohmann::json doc;
  doc["report"] = "feps-ms-convergence";
  doc["version"] = report.version;
  doc["fingerprint"] = report.fingerprint;
  doc["slope"] = report.table.loglog_fit.slope;
  doc["slope_stderr"] = report.table.loglog_fit.std_error;
  doc["slope_threshold"] = report.slope_threshold;
  doc["strictly_decreasing"] = report.table.strictly_decreasing;
  doc["max_bound_margin"] = report.table.max_bound_margin;
  doc["note"] = report.slope_criterion_note;
  doc["pass"] = report.pass;
  auto rows = nlohmann::json::array();
  for (const auto& row : report.table.rows)
    rows.push_back({{"epsilon", row.epsilon},
                    {"mse", row.mse},
                    {"ci_halfwidth", row.ci_halfwidth},
                    {"n_paths", row.n_paths},
                    {"seed", row.seed}});
  doc["rows"] = std::move(rows);
  return doc;
}

}  // namespace itw
