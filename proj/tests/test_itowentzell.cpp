#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <itw/errors.hpp>
#include <itw/itowentzell.hpp>
#include <itw/rng.hpp>
#include <itw/stats.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace itw;

namespace {

struct FullScenario {
  StateCoefficients coeffs;
  FieldSpec spec;
  Vec x0;
  MarkDistribution law{4.0, UniformBoxMarks{Vec{-1.0}, Vec{1.0}}};
};

/// Every coefficient family active and generically nonzero.
FullScenario full_scenario(double horizon = 1.0) {
  FullScenario s;
  s.x0 = {0.1, -0.05};
  s.coeffs.drift = PiecewiseSchedule<Vec>::constant(Vec{0.3, -0.2}, horizon);
  Mat b(2, 2);
  b(0, 0) = 0.25;
  b(0, 1) = 0.1;
  b(1, 0) = -0.05;
  b(1, 1) = 0.2;
  s.coeffs.diffusion = PiecewiseSchedule<Mat>::constant(b, horizon);
  JumpMapPiece gp;
  gp.form = JumpMapPiece::Form::linear;
  gp.offset = {0.1, -0.08};
  gp.coeff = Mat(2, 1, 0.05);
  s.coeffs.jump_coeff = JumpMap{PiecewiseSchedule<JumpMapPiece>({gp}, horizon), 0.25, 2, 1};

  s.spec.state_dim = 2;
  s.spec.basis.emplace_back(GaussianBumpBasis{Vec{0.2, -0.1}, 0.9});
  s.spec.basis.emplace_back(SinusoidBasis{Vec{1.1, -0.6}, 0.3});
  const double qs[2] = {0.4, -0.3};
  const Vec ds[2] = {Vec{0.15, -0.1}, Vec{0.05, 0.2}};
  const double goff[2] = {0.12, -0.07};
  const double gco[2] = {0.06, 0.03};
  for (int p = 0; p < 2; ++p) {
    CoefficientDriver drv;
    drv.initial = p == 0 ? 0.8 : -0.5;
    drv.drift = PiecewiseSchedule<double>::constant(qs[p], horizon);
    drv.diffusion = PiecewiseSchedule<Vec>::constant(ds[p], horizon);
    JumpMapPiece jp;
    jp.form = JumpMapPiece::Form::linear;
    jp.offset = {goff[p]};
    jp.coeff = Mat(1, 1, gco[p]);
    drv.jump = JumpMap{PiecewiseSchedule<JumpMapPiece>({jp}, horizon),
                       std::abs(goff[p]) + std::abs(gco[p]) + 1e-12, 1, 1};
    s.spec.drivers.push_back(std::move(drv));
  }
  return s;
}

NoisePath sample_noise(const FullScenario& s, const TimeGrid& grid, std::uint64_t master,
                       std::size_t path) {
  NoisePath noise;
  noise.wiener = sample_wiener(grid, 2, derive_path_seed(master, path, StreamTag::wiener));
  noise.jumps = sample_jumps(grid.horizon, s.law, derive_path_seed(master, path, StreamTag::jumps),
                             derive_path_seed(master, path, StreamTag::marks));
  return noise;
}

}  // namespace

TEST_CASE("all-zero coefficients give an identically zero ledger") {
  auto s = full_scenario();
  s.coeffs.drift = PiecewiseSchedule<Vec>::constant(Vec{0.0, 0.0}, 1.0);
  s.coeffs.diffusion = PiecewiseSchedule<Mat>::constant(Mat(2, 2, 0.0), 1.0);
  s.coeffs.jump_coeff = test::zero_jump_map(2, 1, 1.0);
  for (auto& drv : s.spec.drivers) {
    drv.drift = PiecewiseSchedule<double>::constant(0.0, 1.0);
    drv.diffusion = PiecewiseSchedule<Vec>::constant(Vec{0.0, 0.0}, 1.0);
    drv.jump.reset();
  }
  const auto noise = sample_noise(s, TimeGrid{32, 1.0}, 10, 0);
  const auto v = verify_path(s.coeffs, s.spec, s.x0, noise.wiener, noise.jumps);
  for (std::size_t idx = 0; idx < v.ledger.count(); ++idx) {
    CHECK(v.ledger.total(idx) == 0.0);
    for (double item : v.ledger.row(idx)) CHECK(item == 0.0);
  }
  CHECK(v.residual_at_horizon == 0.0);
}

TEST_CASE("pure field drift is exact under the left-point rule") {
  auto s = full_scenario();
  s.coeffs.drift = PiecewiseSchedule<Vec>::constant(Vec{0.0, 0.0}, 1.0);
  s.coeffs.diffusion = PiecewiseSchedule<Mat>::constant(Mat(2, 2, 0.0), 1.0);
  s.coeffs.jump_coeff = test::zero_jump_map(2, 1, 1.0);
  s.law.total_intensity = 0.0;
  for (auto& drv : s.spec.drivers) {
    drv.drift = PiecewiseSchedule<double>({0.7, -0.2}, 1.0);  // piecewise constant in t only
    drv.diffusion = PiecewiseSchedule<Vec>::constant(Vec{0.0, 0.0}, 1.0);
    drv.jump.reset();
  }
  const auto noise = sample_noise(s, TimeGrid{16, 1.0}, 11, 0);
  const auto v = verify_path(s.coeffs, s.spec, s.x0, noise.wiener, noise.jumps);
  // the state is frozen, so Q(t, x0) is piecewise constant and the
  // left-point sum equals the time integral exactly
  CHECK(std::abs(v.residual_at_horizon) <= 1e-13);
  const std::size_t last = v.ledger.count() - 1;
  CHECK(v.ledger.item(last, RhsGroup::field_drift_dt) ==
        doctest::Approx(v.ledger.total(last)).epsilon(1e-15));
}

TEST_CASE("single-jump scenario: only the jump groups fire") {
  auto s = full_scenario();
  s.coeffs.drift = PiecewiseSchedule<Vec>::constant(Vec{0.0, 0.0}, 1.0);
  s.coeffs.diffusion = PiecewiseSchedule<Mat>::constant(Mat(2, 2, 0.0), 1.0);
  for (auto& drv : s.spec.drivers) {
    drv.drift = PiecewiseSchedule<double>::constant(0.0, 1.0);
    drv.diffusion = PiecewiseSchedule<Vec>::constant(Vec{0.0, 0.0}, 1.0);
  }
  JumpStream one;
  one.horizon = 1.0;
  one.times = {0.4375};
  one.marks = Mat(1, 1, 0.3);
  const auto wiener = sample_wiener(TimeGrid{8, 1.0}, 2, 5);

  const auto traj = evolve_state(s.coeffs, s.x0, wiener, one);
  const auto field = evolve_field(s.spec, wiener, one);
  const auto ledger = accumulate_rhs(s.coeffs, s.spec, traj, field, wiener, one);
  const std::size_t last = ledger.count() - 1;

  CHECK(ledger.item(last, RhsGroup::field_drift_dt) == 0.0);
  CHECK(ledger.item(last, RhsGroup::field_diffusion_dw) == 0.0);
  CHECK(ledger.item(last, RhsGroup::state_drift_grad_dt) == 0.0);
  CHECK(ledger.item(last, RhsGroup::quad_variation_dt) == 0.0);
  CHECK(ledger.item(last, RhsGroup::diffusion_interaction_dt) == 0.0);
  CHECK(ledger.item(last, RhsGroup::grad_noise_dw) == 0.0);
  CHECK(ledger.item(last, RhsGroup::jump_field_shift) != 0.0);
  CHECK(ledger.item(last, RhsGroup::jump_coeff_shift) != 0.0);

  // total is exactly the two jump terms, and the residual is pure rounding
  const double res = lhs_increment(field, s.spec, traj, last) - ledger.total(last);
  CHECK(std::abs(res) <= 1e-12);
  CHECK(ledger.max_jump_deviation() <= 1e-12);
}

TEST_CASE("lhs increments on frozen and drifting configurations") {
  // frozen field + frozen state
  auto s = full_scenario();
  s.coeffs.drift = PiecewiseSchedule<Vec>::constant(Vec{0.0, 0.0}, 2.0);
  s.coeffs.diffusion = PiecewiseSchedule<Mat>::constant(Mat(2, 2, 0.0), 2.0);
  s.coeffs.jump_coeff = test::zero_jump_map(2, 1, 2.0);
  FieldSpec frozen;
  frozen.state_dim = 2;
  frozen.basis.emplace_back(PolynomialBasis{{1, 0}});  // F = c * x1
  CoefficientDriver drv;
  drv.initial = 1.0;
  drv.drift = PiecewiseSchedule<double>::constant(0.0, 2.0);
  drv.diffusion = PiecewiseSchedule<Vec>::constant(Vec{0.0, 0.0}, 2.0);
  frozen.drivers.push_back(drv);

  JumpStream no_jumps;
  no_jumps.horizon = 2.0;
  no_jumps.marks = Mat(0, 1);
  const auto wiener = sample_wiener(TimeGrid{16, 2.0}, 2, 3);

  {
    const auto traj = evolve_state(s.coeffs, s.x0, wiener, no_jumps);
    const auto field = evolve_field(frozen, wiener, no_jumps);
    CHECK(lhs_increment(field, frozen, traj, traj.count() - 1) == 0.0);
  }
  {
    // pure unit drift on x1 over T = 2 moves F = x1 by 2
    auto drift = s.coeffs;
    drift.drift = PiecewiseSchedule<Vec>::constant(Vec{1.0, 0.0}, 2.0);
    const auto traj = evolve_state(drift, s.x0, wiener, no_jumps);
    const auto field = evolve_field(frozen, wiener, no_jumps);
    CHECK(lhs_increment(field, frozen, traj, traj.count() - 1) ==
          doctest::Approx(2.0).epsilon(1e-14));
  }
  {
    // frozen state, coefficient drift 3 on a flat basis over T = 1
    FieldSpec flat;
    flat.state_dim = 2;
    flat.basis.emplace_back(PolynomialBasis{{0, 0}});
    CoefficientDriver d2;
    d2.initial = 0.5;
    d2.drift = PiecewiseSchedule<double>::constant(3.0, 1.0);
    d2.diffusion = PiecewiseSchedule<Vec>::constant(Vec{0.0, 0.0}, 1.0);
    flat.drivers.push_back(d2);
    auto frozen_state = s.coeffs;
    frozen_state.drift = PiecewiseSchedule<Vec>::constant(Vec{0.0, 0.0}, 1.0);
    const auto w1 = sample_wiener(TimeGrid{8, 1.0}, 2, 9);
    JumpStream nj;
    nj.horizon = 1.0;
    nj.marks = Mat(0, 1);
    frozen_state.diffusion = PiecewiseSchedule<Mat>::constant(Mat(2, 2, 0.0), 1.0);
    frozen_state.jump_coeff = test::zero_jump_map(2, 1, 1.0);
    const auto traj = evolve_state(frozen_state, s.x0, w1, nj);
    const auto field = evolve_field(flat, w1, nj);
    CHECK(lhs_increment(field, flat, traj, traj.count() - 1) ==
          doctest::Approx(3.0).epsilon(1e-14));
  }
}

TEST_CASE("deterministic reduction: left-point error is exactly dt * T") {
  // F(x) = x^2 frozen, dx = dt, x0 arbitrary: residual(T) = T * dt
  StateCoefficients coeffs;
  coeffs.drift = PiecewiseSchedule<Vec>::constant(Vec{1.0}, 1.0);
  coeffs.diffusion = PiecewiseSchedule<Mat>::constant(Mat(1, 1, 0.0), 1.0);
  coeffs.jump_coeff = test::zero_jump_map(1, 1, 1.0);
  FieldSpec spec;
  spec.state_dim = 1;
  spec.basis.emplace_back(PolynomialBasis{{2}});
  CoefficientDriver drv;
  drv.initial = 1.0;
  drv.drift = PiecewiseSchedule<double>::constant(0.0, 1.0);
  drv.diffusion = PiecewiseSchedule<Vec>::constant(Vec{0.0}, 1.0);
  spec.drivers.push_back(drv);

  JumpStream no_jumps;
  no_jumps.horizon = 1.0;
  no_jumps.marks = Mat(0, 1);

  Vec log_dt;
  Vec log_res;
  for (std::size_t steps : {16, 32, 64, 128}) {
    const auto wiener = sample_wiener(TimeGrid{steps, 1.0}, 1, 4);
    const auto v = verify_path(coeffs, spec, Vec{0.3}, wiener, no_jumps);
    const double dt = 1.0 / static_cast<double>(steps);
    CHECK(v.residual_at_horizon == doctest::Approx(dt).epsilon(1e-10));
    log_dt.push_back(std::log2(dt));
    log_res.push_back(std::log2(std::abs(v.residual_at_horizon)));
  }
  const auto fit = fit_line(log_dt, log_res);
  CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("jump bookkeeping is exact per event on a busy scenario") {
  const auto s = full_scenario();
  for (std::size_t path = 0; path < 20; ++path) {
    const auto noise = sample_noise(s, TimeGrid{32, 1.0}, 777, path);
    const auto v = verify_path(s.coeffs, s.spec, s.x0, noise.wiener, noise.jumps);
    CHECK(v.max_jump_deviation <= 1e-12);
  }
}

TEST_CASE("running total equals the sum of itemized entries") {
  const auto s = full_scenario();
  const auto noise = sample_noise(s, TimeGrid{64, 1.0}, 4242, 1);
  const auto v = verify_path(s.coeffs, s.spec, s.x0, noise.wiener, noise.jumps);
  for (std::size_t idx = 0; idx < v.ledger.count(); ++idx) {
    double sum = 0.0;
    for (double item : v.ledger.row(idx)) sum += item;
    CHECK(std::abs(sum - v.ledger.total(idx)) <=
          1e-13 * std::max(1.0, std::abs(v.ledger.total(idx))));
  }
}

TEST_CASE("term isolation: zeroing one family zeroes exactly its groups") {
  const TimeGrid grid{32, 1.0};

  auto run = [&](const FullScenario& s) {
    const auto noise = sample_noise(s, grid, 909, 3);
    const auto v = verify_path(s.coeffs, s.spec, s.x0, noise.wiener, noise.jumps);
    return v.ledger;
  };

  const auto base = full_scenario();
  {
    const auto ledger = run(base);
    const std::size_t last = ledger.count() - 1;
    for (std::size_t g = 0; g < kRhsGroupCount; ++g)
      CHECK(std::abs(ledger.row(last)[g]) > 1e-10);  // generic scenario: all groups live
  }

  auto expect_zero = [&](const FullScenario& s, std::initializer_list<RhsGroup> zero_groups) {
    const auto ledger = run(s);
    const std::size_t last = ledger.count() - 1;
    for (RhsGroup g : zero_groups) CHECK(ledger.item(last, g) == 0.0);
    std::size_t nonzero = 0;
    for (std::size_t g = 0; g < kRhsGroupCount; ++g) {
      bool zeroed = false;
      for (RhsGroup zg : zero_groups) zeroed = zeroed || (static_cast<std::size_t>(zg) == g);
      if (!zeroed && std::abs(ledger.row(last)[g]) > 1e-10) ++nonzero;
    }
    CHECK(nonzero == kRhsGroupCount - zero_groups.size());
  };

  {
    auto s = full_scenario();
    s.coeffs.drift = PiecewiseSchedule<Vec>::constant(Vec{0.0, 0.0}, 1.0);
    expect_zero(s, {RhsGroup::state_drift_grad_dt});
  }
  {
    auto s = full_scenario();
    s.coeffs.diffusion = PiecewiseSchedule<Mat>::constant(Mat(2, 2, 0.0), 1.0);
    expect_zero(s, {RhsGroup::quad_variation_dt, RhsGroup::diffusion_interaction_dt,
                    RhsGroup::grad_noise_dw});
  }
  {
    auto s = full_scenario();
    for (auto& drv : s.spec.drivers) drv.drift = PiecewiseSchedule<double>::constant(0.0, 1.0);
    expect_zero(s, {RhsGroup::field_drift_dt});
  }
  {
    auto s = full_scenario();
    for (auto& drv : s.spec.drivers)
      drv.diffusion = PiecewiseSchedule<Vec>::constant(Vec{0.0, 0.0}, 1.0);
    expect_zero(s, {RhsGroup::field_diffusion_dw, RhsGroup::diffusion_interaction_dt});
  }
  {
    auto s = full_scenario();
    s.coeffs.jump_coeff = test::zero_jump_map(2, 1, 1.0);
    expect_zero(s, {RhsGroup::jump_field_shift});
  }
  {
    auto s = full_scenario();
    for (auto& drv : s.spec.drivers) drv.jump.reset();
    expect_zero(s, {RhsGroup::jump_coeff_shift});
  }
}

TEST_CASE("chain rule for deterministic functions: simple closed forms") {
  StateCoefficients coeffs;
  coeffs.drift = PiecewiseSchedule<Vec>::constant(Vec{0.5}, 1.0);
  coeffs.diffusion = PiecewiseSchedule<Mat>::constant(Mat(1, 1, 0.0), 1.0);
  coeffs.jump_coeff = test::zero_jump_map(1, 1, 1.0);
  const auto wiener = sample_wiener(TimeGrid{16, 1.0}, 1, 8);
  JumpStream no_jumps;
  no_jumps.horizon = 1.0;
  no_jumps.marks = Mat(0, 1);
  const auto traj = evolve_state(coeffs, Vec{0.0}, wiener, no_jumps);

  {
    // F = x1: total = sum a dt = 0.5
    SmoothFunction fn;
    fn.value = [](double, std::span<const double> x) { return x[0]; };
    fn.time_derivative = [](double, std::span<const double>) { return 0.0; };
    fn.gradient = [](double, std::span<const double>, std::span<double> g) { g[0] = 1.0; };
    fn.hessian = [](double, std::span<const double>, Mat& h) { h(0, 0) = 0.0; };
    const auto ledger = classical_ito_increment(fn, coeffs, traj, wiener, no_jumps);
    CHECK(ledger.final_total() == doctest::Approx(0.5).epsilon(1e-14));
  }
  {
    // F = t: total = sum dt = T exactly
    SmoothFunction fn;
    fn.value = [](double t, std::span<const double>) { return t; };
    fn.time_derivative = [](double, std::span<const double>) { return 1.0; };
    fn.gradient = [](double, std::span<const double>, std::span<double> g) { g[0] = 0.0; };
    fn.hessian = [](double, std::span<const double>, Mat& h) { h(0, 0) = 0.0; };
    const auto ledger = classical_ito_increment(fn, coeffs, traj, wiener, no_jumps);
    CHECK(ledger.final_total() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("chain rule for x^2 with noise: correction term and strong order") {
  StateCoefficients coeffs;
  coeffs.drift = PiecewiseSchedule<Vec>::constant(Vec{0.1}, 1.0);
  coeffs.diffusion = PiecewiseSchedule<Mat>::constant(Mat(1, 1, 0.4), 1.0);
  coeffs.jump_coeff = test::zero_jump_map(1, 1, 1.0);
  JumpStream no_jumps;
  no_jumps.horizon = 1.0;
  no_jumps.marks = Mat(0, 1);

  SmoothFunction fn;
  fn.value = [](double, std::span<const double> x) { return x[0] * x[0]; };
  fn.time_derivative = [](double, std::span<const double>) { return 0.0; };
  fn.gradient = [](double, std::span<const double> x, std::span<double> g) { g[0] = 2.0 * x[0]; };
  fn.hessian = [](double, std::span<const double>, Mat& h) { h(0, 0) = 2.0; };

  {
    // the quadratic-variation group accumulates b^2 * t exactly
    const auto wiener = sample_wiener(TimeGrid{32, 1.0}, 1, 21);
    const auto traj = evolve_state(coeffs, Vec{1.0}, wiener, no_jumps);
    const auto ledger = classical_ito_increment(fn, coeffs, traj, wiener, no_jumps);
    CHECK(ledger.item(ledger.count() - 1, ItoGroup::quad_variation_dt) ==
          doctest::Approx(0.16).epsilon(1e-12));
  }

  // refinement study with common noise: RMS residual order >= 0.4
  const std::size_t n_paths = 200;
  const std::size_t levels = 4;
  Vec rms(levels, 0.0);
  for (std::size_t path = 0; path < n_paths; ++path) {
    const auto finest = sample_wiener(TimeGrid{16 << (levels - 1), 1.0}, 1,
                                      derive_path_seed(31337, path, StreamTag::wiener));
    for (std::size_t level = 0; level < levels; ++level) {
      const auto wiener = coarsen_wiener(finest, std::size_t{1} << (levels - 1 - level));
      const auto traj = evolve_state(coeffs, Vec{1.0}, wiener, no_jumps);
      const auto ledger = classical_ito_increment(fn, coeffs, traj, wiener, no_jumps);
      const auto x_T = traj.state(traj.count() - 1)[0];
      const double direct = x_T * x_T - 1.0;
      const double r = direct - ledger.final_total();
      rms[level] += r * r;
    }
  }
  Vec log_dt;
  Vec log_rms;
  for (std::size_t level = 0; level < levels; ++level) {
    rms[level] = std::sqrt(rms[level] / static_cast<double>(n_paths));
    log_dt.push_back(std::log2(1.0 / static_cast<double>(16 << level)));
    log_rms.push_back(std::log2(rms[level]));
    if (level > 0) CHECK(rms[level] < rms[level - 1]);
  }
  CHECK(fit_line(log_dt, log_rms).slope >= 0.4);
}

TEST_CASE("jump-free reduction: generalized and classical ledgers agree itemwise") {
  auto s = full_scenario();
  s.law.total_intensity = 0.0;
  for (std::size_t trial = 0; trial < 5; ++trial) {
    const auto wiener =
        sample_wiener(TimeGrid{32, 1.0}, 2, derive_path_seed(606, trial, StreamTag::wiener));
    const auto cmp = reduction_check(s.coeffs, s.spec, s.x0, wiener);
    CHECK(cmp.max_item_diff <= 1e-14);
    CHECK(cmp.max_jump_group_abs == 0.0);
  }
}

TEST_CASE("mismatched noise inputs are rejected") {
  const auto s = full_scenario();
  const auto noise_a = sample_noise(s, TimeGrid{16, 1.0}, 1, 0);
  const auto noise_b = sample_noise(s, TimeGrid{16, 1.0}, 2, 0);
  const auto traj = evolve_state(s.coeffs, s.x0, noise_a.wiener, noise_a.jumps);
  const auto field = evolve_field(s.spec, noise_b.wiener, noise_b.jumps);
  CHECK_THROWS_AS(accumulate_rhs(s.coeffs, s.spec, traj, field, noise_a.wiener, noise_a.jumps),
                  NoiseMismatchError);
}

TEST_CASE("residual trajectory is available per checkpoint") {
  const auto s = full_scenario();
  const auto noise = sample_noise(s, TimeGrid{16, 1.0}, 515, 0);
  const auto traj = evolve_state(s.coeffs, s.x0, noise.wiener, noise.jumps);
  const auto field = evolve_field(s.spec, noise.wiener, noise.jumps);
  const auto ledger = accumulate_rhs(s.coeffs, s.spec, traj, field, noise.wiener, noise.jumps);
  const auto residuals = path_residuals(field, s.spec, traj, ledger);
  REQUIRE(residuals.size() == ledger.count());
  CHECK(residuals[0] == 0.0);
  // residuals shrink with dt; at this resolution they are just small
  CHECK(std::abs(residuals.back()) < 0.5);
}
