#pragma once

#include <itw/scenario.hpp>

namespace itw::test {

inline JumpMap zero_jump_map(std::size_t out_dim, std::size_t mark_dim, double horizon) {
  JumpMapPiece piece;
  piece.form = JumpMapPiece::Form::linear;
  piece.offset.assign(out_dim, 0.0);
  piece.coeff = Mat(out_dim, mark_dim, 0.0);
  return JumpMap{PiecewiseSchedule<JumpMapPiece>({piece}, horizon), 0.0, out_dim, mark_dim};
}

inline JumpMap constant_jump_map(Vec offset, std::size_t mark_dim, double horizon) {
  const std::size_t n = offset.size();
  double bound_sq = 0.0;
  for (double v : offset) bound_sq += v * v;
  JumpMapPiece piece;
  piece.form = JumpMapPiece::Form::linear;
  piece.offset = std::move(offset);
  piece.coeff = Mat(n, mark_dim, 0.0);
  return JumpMap{PiecewiseSchedule<JumpMapPiece>({piece}, horizon),
                 std::sqrt(bound_sq) * (1.0 + 1e-12), n, mark_dim};
}

/// Minimal well-formed scenario: 1-D everything, constant schedules,
/// one-element polynomial basis with a box.
inline ScenarioConfig minimal_scenario() {
  ScenarioConfig cfg;
  cfg.state_dim = 1;
  cfg.wiener_dim = 1;
  cfg.mark_dim = 1;
  cfg.horizon = 1.0;
  cfg.base_steps = 64;
  cfg.refinement_levels = 1;
  cfg.n_paths = 1;
  cfg.master_seed = 42;
  cfg.initial_state = {0.0};
  cfg.state_coeffs.drift = PiecewiseSchedule<Vec>::constant(Vec{0.0}, cfg.horizon);
  cfg.state_coeffs.diffusion = PiecewiseSchedule<Mat>::constant(Mat(1, 1, 0.0), cfg.horizon);
  cfg.state_coeffs.jump_coeff = zero_jump_map(1, 1, cfg.horizon);
  cfg.jump_law.total_intensity = 0.0;
  cfg.jump_law.mark_sampler = UniformBoxMarks{Vec{-1.0}, Vec{1.0}};
  cfg.field_spec.state_dim = 1;
  cfg.field_spec.basis.emplace_back(PolynomialBasis{{1}});
  CoefficientDriver drv;
  drv.initial = 1.0;
  drv.drift = PiecewiseSchedule<double>::constant(0.0, cfg.horizon);
  drv.diffusion = PiecewiseSchedule<Vec>::constant(Vec{0.0}, cfg.horizon);
  cfg.field_spec.drivers.push_back(std::move(drv));
  cfg.field_spec.state_box = Box{Vec{-10.0}, Vec{10.0}};
  return cfg;
}

}  // namespace itw::test
