#include "itw/itowentzell.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "itw/errors.hpp"

namespace itw {

const char* to_string(RhsGroup g) {
  switch (g) {
    case RhsGroup::field_drift_dt: return "field_drift_dt";
    case RhsGroup::field_diffusion_dw: return "field_diffusion_dw";
    case RhsGroup::state_drift_grad_dt: return "state_drift_grad_dt";
    case RhsGroup::quad_variation_dt: return "quad_variation_dt";
    case RhsGroup::diffusion_interaction_dt: return "diffusion_interaction_dt";
    case RhsGroup::grad_noise_dw: return "grad_noise_dw";
    case RhsGroup::jump_field_shift: return "jump_field_shift";
    case RhsGroup::jump_coeff_shift: return "jump_coeff_shift";
  }
  return "?";
}

double RhsLedger::max_jump_deviation() const {
  double out = 0.0;
  for (double d : jump_deviations) out = std::max(out, d);
  return out;
}

namespace {

constexpr std::size_t kG = kRhsGroupCount;

std::size_t gi(RhsGroup g) { return static_cast<std::size_t>(g); }

void check_alignment(const FieldSpec& spec, const StateTrajectory& trajectory,
                     const FieldPath& field, const WienerPath& wiener, const JumpStream& jumps) {
  if (trajectory.count() != field.count())
    throw NoiseMismatchError("trajectory and field checkpoint counts differ");
  if (trajectory.count() == 0) throw NoiseMismatchError("empty trajectory");
  if (field.coeff_count != spec.size())
    throw NoiseMismatchError("field path width != field spec size");
  if (trajectory.times != field.times)
    throw NoiseMismatchError("trajectory and field checkpoint times differ");
  if (trajectory.kinds != field.kinds)
    throw NoiseMismatchError("trajectory and field checkpoint kinds differ");

  std::size_t grid_rows = 0;
  std::size_t pre_rows = 0;
  for (CheckpointKind k : trajectory.kinds) {
    if (k == CheckpointKind::grid) ++grid_rows;
    if (k == CheckpointKind::pre_jump) ++pre_rows;
  }
  if (grid_rows != wiener.grid.steps + 1)
    throw NoiseMismatchError("checkpoint grid rows do not match the Wiener grid");
  if (pre_rows != jumps.count())
    throw NoiseMismatchError("checkpoint jump pairs do not match the jump stream");
}

/// Shared accumulation state for one path walk.
struct LedgerBuilder {
  const StateCoefficients& coeffs;
  const FieldSpec& spec;
  const StateTrajectory& trajectory;
  const FieldPath& field;
  const WienerPath& wiener;
  const JumpStream& jumps;

  RhsLedger out;
  BasisEval basis;
  double cum[kG] = {0.0};
  double total = 0.0;

  // left-node integrands of the step in progress
  bool integrands_valid = false;
  double i_field_drift = 0.0;
  double i_state_drift_grad = 0.0;
  double i_quad_variation = 0.0;
  double i_diffusion_interaction = 0.0;
  Vec d_at_left;       // D_k(t_i, x_i)
  Vec grad_noise_k;    // sum_j b_jk dF/dx_j
  Vec scratch_minus;   // basis values at x-
  Vec scratch_plus;    // basis values at x+

  double anchor = 0.0;
  std::size_t step = 0;
  std::size_t event = 0;

  LedgerBuilder(const StateCoefficients& c, const FieldSpec& s, const StateTrajectory& t,
                const FieldPath& f, const WienerPath& w, const JumpStream& j)
      : coeffs(c), spec(s), trajectory(t), field(f), wiener(w), jumps(j), basis(s) {
    const std::size_t count = t.count();
    out.times = t.times;
    out.kinds = t.kinds;
    out.items.assign(count * kG, 0.0);
    out.totals.assign(count, 0.0);
    out.jump_deviations.assign(j.count(), 0.0);
    d_at_left.resize(w.wiener_dim());
    grad_noise_k.resize(w.wiener_dim());
    scratch_minus.resize(s.size());
    scratch_plus.resize(s.size());
  }

  void write_row(std::size_t idx) {
    std::copy(cum, cum + kG, out.items.data() + idx * kG);
    out.totals[idx] = total;
  }

  void compute_step_integrands(std::size_t left_idx) {
    const std::size_t n = trajectory.state_dim;
    const std::size_t m = wiener.wiener_dim();
    const std::size_t steps = wiener.grid.steps;
    auto x = trajectory.state(left_idx);
    auto c = field.coeffs(left_idx);
    basis.compute(x, true);

    const Vec& a = coeffs.drift.piece_for_step(step, steps);
    const Mat& b = coeffs.diffusion.piece_for_step(step, steps);

    // field gradient and Hessian contracted with the coefficient vector
    i_field_drift = 0.0;
    i_diffusion_interaction = 0.0;
    std::fill(d_at_left.begin(), d_at_left.end(), 0.0);
    std::fill(grad_noise_k.begin(), grad_noise_k.end(), 0.0);

    Vec grad_f(n, 0.0);
    for (std::size_t p = 0; p < spec.size(); ++p) {
      const double phi = basis.value(p);
      i_field_drift += spec.drivers[p].drift.piece_for_step(step, steps) * phi;
      const Vec& d = spec.drivers[p].diffusion.piece_for_step(step, steps);
      auto g = basis.grad(p);
      for (std::size_t k = 0; k < m; ++k) {
        d_at_left[k] += d[k] * phi;
        double b_dot_g = 0.0;
        for (std::size_t j = 0; j < n; ++j) b_dot_g += b(j, k) * g[j];
        i_diffusion_interaction += d[k] * b_dot_g;
      }
      for (std::size_t j = 0; j < n; ++j) grad_f[j] += c[p] * g[j];
    }

    i_state_drift_grad = dot(a, grad_f);

    for (std::size_t k = 0; k < m; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += b(j, k) * grad_f[j];
      grad_noise_k[k] = s;
    }

    i_quad_variation = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double c_ij = 0.0;
        for (std::size_t k = 0; k < m; ++k) c_ij += b(i, k) * b(j, k);
        if (c_ij == 0.0) continue;
        double hess_f = 0.0;
        for (std::size_t p = 0; p < spec.size(); ++p) hess_f += c[p] * basis.hess(p, i, j);
        i_quad_variation += 0.5 * c_ij * hess_f;
      }

    integrands_valid = true;
  }

  void elapse_to(double t, std::size_t row_idx) {
    const double frag = t - anchor;
    if (frag == 0.0) return;
    if (!integrands_valid) compute_step_integrands(row_idx - 1);
    add(RhsGroup::field_drift_dt, i_field_drift * frag);
    add(RhsGroup::state_drift_grad_dt, i_state_drift_grad * frag);
    add(RhsGroup::quad_variation_dt, i_quad_variation * frag);
    add(RhsGroup::diffusion_interaction_dt, i_diffusion_interaction * frag);
    anchor = t;
  }

  void add(RhsGroup g, double v) {
    cum[gi(g)] += v;
    total += v;
  }

  void book_wiener_for_step(std::size_t row_idx) {
    if (!integrands_valid) compute_step_integrands(row_idx - 1);
    auto dw = wiener.increments.row(step);
    double dd = 0.0;
    double gg = 0.0;
    for (std::size_t k = 0; k < dw.size(); ++k) {
      dd += d_at_left[k] * dw[k];
      gg += grad_noise_k[k] * dw[k];
    }
    add(RhsGroup::field_diffusion_dw, dd);
    add(RhsGroup::grad_noise_dw, gg);
  }

  void book_jump(std::size_t pre_idx, std::size_t post_idx) {
    const double tau = trajectory.times[post_idx];
    auto x_minus = trajectory.state(pre_idx);
    auto x_plus = trajectory.state(post_idx);
    auto c_minus = field.coeffs(pre_idx);
    auto c_plus = field.coeffs(post_idx);
    auto mark = jumps.mark(event);

    for (std::size_t p = 0; p < spec.size(); ++p) {
      scratch_minus[p] = basis_value(spec.basis[p], x_minus);
      scratch_plus[p] = basis_value(spec.basis[p], x_plus);
    }
    const double f_mm = dot(c_minus, std::span<const double>(scratch_minus));
    const double f_mp = dot(c_minus, std::span<const double>(scratch_plus));
    const double f_pp = dot(c_plus, std::span<const double>(scratch_plus));

    double g_shift = 0.0;
    for (std::size_t p = 0; p < spec.size(); ++p) {
      if (!spec.drivers[p].jump) continue;
      g_shift += spec.drivers[p].jump->eval_scalar(tau, mark) * scratch_plus[p];
    }

    add(RhsGroup::jump_field_shift, f_mp - f_mm);
    add(RhsGroup::jump_coeff_shift, g_shift);

    const double lhs_jump = f_pp - f_mm;
    const double rhs_jump = (f_mp - f_mm) + g_shift;
    out.jump_deviations[event] =
        std::abs(lhs_jump - rhs_jump) / std::max(1.0, std::abs(lhs_jump));
    ++event;
  }

  RhsLedger run() {
    write_row(0);
    for (std::size_t idx = 1; idx < trajectory.count(); ++idx) {
      const double t = trajectory.times[idx];
      switch (trajectory.kinds[idx]) {
        case CheckpointKind::pre_jump:
          elapse_to(t, idx);
          write_row(idx);
          break;
        case CheckpointKind::post_jump:
          book_jump(idx - 1, idx);
          write_row(idx);
          break;
        case CheckpointKind::grid:
          elapse_to(t, idx);
          book_wiener_for_step(idx);
          write_row(idx);
          ++step;
          integrands_valid = false;
          break;
      }
    }
    return std::move(out);
  }
};

}  // namespace

RhsLedger accumulate_rhs(const StateCoefficients& coeffs, const FieldSpec& spec,
                         const StateTrajectory& trajectory, const FieldPath& field,
                         const WienerPath& wiener, const JumpStream& jumps) {
  check_alignment(spec, trajectory, field, wiener, jumps);
  LedgerBuilder builder(coeffs, spec, trajectory, field, wiener, jumps);
  return builder.run();
}

RhsLedger accumulate_classical_iw(const StateCoefficients& coeffs, const FieldSpec& spec,
                                  const StateTrajectory& trajectory, const FieldPath& field,
                                  const WienerPath& wiener) {
  JumpStream no_jumps;
  no_jumps.horizon = wiener.grid.horizon;
  no_jumps.marks = Mat(0, 0);
  check_alignment(spec, trajectory, field, wiener, no_jumps);
  LedgerBuilder builder(coeffs, spec, trajectory, field, wiener, no_jumps);
  return builder.run();
}

double lhs_increment(const FieldPath& field, const FieldSpec& spec,
                     const StateTrajectory& trajectory, std::size_t checkpoint_idx) {
  const double f_t =
      eval_field(field.coeffs(checkpoint_idx), spec, trajectory.state(checkpoint_idx));
  const double f_0 = eval_field(field.coeffs(0), spec, trajectory.state(0));
  return f_t - f_0;
}

Vec path_residuals(const FieldPath& field, const FieldSpec& spec,
                   const StateTrajectory& trajectory, const RhsLedger& ledger) {
  Vec out(ledger.count());
  for (std::size_t idx = 0; idx < ledger.count(); ++idx)
    out[idx] = lhs_increment(field, spec, trajectory, idx) - ledger.total(idx);
  return out;
}

PathVerification verify_path(const StateCoefficients& coeffs, const FieldSpec& spec,
                             const Vec& x0, const WienerPath& wiener, const JumpStream& jumps) {
  PathVerification v;
  v.trajectory = evolve_state(coeffs, x0, wiener, jumps);
  v.field = evolve_field(spec, wiener, jumps);
  v.ledger = accumulate_rhs(coeffs, spec, v.trajectory, v.field, wiener, jumps);
  const std::size_t last = v.ledger.count() - 1;
  v.residual_at_horizon = lhs_increment(v.field, spec, v.trajectory, last) - v.ledger.total(last);
  v.max_jump_deviation = v.ledger.max_jump_deviation();
  return v;
}

namespace {

struct ItoBuilder {
  const SmoothFunction& fn;
  const StateCoefficients& coeffs;
  const StateTrajectory& trajectory;
  const WienerPath& wiener;
  const JumpStream& jumps;

  ItoLedger out;
  double cum[kItoGroupCount] = {0.0};
  double total = 0.0;

  bool integrands_valid = false;
  double i_time_derivative = 0.0;
  double i_drift_grad = 0.0;
  double i_quad_variation = 0.0;
  Vec grad_noise_k;
  Vec grad_buf;
  Mat hess_buf;

  double anchor = 0.0;
  std::size_t step = 0;
  std::size_t event = 0;

  ItoBuilder(const SmoothFunction& f, const StateCoefficients& c, const StateTrajectory& t,
             const WienerPath& w, const JumpStream& j)
      : fn(f), coeffs(c), trajectory(t), wiener(w), jumps(j) {
    out.times = t.times;
    out.kinds = t.kinds;
    out.items.assign(t.count() * kItoGroupCount, 0.0);
    out.totals.assign(t.count(), 0.0);
    grad_noise_k.resize(w.wiener_dim());
    grad_buf.resize(t.state_dim);
    hess_buf = Mat(t.state_dim, t.state_dim);
  }

  void add(ItoGroup g, double v) {
    cum[static_cast<std::size_t>(g)] += v;
    total += v;
  }

  void write_row(std::size_t idx) {
    std::copy(cum, cum + kItoGroupCount, out.items.data() + idx * kItoGroupCount);
    out.totals[idx] = total;
  }

  void compute_step_integrands(std::size_t left_idx) {
    const std::size_t n = trajectory.state_dim;
    const std::size_t m = wiener.wiener_dim();
    const std::size_t steps = wiener.grid.steps;
    const double t_left = trajectory.times[left_idx];
    auto x = trajectory.state(left_idx);

    i_time_derivative = fn.time_derivative(t_left, x);
    fn.gradient(t_left, x, grad_buf);
    fn.hessian(t_left, x, hess_buf);

    const Vec& a = coeffs.drift.piece_for_step(step, steps);
    const Mat& b = coeffs.diffusion.piece_for_step(step, steps);

    i_drift_grad = dot(a, grad_buf);

    i_quad_variation = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double c_ij = 0.0;
        for (std::size_t k = 0; k < m; ++k) c_ij += b(i, k) * b(j, k);
        i_quad_variation += 0.5 * c_ij * hess_buf(i, j);
      }

    for (std::size_t k = 0; k < m; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += b(j, k) * grad_buf[j];
      grad_noise_k[k] = s;
    }
    integrands_valid = true;
  }

  void elapse_to(double t, std::size_t row_idx) {
    const double frag = t - anchor;
    if (frag == 0.0) return;
    if (!integrands_valid) compute_step_integrands(row_idx - 1);
    add(ItoGroup::time_derivative_dt, i_time_derivative * frag);
    add(ItoGroup::drift_grad_dt, i_drift_grad * frag);
    add(ItoGroup::quad_variation_dt, i_quad_variation * frag);
    anchor = t;
  }

  ItoLedger run() {
    write_row(0);
    for (std::size_t idx = 1; idx < trajectory.count(); ++idx) {
      const double t = trajectory.times[idx];
      switch (trajectory.kinds[idx]) {
        case CheckpointKind::pre_jump:
          elapse_to(t, idx);
          write_row(idx);
          break;
        case CheckpointKind::post_jump: {
          const double f_plus = fn.value(t, trajectory.state(idx));
          const double f_minus = fn.value(t, trajectory.state(idx - 1));
          add(ItoGroup::jump_shift, f_plus - f_minus);
          write_row(idx);
          ++event;
          break;
        }
        case CheckpointKind::grid: {
          elapse_to(t, idx);
          if (!integrands_valid) compute_step_integrands(idx - 1);
          auto dw = wiener.increments.row(step);
          double gg = 0.0;
          for (std::size_t k = 0; k < dw.size(); ++k) gg += grad_noise_k[k] * dw[k];
          add(ItoGroup::grad_noise_dw, gg);
          write_row(idx);
          ++step;
          integrands_valid = false;
          break;
        }
      }
    }
    return std::move(out);
  }
};

}  // namespace

ItoLedger classical_ito_increment(const SmoothFunction& fn, const StateCoefficients& coeffs,
                                  const StateTrajectory& trajectory, const WienerPath& wiener,
                                  const JumpStream& jumps) {
  ItoBuilder builder(fn, coeffs, trajectory, wiener, jumps);
  return builder.run();
}

ReductionComparison reduction_check(const StateCoefficients& coeffs, const FieldSpec& spec,
                                    const Vec& x0, const WienerPath& wiener) {
  JumpStream no_jumps;
  no_jumps.horizon = wiener.grid.horizon;
  no_jumps.marks = Mat(0, 0);

  const StateTrajectory trajectory = evolve_state(coeffs, x0, wiener, no_jumps);
  const FieldPath field = evolve_field(spec, wiener, no_jumps);

  const RhsLedger generalized =
      accumulate_rhs(coeffs, spec, trajectory, field, wiener, no_jumps);
  const RhsLedger classical =
      accumulate_classical_iw(coeffs, spec, trajectory, field, wiener);

  ReductionComparison cmp;
  static constexpr RhsGroup continuous[] = {
      RhsGroup::field_drift_dt,       RhsGroup::field_diffusion_dw,
      RhsGroup::state_drift_grad_dt,  RhsGroup::quad_variation_dt,
      RhsGroup::diffusion_interaction_dt, RhsGroup::grad_noise_dw,
  };
  for (std::size_t idx = 0; idx < generalized.count(); ++idx) {
    for (RhsGroup g : continuous)
      cmp.max_item_diff =
          std::max(cmp.max_item_diff, std::abs(generalized.item(idx, g) - classical.item(idx, g)));
    cmp.max_jump_group_abs =
        std::max({cmp.max_jump_group_abs,
                  std::abs(generalized.item(idx, RhsGroup::jump_field_shift)),
                  std::abs(generalized.item(idx, RhsGroup::jump_coeff_shift))});
  }
  return cmp;
}

}  // namespace itw
