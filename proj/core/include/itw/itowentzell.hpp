#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "itw/field.hpp"
#include "itw/linalg.hpp"
#include "itw/noise.hpp"
#include "itw/state.hpp"

namespace itw {

/// Itemized term groups of the generalized formula's right-hand side.
enum class RhsGroup : std::size_t {
  field_drift_dt = 0,        // Q dt
  field_diffusion_dw,        // sum_k D_k dw_k
  state_drift_grad_dt,       // sum_i a_i dF/dx_i dt
  quad_variation_dt,         // 1/2 sum_{i,j,k} b_ik b_jk d2F/dx_i dx_j dt
  diffusion_interaction_dt,  // sum_{i,k} b_ik dD_k/dx_i dt
  grad_noise_dw,             // sum_{i,k} b_ik dF/dx_i dw_k
  jump_field_shift,          // F(t, x- + g) - F(t, x-) at events
  jump_coeff_shift,          // G(t, x- + g; mark) at events
};
inline constexpr std::size_t kRhsGroupCount = 8;
const char* to_string(RhsGroup g);

/// Cumulative right-hand-side accumulation, one row per checkpoint.
/// dt/dw integrands are evaluated at left nodes (Ito rule); mid-step rows
/// prorate the current step's dt integrand up to the row time; Wiener
/// bookings land on grid rows; jump terms land on post_jump rows.
struct RhsLedger {
  std::vector<double> times;
  std::vector<CheckpointKind> kinds;
  Vec items;   // count x kRhsGroupCount, cumulative
  Vec totals;  // count, running total accumulated alongside the items
  Vec jump_deviations;  // per event: |lhs jump - rhs jump| / max(1, |lhs jump|)

  std::size_t count() const { return times.size(); }
  double item(std::size_t idx, RhsGroup g) const {
    return items[idx * kRhsGroupCount + static_cast<std::size_t>(g)];
  }
  std::span<const double> row(std::size_t idx) const {
    return {items.data() + idx * kRhsGroupCount, kRhsGroupCount};
  }
  double total(std::size_t idx) const { return totals[idx]; }
  double final_total() const { return totals.back(); }
  double max_jump_deviation() const;
};

/// Builds the right-hand-side ledger along one path. The trajectory and
/// field path must come from the same noise objects; mismatched inputs
/// throw NoiseMismatchError.
RhsLedger accumulate_rhs(const StateCoefficients& coeffs, const FieldSpec& spec,
                         const StateTrajectory& trajectory, const FieldPath& field,
                         const WienerPath& wiener, const JumpStream& jumps);

/// Same continuous term groups accumulated by the jump-free classical rule;
/// requires an event-free path. Jump groups stay exactly zero.
RhsLedger accumulate_classical_iw(const StateCoefficients& coeffs, const FieldSpec& spec,
                                  const StateTrajectory& trajectory, const FieldPath& field,
                                  const WienerPath& wiener);

/// F(t, x(t)) - F(0, x(0)) at a checkpoint, exact given the path.
double lhs_increment(const FieldPath& field, const FieldSpec& spec,
                     const StateTrajectory& trajectory, std::size_t checkpoint_idx);

/// Per-checkpoint residual lhs_increment - ledger total.
Vec path_residuals(const FieldPath& field, const FieldSpec& spec,
                   const StateTrajectory& trajectory, const RhsLedger& ledger);

/// Convenience bundle: evolve state and field on the same noise, accumulate
/// the ledger, and report the horizon residual and jump bookkeeping error.
struct PathVerification {
  StateTrajectory trajectory;
  FieldPath field;
  RhsLedger ledger;
  double residual_at_horizon = 0.0;
  double max_jump_deviation = 0.0;
};

PathVerification verify_path(const StateCoefficients& coeffs, const FieldSpec& spec,
                             const Vec& x0, const WienerPath& wiener, const JumpStream& jumps);

/// Deterministic test function with analytic derivatives, for the
/// jump-diffusion chain rule on non-random integrands.
struct SmoothFunction {
  std::function<double(double, std::span<const double>)> value;
  std::function<double(double, std::span<const double>)> time_derivative;
  std::function<void(double, std::span<const double>, std::span<double>)> gradient;
  std::function<void(double, std::span<const double>, Mat&)> hessian;
};

enum class ItoGroup : std::size_t {
  time_derivative_dt = 0,
  drift_grad_dt,
  quad_variation_dt,
  grad_noise_dw,
  jump_shift,
};
inline constexpr std::size_t kItoGroupCount = 5;

/// Left-point accumulation of the jump-diffusion chain rule for a
/// deterministic F(t,x): dt terms (time derivative, drift gradient,
/// quadratic variation), gradient-noise dw terms, and the event shifts
/// F(t, x- + g) - F(t, x-).
struct ItoLedger {
  std::vector<double> times;
  std::vector<CheckpointKind> kinds;
  Vec items;   // count x kItoGroupCount, cumulative
  Vec totals;  // count

  std::size_t count() const { return times.size(); }
  double item(std::size_t idx, ItoGroup g) const {
    return items[idx * kItoGroupCount + static_cast<std::size_t>(g)];
  }
  double final_total() const { return totals.back(); }
};

ItoLedger classical_ito_increment(const SmoothFunction& fn, const StateCoefficients& coeffs,
                                  const StateTrajectory& trajectory, const WienerPath& wiener,
                                  const JumpStream& jumps);

/// Itemwise comparison of the generalized ledger against the classical
/// jump-free rule on the same path. Requires an event-free noise bundle.
struct ReductionComparison {
  double max_item_diff = 0.0;       // over the six continuous groups
  double max_jump_group_abs = 0.0;  // jump groups of the generalized ledger
};

ReductionComparison reduction_check(const StateCoefficients& coeffs, const FieldSpec& spec,
                                    const Vec& x0, const WienerPath& wiener);

}  // namespace itw
