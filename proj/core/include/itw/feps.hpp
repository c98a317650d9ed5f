#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "itw/field.hpp"
#include "itw/mollifier.hpp"
#include "itw/scenario.hpp"
#include "itw/stats.hpp"

namespace itw {

/// Parameters of the smoothed-field convergence experiment.
struct FepsParams {
  Vec epsilons;  // strictly decreasing, all > 0
  std::size_t nodes_per_axis = 64;
  double cutoff_radius = 8.0;
  std::size_t n_paths = 1000;
  std::size_t n_threads = 1;

  void check(std::size_t state_dim) const;
};

/// Smoothed field value: integral of the product Gaussian kernel centered
/// at x against F(t, y) over the cutoff box.
double f_eps(std::span<const double> coeffs, const FieldSpec& spec, std::span<const double> x,
             const MollifierRule& rule);
double f_eps(const FieldState& state, const FieldSpec& spec, std::span<const double> x,
             double epsilon, std::size_t nodes_per_axis = 64, double cutoff_radius = 8.0);

/// Pathwise Lipschitz bound of the field realization: sum_p |c_p| * sup|grad phi_p|
/// (sup over `box` for unbounded families, global otherwise).
double field_lipschitz_bound(const FieldSpec& spec, std::span<const double> coeffs,
                             const Box* box);

struct MsConvergenceRow {
  double epsilon = 0.0;
  double mse = 0.0;           // mean over paths of (F_eps - F)^2 at the horizon
  double ci_halfwidth = 0.0;  // 99% normal CI half-width of the mse estimate
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

struct MsConvergenceTable {
  std::vector<MsConvergenceRow> rows;   // ordered as the epsilon grid
  SlopeFit loglog_fit;                  // ln(mse) regressed on ln(epsilon)
  bool strictly_decreasing = false;     // mse strictly decreasing along the grid
  /// max over paths and epsilons of |F_eps - F| - holder_error_bound(eps, L_path);
  /// <= 0 when every pathwise smoothing error respects the bound.
  double max_bound_margin = 0.0;
};

/// Monte Carlo estimate of E (F_eps(T, x(T)) - F(T, x(T)))^2 on the epsilon
/// grid, with common per-path noise across epsilons and deterministic
/// aggregation order.
MsConvergenceTable ms_convergence_study(const ScenarioConfig& cfg, const FepsParams& params);

}  // namespace itw
