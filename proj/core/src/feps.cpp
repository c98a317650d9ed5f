#include "itw/feps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "itw/errors.hpp"
#include "itw/parallel.hpp"
#include "itw/rng.hpp"

namespace itw {

void FepsParams::check(std::size_t state_dim) const {
  if (state_dim > 3)
    throw std::invalid_argument("smoothed-field study supports state_dim <= 3");
  if (epsilons.empty()) throw std::invalid_argument("epsilon grid is empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw std::invalid_argument("epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw std::invalid_argument("epsilons must be strictly decreasing");
  }
  if (n_paths < 2) throw std::invalid_argument("n_paths must be >= 2");
}

double f_eps(std::span<const double> coeffs, const FieldSpec& spec, std::span<const double> x,
             const MollifierRule& rule) {
  return rule.mollify(
      [&](std::span<const double> y) { return eval_field(coeffs, spec, y); }, x);
}

double f_eps(const FieldState& state, const FieldSpec& spec, std::span<const double> x,
             double epsilon, std::size_t nodes_per_axis, double cutoff_radius) {
  MollifierParams params;
  params.epsilon = epsilon;
  params.dim = x.size();
  params.nodes_per_axis = nodes_per_axis;
  params.cutoff_radius = cutoff_radius;
  return f_eps(state.coeffs, spec, x, MollifierRule(params));
}

double field_lipschitz_bound(const FieldSpec& spec, std::span<const double> coeffs,
                             const Box* box) {
  double bound = 0.0;
  for (std::size_t p = 0; p < spec.size(); ++p)
    bound += std::abs(coeffs[p]) * basis_gradient_sup_bound(spec.basis[p], box);
  return bound;
}

MsConvergenceTable ms_convergence_study(const ScenarioConfig& cfg, const FepsParams& params) {
  params.check(cfg.state_dim);
  ensure_valid(cfg);

  const std::size_t n_eps = params.epsilons.size();
  const std::size_t n_paths = params.n_paths;
  const TimeGrid grid = cfg.grid_at_level(0);

  std::vector<MollifierRule> rules;
  rules.reserve(n_eps);
  for (double eps : params.epsilons) {
    MollifierParams mp;
    mp.epsilon = eps;
    mp.dim = cfg.state_dim;
    mp.nodes_per_axis = params.nodes_per_axis;
    mp.cutoff_radius = params.cutoff_radius;
    rules.emplace_back(mp);
  }

  // Lipschitz box: the configured state box (when present) inflated by the
  // widest kernel support.
  const Box* lip_box = nullptr;
  Box inflated;
  if (cfg.field_spec.state_box) {
    inflated = cfg.field_spec.state_box->inflated(params.cutoff_radius * params.epsilons.front());
    lip_box = &inflated;
  }

  // per-path squared errors, n_paths x n_eps, filled in disjoint slots
  Vec sq_err(n_paths * n_eps, 0.0);
  Vec bound_margin(n_paths, 0.0);

  parallel_for(n_paths, params.n_threads, [&](std::size_t path) {
    const WienerPath wiener = sample_wiener(
        grid, cfg.wiener_dim, derive_path_seed(cfg.master_seed, path, StreamTag::wiener));
    const JumpStream jumps =
        sample_jumps(cfg.horizon, cfg.jump_law,
                     derive_path_seed(cfg.master_seed, path, StreamTag::jumps),
                     derive_path_seed(cfg.master_seed, path, StreamTag::marks));

    const StateTrajectory traj =
        evolve_state(cfg.state_coeffs, cfg.initial_state, wiener, jumps);
    const FieldPath field = evolve_field(cfg.field_spec, wiener, jumps);

    const std::size_t last = traj.count() - 1;
    const auto x_T = traj.state(last);
    const auto c_T = field.coeffs(last);
    if (cfg.field_spec.state_box && !cfg.field_spec.state_box->contains(x_T))
      throw StateExcursionError("state left the configured box at the horizon");

    const double f_exact = eval_field(c_T, cfg.field_spec, x_T);
    const double lipschitz = field_lipschitz_bound(cfg.field_spec, c_T, lip_box);

    double margin = -1e300;
    for (std::size_t e = 0; e < n_eps; ++e) {
      const double smoothed = f_eps(c_T, cfg.field_spec, x_T, rules[e]);
      const double err = smoothed - f_exact;
      sq_err[path * n_eps + e] = err * err;
      const HolderWitness witness{lipschitz, 1.0};
      margin = std::max(margin, std::abs(err) - holder_error_bound(rules[e].params(), witness));
    }
    bound_margin[path] = margin;
  });

  MsConvergenceTable table;
  table.rows.resize(n_eps);
  Vec log_eps(n_eps);
  Vec log_mse(n_eps);
  for (std::size_t e = 0; e < n_eps; ++e) {
    Vec column(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) column[p] = sq_err[p * n_eps + e];
    const double m = mean(column);
    const double sd = std::sqrt(variance(column));
    auto& row = table.rows[e];
    row.epsilon = params.epsilons[e];
    row.mse = m;
    row.ci_halfwidth = kZ99 * sd / std::sqrt(static_cast<double>(n_paths));
    row.n_paths = n_paths;
    row.seed = cfg.master_seed;
    log_eps[e] = std::log(params.epsilons[e]);
    log_mse[e] = std::log(std::max(m, 1e-300));
  }

  table.strictly_decreasing = true;
  for (std::size_t e = 1; e < n_eps; ++e)
    if (!(table.rows[e].mse < table.rows[e - 1].mse)) table.strictly_decreasing = false;

  table.loglog_fit = fit_line(log_eps, log_mse);
  table.max_bound_margin = *std::max_element(bound_margin.begin(), bound_margin.end());
  return table;
}

}  // namespace itw
