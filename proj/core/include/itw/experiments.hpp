#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "itw/feps.hpp"
#include "itw/itowentzell.hpp"
#include "itw/scenario.hpp"
#include "itw/stats.hpp"

namespace itw {

/// One refinement level of the residual study.
struct LevelRow {
  double dt = 0.0;
  std::size_t n_paths = 0;
  double rms_residual = 0.0;
  double max_abs_residual = 0.0;
  double jump_residual_max = 0.0;
  double ci_halfwidth = 0.0;  // 99% delta-method half-width on the RMS
};

struct ConvergenceReport {
  std::vector<LevelRow> rows;  // ordered by decreasing dt
  SlopeFit slope;              // log2(rms) regressed on log2(dt)
  bool strictly_decreasing = false;
  double slope_threshold = 0.4;
  double jump_tolerance = 1e-12;
  bool pass = false;
  std::string fingerprint;
  std::string version;
};

/// Common-noise refinement study of the main formula: per path the finest
/// Wiener path is generated once and coarsened to every level; the jump
/// stream is shared verbatim. Deterministic for a fixed master seed
/// regardless of the worker count.
ConvergenceReport run_residual_study(const ScenarioConfig& cfg, std::size_t n_threads = 1);

struct ReductionRow {
  std::string name;
  std::size_t cases = 0;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ReductionReport {
  std::vector<ReductionRow> rows;
  bool pass = false;
  std::string fingerprint;
  std::string version;
};

/// Reductions of the generalized formula: itemwise match with the jump-free
/// classical rule on randomized scenarios, the deterministic chain-rule
/// convergence rate, the strong rate of the chain rule on a noisy
/// quadratic, and the frozen-field match against the jump-diffusion chain
/// rule. The randomized matrix is seeded from the config's master seed.
ReductionReport run_reduction_suite(const ScenarioConfig& cfg, std::size_t n_threads = 1);

struct MollifierRow {
  std::string name;
  double epsilon = 0.0;
  double measured = 0.0;
  double reference = 0.0;  // closed-form target (0 for pure bound rows)
  double tolerance = 0.0;
  double bound = 0.0;      // applicable upper bound for `measured`
  bool pass = false;
};

struct MollifierReport {
  std::vector<MollifierRow> rows;
  bool pass = false;
  std::string version;
  std::string bound_note;  // records which bound constants are extended
};

/// Kernel-approximation checks: normalization, closed-form smoothing values,
/// the smoothing-error bound on kinked test functions, empirical convergence
/// orders, and the derivative-transfer identities.
MollifierReport run_mollifier_suite(const Vec& eps_grid = {0.5, 0.1, 0.02},
                                    std::size_t nodes_per_axis = 64,
                                    double cutoff_radius = 8.0);

struct FepsReport {
  MsConvergenceTable table;
  double slope_threshold = 1.5;
  bool pass = false;
  std::string fingerprint;
  std::string version;
  std::string slope_criterion_note;  // records that the rate threshold is empirical
};

FepsReport run_feps_study(const ScenarioConfig& cfg, const FepsParams& params);

/// Deterministic serializations (no timestamps; %.17g doubles). Reports
/// embed the scenario fingerprint and the artifact version.
std::string to_csv(const ConvergenceReport& report);
std::string to_csv(const ReductionReport& report);
std::string to_csv(const MollifierReport& report);
std::string to_csv(const FepsReport& report);

nlohmann::json to_json(const ConvergenceReport& report);
nlohmann::json to_json(const ReductionReport& report);
nlohmann::json to_json(const MollifierReport& report);
nlohmann::json to_json(const FepsReport& report);

}  // namespace itw
