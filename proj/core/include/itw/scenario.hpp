#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "itw/field.hpp"
#include "itw/linalg.hpp"
#include "itw/mark_distribution.hpp"
#include "itw/rng.hpp"
#include "itw/state.hpp"

namespace itw {

/// Full description of one experiment: dimensions, horizon, Monte Carlo
/// sizes, coefficient schedules, jump law and field expansion. Immutable
/// after validation; shared read-only across workers.
struct ScenarioConfig {
  std::size_t state_dim = 1;
  std::size_t wiener_dim = 1;
  std::size_t mark_dim = 1;
  double horizon = 1.0;
  std::size_t base_steps = 1;
  std::size_t refinement_levels = 1;
  std::size_t n_paths = 1;
  std::uint64_t master_seed = 0;
  Vec initial_state;

  StateCoefficients state_coeffs;
  MarkDistribution jump_law;
  FieldSpec field_spec;

  bool operator==(const ScenarioConfig&) const = default;

  /// Grid at refinement level (level 0 = base_steps, each level halves dt).
  TimeGrid grid_at_level(std::size_t level) const {
    return TimeGrid{base_steps << level, horizon};
  }
};

enum class ValidationCode {
  invalid_dimension,
  invalid_schedule,
  invalid_intensity,
  invalid_field_spec,
};

const char* to_string(ValidationCode code);

struct ValidationIssue {
  ValidationCode code;
  std::string field;    // dotted path of the offending key
  std::string message;

  std::string str() const;
};

/// Checks every type invariant and returns the complete list of violations
/// (empty means the config is valid). Side-effect free and idempotent.
std::vector<ValidationIssue> validate_scenario(const ScenarioConfig& cfg);

/// Throws ConfigError aggregating all issues if the config is invalid.
void ensure_valid(const ScenarioConfig& cfg);

}  // namespace itw
