#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "itw/checkpoints.hpp"
#include "itw/jump_map.hpp"
#include "itw/linalg.hpp"
#include "itw/noise.hpp"
#include "itw/schedule.hpp"

namespace itw {

/// Coefficients of the state equation
///   dx = drift(t) dt + diffusion(t) dw + jump_coeff(t; mark) dN,
/// with time-only, piecewise-constant drift/diffusion.
struct StateCoefficients {
  PiecewiseSchedule<Vec> drift;      // n-vector per piece
  PiecewiseSchedule<Mat> diffusion;  // n x m matrix per piece
  JumpMap jump_coeff;                // out_dim == n

  bool operator==(const StateCoefficients&) const = default;
};

/// State values at every checkpoint of a path walk (cadlag convention:
/// post_jump rows carry the right-continuous value).
struct StateTrajectory {
  std::size_t state_dim = 0;
  std::vector<double> times;
  std::vector<CheckpointKind> kinds;
  Vec values;  // times.size() x state_dim, row-major

  std::size_t count() const { return times.size(); }
  std::span<const double> state(std::size_t idx) const {
    return {values.data() + idx * state_dim, state_dim};
  }
};

/// Integrates the state exactly along the given noise: between events the
/// increment is drift*dt + diffusion*dw for the governing pieces; jumps are
/// applied at their exact times by the shared walk convention (drift
/// advanced to the event, full Wiener increment booked at the step end).
/// Throws ScheduleMismatchError on misaligned schedules, and checks each
/// applied jump against the declared sup bound.
StateTrajectory evolve_state(const StateCoefficients& coeffs, const Vec& x0,
                             const WienerPath& wiener, const JumpStream& jumps);

/// Debugging dump, one checkpoint per line: "time,kind,x_1,...,x_n" after a
/// "time,kind,x..." header.
void dump_trajectory_csv(std::ostream& os, const StateTrajectory& trajectory);

}  // namespace itw
