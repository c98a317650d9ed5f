#pragma once

#include <cstddef>
#include <span>

#include "itw/checkpoints.hpp"
#include "itw/noise.hpp"

namespace itw::detail {

/// Single walk convention shared by the state and field evolutions (and the
/// ledger), so their checkpoint sequences align index-by-index:
///  - events strictly inside a step: drift advanced to the event time, jump
///    applied, step completed afterwards;
///  - the step's Wiener increment is booked at the step end;
///  - an event exactly at a grid node is processed after that node's
///    Wiener booking.
///
/// Payload requirements:
///   void advance_drift(std::size_t step, double t_from, double t_to);
///   void book_wiener(std::size_t step, std::span<const double> dw);
///   void apply_jump(std::size_t event, double t, std::span<const double> mark);
///   void checkpoint(double t, CheckpointKind kind);
template <typename Payload>
void walk_path(const WienerPath& wiener, const JumpStream& jumps, Payload& payload) {
  const TimeGrid& grid = wiener.grid;
  const std::size_t n_events = jumps.count();
  std::size_t j = 0;

  payload.checkpoint(0.0, CheckpointKind::grid);
  for (std::size_t i = 0; i < grid.steps; ++i) {
    const double t0 = grid.node(i);
    const double t1 = grid.node(i + 1);
    double t_cur = t0;

    while (j < n_events && jumps.times[j] < t1) {
      const double tau = jumps.times[j];
      payload.advance_drift(i, t_cur, tau);
      t_cur = tau;
      payload.checkpoint(tau, CheckpointKind::pre_jump);
      payload.apply_jump(j, tau, jumps.mark(j));
      payload.checkpoint(tau, CheckpointKind::post_jump);
      ++j;
    }

    payload.advance_drift(i, t_cur, t1);
    payload.book_wiener(i, wiener.increments.row(i));
    payload.checkpoint(t1, CheckpointKind::grid);

    while (j < n_events && jumps.times[j] == t1) {
      payload.checkpoint(t1, CheckpointKind::pre_jump);
      payload.apply_jump(j, t1, jumps.mark(j));
      payload.checkpoint(t1, CheckpointKind::post_jump);
      ++j;
    }
  }
}

}  // namespace itw::detail
