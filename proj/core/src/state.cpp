#include "itw/state.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "itw/detail/path_walk.hpp"
#include "itw/errors.hpp"

namespace itw {

namespace {

struct StateWalkPayload {
  const StateCoefficients& coeffs;
  const std::size_t grid_steps;
  Vec x;
  Vec jump_buf;
  StateTrajectory out;

  StateWalkPayload(const StateCoefficients& c, Vec x0, std::size_t steps, std::size_t reserve)
      : coeffs(c), grid_steps(steps), x(std::move(x0)) {
    jump_buf.resize(x.size());
    out.state_dim = x.size();
    out.times.reserve(reserve);
    out.kinds.reserve(reserve);
    out.values.reserve(reserve * x.size());
  }

  void advance_drift(std::size_t step, double t_from, double t_to) {
    const double dt = t_to - t_from;
    if (dt == 0.0) return;
    const Vec& a = coeffs.drift.piece_for_step(step, grid_steps);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += a[i] * dt;
  }

  void book_wiener(std::size_t step, std::span<const double> dw) {
    const Mat& b = coeffs.diffusion.piece_for_step(step, grid_steps);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dot(b.row(i), dw);
  }

  void apply_jump(std::size_t /*event*/, double t, std::span<const double> mark) {
    coeffs.jump_coeff.eval(t, mark, jump_buf);
    double norm_sq = 0.0;
    for (double v : jump_buf) norm_sq += v * v;
    if (std::sqrt(norm_sq) > coeffs.jump_coeff.sup_bound * (1.0 + 1e-12))
      throw JumpBoundError("state jump at t=" + std::to_string(t) +
                           " exceeds the declared bound " +
                           std::to_string(coeffs.jump_coeff.sup_bound));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += jump_buf[i];
  }

  void checkpoint(double t, CheckpointKind kind) {
    out.times.push_back(t);
    out.kinds.push_back(kind);
    out.values.insert(out.values.end(), x.begin(), x.end());
  }
};

void check_state_alignment(const StateCoefficients& coeffs, const Vec& x0,
                           const WienerPath& wiener) {
  const std::size_t steps = wiener.grid.steps;
  if (coeffs.drift.empty() || steps % coeffs.drift.piece_count() != 0 ||
      coeffs.diffusion.empty() || steps % coeffs.diffusion.piece_count() != 0)
    throw ScheduleMismatchError("state schedules are not aligned with the grid");
  for (const Vec& a : coeffs.drift.pieces())
    if (a.size() != x0.size()) throw ScheduleMismatchError("drift piece width != state dim");
  for (const Mat& b : coeffs.diffusion.pieces())
    if (b.rows() != x0.size() || b.cols() != wiener.wiener_dim())
      throw ScheduleMismatchError("diffusion piece shape != state x wiener dims");
}

}  // namespace

StateTrajectory evolve_state(const StateCoefficients& coeffs, const Vec& x0,
                             const WienerPath& wiener, const JumpStream& jumps) {
  check_state_alignment(coeffs, x0, wiener);
  const std::size_t reserve = wiener.grid.steps + 1 + 2 * jumps.count();
  StateWalkPayload payload(coeffs, x0, wiener.grid.steps, reserve);
  detail::walk_path(wiener, jumps, payload);
  return std::move(payload.out);
}

void dump_trajectory_csv(std::ostream& os, const StateTrajectory& trajectory) {
  os << "time,kind";
  for (std::size_t i = 0; i < trajectory.state_dim; ++i) os << ",x" << i + 1;
  os << "\n";
  os.precision(17);
  for (std::size_t idx = 0; idx < trajectory.count(); ++idx) {
    os << trajectory.times[idx] << ',' << to_string(trajectory.kinds[idx]);
    for (double v : trajectory.state(idx)) os << ',' << v;
    os << "\n";
  }
}

}  // namespace itw
