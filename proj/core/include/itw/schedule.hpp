#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace itw {

/// Piecewise-constant-in-time coefficient schedule on [0, horizon].
///
/// The k-th piece governs the right-open window [k*h/P, (k+1)*h/P) with
/// P = piece_count(); the last window also covers t = horizon. Piece counts
/// must divide the base step count so that every breakpoint is a node of
/// the coarsest grid (and therefore of every refinement of it).
///
/// Two lookups are provided on purpose:
///  - piece_for_step() maps a step index of an aligned grid in exact
///    integer arithmetic (used for the left-node step coefficients);
///  - piece_at() maps a continuous time (used for jump events, so the
///    piece a mark sees does not depend on the grid level).
template <typename T>
class PiecewiseSchedule {
 public:
  PiecewiseSchedule() = default;
  PiecewiseSchedule(std::vector<T> pieces, double horizon)
      : pieces_(std::move(pieces)), horizon_(horizon) {}

  static PiecewiseSchedule constant(T value, double horizon) {
    return PiecewiseSchedule({std::move(value)}, horizon);
  }

  std::size_t piece_count() const { return pieces_.size(); }
  double horizon() const { return horizon_; }
  bool empty() const { return pieces_.empty(); }

  const T& piece(std::size_t k) const { return pieces_[k]; }
  const std::vector<T>& pieces() const { return pieces_; }

  /// True iff breakpoints land on nodes of a uniform grid with base_steps steps.
  bool aligned_with(std::size_t base_steps) const {
    return !pieces_.empty() && base_steps % pieces_.size() == 0;
  }

  /// Piece governing step `step` of a uniform grid with `grid_steps` steps.
  /// Requires piece_count() | grid_steps.
  const T& piece_for_step(std::size_t step, std::size_t grid_steps) const {
    const std::size_t stride = grid_steps / pieces_.size();
    return pieces_[step / stride];
  }

  /// Piece governing continuous time t under the right-open convention.
  const T& piece_at(double t) const {
    if (pieces_.size() == 1) return pieces_[0];
    auto k = static_cast<long>(std::floor(t / horizon_ * static_cast<double>(pieces_.size())));
    if (k < 0) k = 0;
    if (k >= static_cast<long>(pieces_.size())) k = static_cast<long>(pieces_.size()) - 1;
    return pieces_[static_cast<std::size_t>(k)];
  }

  bool operator==(const PiecewiseSchedule&) const = default;

 private:
  std::vector<T> pieces_;
  double horizon_ = 0.0;
};

}  // namespace itw
