#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "itw/linalg.hpp"
#include "itw/mark_distribution.hpp"

namespace itw {

/// Uniform grid 0 = t_0 < t_1 < ... < t_M = horizon.
struct TimeGrid {
  std::size_t steps = 0;
  double horizon = 0.0;

  double dt() const { return horizon / static_cast<double>(steps); }
  double node(std::size_t i) const {
    return horizon * static_cast<double>(i) / static_cast<double>(steps);
  }
  std::vector<double> nodes() const {
    std::vector<double> out(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) out[i] = node(i);
    return out;
  }
  bool operator==(const TimeGrid&) const = default;
};

/// Wiener increments on a grid: increments(i, k) is the k-th component's
/// increment over [t_i, t_{i+1}].
struct WienerPath {
  TimeGrid grid;
  Mat increments;  // steps x wiener_dim

  std::size_t wiener_dim() const { return increments.cols(); }
  bool operator==(const WienerPath&) const = default;
};

/// Ordered jump events on (0, horizon].
struct JumpStream {
  double horizon = 0.0;
  Vec times;   // strictly increasing, in (0, horizon]
  Mat marks;   // times.size() x mark_dim

  std::size_t count() const { return times.size(); }
  std::span<const double> mark(std::size_t j) const { return marks.row(j); }
  bool operator==(const JumpStream&) const = default;
};

/// One full noise realization shared by the state and field evolutions.
struct NoisePath {
  WienerPath wiener;
  JumpStream jumps;
};

/// Draws i.i.d. N(0, dt) increments per component. Pure function of
/// (grid, wiener_dim, seed).
WienerPath sample_wiener(const TimeGrid& grid, std::size_t wiener_dim, std::uint64_t seed);

/// Sums blocks of `factor` consecutive increments. Block sums use balanced
/// (halving) summation, so coarsen(coarsen(p,2),2) == coarsen(p,4) exactly.
/// Throws FactorMismatchError unless factor divides the step count.
WienerPath coarsen_wiener(const WienerPath& path, std::size_t factor);

/// Event count ~ Poisson(rate*T); given the count, times are the order
/// statistics of i.i.d. Uniform(0,T] draws and marks are i.i.d. from the
/// mark law. Separate seeds drive the time and mark streams.
JumpStream sample_jumps(double horizon, const MarkDistribution& law,
                        std::uint64_t seed_time, std::uint64_t seed_mark);

/// Debugging dump. Layout: one header line
///   "noisepath steps=<M> wiener_dim=<m> mark_dim=<n'> horizon=<T> events=<N>"
/// then M lines of m whitespace-separated increments (row-major), then N
/// event lines "<time> <mark_1> ... <mark_n'>".
void dump_noise_path(std::ostream& os, const NoisePath& path);

}  // namespace itw
