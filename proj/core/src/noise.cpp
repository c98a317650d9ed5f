#include "itw/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "itw/errors.hpp"
#include "itw/rng.hpp"

namespace itw {

std::size_t mark_dim_of(const MarkSampler& sampler) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, UniformBoxMarks>) return s.lo.size();
        if constexpr (std::is_same_v<S, IsotropicGaussianMarks>) return s.mean.size();
        if constexpr (std::is_same_v<S, DiscreteAtomMarks>) return s.atoms.cols();
      },
      sampler);
}

WienerPath sample_wiener(const TimeGrid& grid, std::size_t wiener_dim, std::uint64_t seed) {
  Engine engine = make_engine(seed);
  std::normal_distribution<double> normal;
  const double sqrt_dt = std::sqrt(grid.dt());

  WienerPath path;
  path.grid = grid;
  path.increments = Mat(grid.steps, wiener_dim);
  for (std::size_t i = 0; i < grid.steps; ++i)
    for (std::size_t k = 0; k < wiener_dim; ++k)
      path.increments(i, k) = sqrt_dt * normal(engine);
  return path;
}

namespace {

// Balanced block sum: sum(a..b) = sum(a..mid) + sum(mid..b). Iterated
// power-of-two coarsening then reproduces the same association order.
double balanced_sum(const Mat& inc, std::size_t col, std::size_t begin, std::size_t end) {
  const std::size_t len = end - begin;
  if (len == 1) return inc(begin, col);
  const std::size_t mid = begin + len / 2;
  return balanced_sum(inc, col, begin, mid) + balanced_sum(inc, col, mid, end);
}

}  // namespace

WienerPath coarsen_wiener(const WienerPath& path, std::size_t factor) {
  const std::size_t steps = path.grid.steps;
  if (factor < 1 || steps % factor != 0)
    throw FactorMismatchError("coarsen_wiener: factor " + std::to_string(factor) +
                              " does not divide step count " + std::to_string(steps));
  if (factor == 1) return path;

  const std::size_t coarse_steps = steps / factor;
  WienerPath out;
  out.grid = TimeGrid{coarse_steps, path.grid.horizon};
  out.increments = Mat(coarse_steps, path.wiener_dim());
  for (std::size_t j = 0; j < coarse_steps; ++j)
    for (std::size_t k = 0; k < path.wiener_dim(); ++k)
      out.increments(j, k) = balanced_sum(path.increments, k, j * factor, (j + 1) * factor);
  return out;
}

namespace {

void draw_mark(const MarkSampler& sampler, Engine& engine, std::span<double> out) {
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, UniformBoxMarks>) {
          for (std::size_t d = 0; d < out.size(); ++d) {
            std::uniform_real_distribution<double> u(s.lo[d], s.hi[d]);
            out[d] = u(engine);
          }
        } else if constexpr (std::is_same_v<S, IsotropicGaussianMarks>) {
          std::normal_distribution<double> normal;
          for (std::size_t d = 0; d < out.size(); ++d)
            out[d] = s.mean[d] + s.sigma * normal(engine);
        } else if constexpr (std::is_same_v<S, DiscreteAtomMarks>) {
          std::uniform_real_distribution<double> u(0.0, 1.0);
          const double r = u(engine);
          double acc = 0.0;
          std::size_t pick = s.weights.size() - 1;
          for (std::size_t a = 0; a < s.weights.size(); ++a) {
            acc += s.weights[a];
            if (r < acc) {
              pick = a;
              break;
            }
          }
          auto row = s.atoms.row(pick);
          std::copy(row.begin(), row.end(), out.begin());
        }
      },
      sampler);
}

}  // namespace

JumpStream sample_jumps(double horizon, const MarkDistribution& law,
                        std::uint64_t seed_time, std::uint64_t seed_mark) {
  JumpStream stream;
  stream.horizon = horizon;
  const std::size_t mark_dim = mark_dim_of(law.mark_sampler);
  if (law.total_intensity <= 0.0) {
    stream.marks = Mat(0, mark_dim);
    return stream;
  }

  Engine time_engine = make_engine(seed_time);
  std::poisson_distribution<long> count_dist(law.total_intensity * horizon);
  const auto count = static_cast<std::size_t>(count_dist(time_engine));

  // T*(1 - U) with U in [0,1) keeps the times inside (0, T].
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  stream.times.resize(count);
  for (auto& t : stream.times) t = horizon * (1.0 - unit(time_engine));
  std::sort(stream.times.begin(), stream.times.end());

  Engine mark_engine = make_engine(seed_mark);
  stream.marks = Mat(count, mark_dim);
  for (std::size_t j = 0; j < count; ++j) draw_mark(law.mark_sampler, mark_engine, stream.marks.row(j));
  return stream;
}

void dump_noise_path(std::ostream& os, const NoisePath& path) {
  const auto& w = path.wiener;
  const auto& j = path.jumps;
  os << "noisepath steps=" << w.grid.steps << " wiener_dim=" << w.wiener_dim()
     << " mark_dim=" << j.marks.cols() << " horizon=" << w.grid.horizon
     << " events=" << j.count() << "\n";
  os.precision(17);
  for (std::size_t i = 0; i < w.grid.steps; ++i) {
    for (std::size_t k = 0; k < w.wiener_dim(); ++k) {
      if (k) os << ' ';
      os << w.increments(i, k);
    }
    os << "\n";
  }
  for (std::size_t e = 0; e < j.count(); ++e) {
    os << j.times[e];
    for (double m : j.mark(e)) os << ' ' << m;
    os << "\n";
  }
}

}  // namespace itw
