#pragma once

#include <cstddef>
#include <variant>

#include "itw/linalg.hpp"

namespace itw {

/// Mark law menu. All laws are normalized probability distributions on the
/// mark space; the Poisson jump rate is carried separately.
struct UniformBoxMarks {
  Vec lo;
  Vec hi;
  bool operator==(const UniformBoxMarks&) const = default;
};

struct IsotropicGaussianMarks {
  Vec mean;
  double sigma = 1.0;
  bool operator==(const IsotropicGaussianMarks&) const = default;
};

struct DiscreteAtomMarks {
  Mat atoms;    // one atom per row
  Vec weights;  // same length as atoms.rows(), sums to 1
  bool operator==(const DiscreteAtomMarks&) const = default;
};

using MarkSampler = std::variant<UniformBoxMarks, IsotropicGaussianMarks, DiscreteAtomMarks>;

/// Finite-activity jump law: total event rate per unit time plus the
/// distribution of the mark attached to each event.
struct MarkDistribution {
  double total_intensity = 0.0;  // events per unit time
  MarkSampler mark_sampler;

  bool operator==(const MarkDistribution&) const = default;
};

std::size_t mark_dim_of(const MarkSampler& sampler);

}  // namespace itw
