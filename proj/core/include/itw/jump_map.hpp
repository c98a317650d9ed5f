#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "itw/linalg.hpp"
#include "itw/schedule.hpp"

namespace itw {

/// One time-piece of a mark-to-displacement map. Closed form in the mark:
///   linear:   out_i = offset_i + sum_j coeff(i,j) * mark_j
///   sinusoid: out_i = offset_i + amp_i * sin(dot(coeff.row(i), mark) + phase_i)
/// The sinusoid form stays bounded for unbounded mark laws.
struct JumpMapPiece {
  enum class Form { linear, sinusoid };

  Form form = Form::linear;
  Vec offset;   // out_dim
  Mat coeff;    // out_dim x mark_dim (linear slope or sinusoid frequency)
  Vec amp;      // out_dim, sinusoid only
  Vec phase;    // out_dim, sinusoid only

  bool operator==(const JumpMapPiece&) const = default;
};

/// Piecewise-constant-in-time map from (t, mark) to a displacement in R^d,
/// with a declared sup-norm bound that sampled marks are checked against.
struct JumpMap {
  PiecewiseSchedule<JumpMapPiece> pieces;
  double sup_bound = 0.0;
  std::size_t out_dim = 0;
  std::size_t mark_dim = 0;

  void eval(double t, std::span<const double> mark, std::span<double> out) const {
    const JumpMapPiece& p = pieces.piece_at(t);
    for (std::size_t i = 0; i < out_dim; ++i) {
      switch (p.form) {
        case JumpMapPiece::Form::linear:
          out[i] = p.offset[i] + dot(p.coeff.row(i), mark);
          break;
        case JumpMapPiece::Form::sinusoid:
          out[i] = p.offset[i] + p.amp[i] * std::sin(dot(p.coeff.row(i), mark) + p.phase[i]);
          break;
      }
    }
  }

  double eval_scalar(double t, std::span<const double> mark) const {
    double out = 0.0;
    eval(t, mark, {&out, 1});
    return out;
  }

  bool operator==(const JumpMap&) const = default;
};

}  // namespace itw
