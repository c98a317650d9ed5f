#include "itw/field.hpp"

#include <cmath>
#include <limits>

#include "itw/detail/path_walk.hpp"
#include "itw/errors.hpp"

namespace itw {

namespace {

double pow_int(double base, unsigned exp) {
  double out = 1.0;
  while (exp) {
    if (exp & 1u) out *= base;
    base *= base;
    exp >>= 1u;
  }
  return out;
}

}  // namespace

double basis_value(const BasisFunction& basis, std::span<const double> x) {
  return std::visit(
      [&](const auto& b) -> double {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, PolynomialBasis>) {
          double v = 1.0;
          for (std::size_t i = 0; i < x.size(); ++i) v *= pow_int(x[i], b.exponents[i]);
          return v;
        } else if constexpr (std::is_same_v<B, GaussianBumpBasis>) {
          double r2 = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - b.center[i];
            r2 += d * d;
          }
          return std::exp(-r2 / (2.0 * b.width * b.width));
        } else {
          return std::sin(dot(b.frequency, x) + b.phase);
        }
      },
      basis);
}

void basis_gradient(const BasisFunction& basis, std::span<const double> x, std::span<double> out) {
  std::visit(
      [&](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, PolynomialBasis>) {
          for (std::size_t j = 0; j < x.size(); ++j) {
            if (b.exponents[j] == 0) {
              out[j] = 0.0;
              continue;
            }
            double v = static_cast<double>(b.exponents[j]) * pow_int(x[j], b.exponents[j] - 1);
            for (std::size_t i = 0; i < x.size(); ++i)
              if (i != j) v *= pow_int(x[i], b.exponents[i]);
            out[j] = v;
          }
        } else if constexpr (std::is_same_v<B, GaussianBumpBasis>) {
          const double value = basis_value(basis, x);
          const double inv_w2 = 1.0 / (b.width * b.width);
          for (std::size_t i = 0; i < x.size(); ++i)
            out[i] = -(x[i] - b.center[i]) * inv_w2 * value;
        } else {
          const double c = std::cos(dot(b.frequency, x) + b.phase);
          for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * b.frequency[i];
        }
      },
      basis);
}

void basis_hessian(const BasisFunction& basis, std::span<const double> x, Mat& out) {
  const std::size_t n = x.size();
  std::visit(
      [&](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, PolynomialBasis>) {
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
              double v;
              if (i == j) {
                if (b.exponents[i] < 2) {
                  out(i, i) = 0.0;
                  continue;
                }
                v = static_cast<double>(b.exponents[i]) * static_cast<double>(b.exponents[i] - 1) *
                    pow_int(x[i], b.exponents[i] - 2);
                for (std::size_t k = 0; k < n; ++k)
                  if (k != i) v *= pow_int(x[k], b.exponents[k]);
              } else {
                if (b.exponents[i] == 0 || b.exponents[j] == 0) {
                  out(i, j) = out(j, i) = 0.0;
                  continue;
                }
                v = static_cast<double>(b.exponents[i]) * static_cast<double>(b.exponents[j]) *
                    pow_int(x[i], b.exponents[i] - 1) * pow_int(x[j], b.exponents[j] - 1);
                for (std::size_t k = 0; k < n; ++k)
                  if (k != i && k != j) v *= pow_int(x[k], b.exponents[k]);
              }
              out(i, j) = v;
              out(j, i) = v;
            }
          }
        } else if constexpr (std::is_same_v<B, GaussianBumpBasis>) {
          const double value = basis_value(basis, x);
          const double inv_w2 = 1.0 / (b.width * b.width);
          for (std::size_t i = 0; i < n; ++i) {
            const double di = (x[i] - b.center[i]) * inv_w2;
            for (std::size_t j = i; j < n; ++j) {
              const double dj = (x[j] - b.center[j]) * inv_w2;
              double v = di * dj * value;
              if (i == j) v -= inv_w2 * value;
              out(i, j) = v;
              out(j, i) = v;
            }
          }
        } else {
          const double s = std::sin(dot(b.frequency, x) + b.phase);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
              const double v = -s * b.frequency[i] * b.frequency[j];
              out(i, j) = v;
              out(j, i) = v;
            }
        }
      },
      basis);
}

bool basis_is_bounded(const BasisFunction& basis) {
  return std::visit(
      [](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, PolynomialBasis>) {
          for (unsigned e : b.exponents)
            if (e > 0) return false;
          return true;
        } else {
          return true;
        }
      },
      basis);
}

double basis_gradient_sup_bound(const BasisFunction& basis, const Box* box) {
  return std::visit(
      [&](const auto& b) -> double {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, PolynomialBasis>) {
          if (basis_is_bounded(basis)) return 0.0;
          if (box == nullptr) return std::numeric_limits<double>::infinity();
          const std::size_t n = b.exponents.size();
          double sum_sq = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            if (b.exponents[j] == 0) continue;
            const double xj = std::max(std::abs(box->lo[j]), std::abs(box->hi[j]));
            double term = static_cast<double>(b.exponents[j]) * pow_int(xj, b.exponents[j] - 1);
            for (std::size_t i = 0; i < n; ++i) {
              if (i == j) continue;
              const double xi = std::max(std::abs(box->lo[i]), std::abs(box->hi[i]));
              term *= pow_int(xi, b.exponents[i]);
            }
            sum_sq += term * term;
          }
          return std::sqrt(sum_sq);
        } else if constexpr (std::is_same_v<B, GaussianBumpBasis>) {
          // max_r (r/w^2) exp(-r^2/(2w^2)) = exp(-1/2)/w at r = w
          return std::exp(-0.5) / b.width;
        } else {
          return std::sqrt(dot(b.frequency, b.frequency));
        }
      },
      basis);
}

namespace {

struct FieldWalkPayload {
  const FieldSpec& spec;
  const std::size_t grid_steps;
  Vec coeffs;
  FieldPath out;

  FieldWalkPayload(const FieldSpec& s, std::size_t steps, std::size_t reserve)
      : spec(s), grid_steps(steps) {
    coeffs.resize(spec.size());
    for (std::size_t p = 0; p < spec.size(); ++p) coeffs[p] = spec.drivers[p].initial;
    out.coeff_count = spec.size();
    out.times.reserve(reserve);
    out.kinds.reserve(reserve);
    out.values.reserve(reserve * spec.size());
  }

  void advance_drift(std::size_t step, double t_from, double t_to) {
    const double dt = t_to - t_from;
    if (dt == 0.0) return;
    for (std::size_t p = 0; p < spec.size(); ++p)
      coeffs[p] += spec.drivers[p].drift.piece_for_step(step, grid_steps) * dt;
  }

  void book_wiener(std::size_t step, std::span<const double> dw) {
    for (std::size_t p = 0; p < spec.size(); ++p) {
      const Vec& d = spec.drivers[p].diffusion.piece_for_step(step, grid_steps);
      coeffs[p] += dot(d, dw);
    }
  }

  void apply_jump(std::size_t /*event*/, double t, std::span<const double> mark) {
    for (std::size_t p = 0; p < spec.size(); ++p)
      if (spec.drivers[p].jump) coeffs[p] += spec.drivers[p].jump->eval_scalar(t, mark);
  }

  void checkpoint(double t, CheckpointKind kind) {
    out.times.push_back(t);
    out.kinds.push_back(kind);
    out.values.insert(out.values.end(), coeffs.begin(), coeffs.end());
  }
};

void check_field_alignment(const FieldSpec& spec, const WienerPath& wiener) {
  const std::size_t steps = wiener.grid.steps;
  for (std::size_t p = 0; p < spec.size(); ++p) {
    const auto& drv = spec.drivers[p];
    if (drv.drift.empty() || steps % drv.drift.piece_count() != 0 ||
        drv.diffusion.empty() || steps % drv.diffusion.piece_count() != 0)
      throw ScheduleMismatchError("field driver " + std::to_string(p) +
                                  ": schedule pieces do not divide grid steps");
    for (const Vec& piece : drv.diffusion.pieces())
      if (piece.size() != wiener.wiener_dim())
        throw ScheduleMismatchError("field driver " + std::to_string(p) +
                                    ": diffusion width != wiener dimension");
  }
}

}  // namespace

FieldPath evolve_field(const FieldSpec& spec, const WienerPath& wiener, const JumpStream& jumps) {
  check_field_alignment(spec, wiener);
  const std::size_t reserve = wiener.grid.steps + 1 + 2 * jumps.count();
  FieldWalkPayload payload(spec, wiener.grid.steps, reserve);
  detail::walk_path(wiener, jumps, payload);
  return std::move(payload.out);
}

double eval_field(std::span<const double> coeffs, const FieldSpec& spec,
                  std::span<const double> x) {
  double v = 0.0;
  for (std::size_t p = 0; p < spec.size(); ++p) v += coeffs[p] * basis_value(spec.basis[p], x);
  return v;
}

void eval_field_grad(std::span<const double> coeffs, const FieldSpec& spec,
                     std::span<const double> x, std::span<double> out) {
  for (auto& v : out) v = 0.0;
  Vec g(x.size());
  for (std::size_t p = 0; p < spec.size(); ++p) {
    basis_gradient(spec.basis[p], x, g);
    axpy(coeffs[p], g, out);
  }
}

void eval_field_hess(std::span<const double> coeffs, const FieldSpec& spec,
                     std::span<const double> x, Mat& out) {
  const std::size_t n = x.size();
  out = Mat(n, n);
  Mat h(n, n);
  for (std::size_t p = 0; p < spec.size(); ++p) {
    basis_hessian(spec.basis[p], x, h);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += coeffs[p] * h(i, j);
  }
}

double field_drift_at(const FieldSpec& spec, double t, std::span<const double> x) {
  double v = 0.0;
  for (std::size_t p = 0; p < spec.size(); ++p)
    v += spec.drivers[p].drift.piece_at(t) * basis_value(spec.basis[p], x);
  return v;
}

Vec field_diffusion_at(const FieldSpec& spec, double t, std::span<const double> x) {
  Vec out;
  if (spec.size() == 0) return out;
  out.assign(spec.drivers[0].diffusion.piece(0).size(), 0.0);
  for (std::size_t p = 0; p < spec.size(); ++p) {
    const double phi = basis_value(spec.basis[p], x);
    const Vec& d = spec.drivers[p].diffusion.piece_at(t);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += d[k] * phi;
  }
  return out;
}

Mat field_diffusion_grad_at(const FieldSpec& spec, double t, std::span<const double> x) {
  const std::size_t n = x.size();
  std::size_t m = spec.size() ? spec.drivers[0].diffusion.piece(0).size() : 0;
  Mat out(m, n);
  Vec g(n);
  for (std::size_t p = 0; p < spec.size(); ++p) {
    basis_gradient(spec.basis[p], x, g);
    const Vec& d = spec.drivers[p].diffusion.piece_at(t);
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t i = 0; i < n; ++i) out(k, i) += d[k] * g[i];
  }
  return out;
}

double field_jump_at(const FieldSpec& spec, double t, std::span<const double> x,
                     std::span<const double> mark) {
  double v = 0.0;
  for (std::size_t p = 0; p < spec.size(); ++p) {
    if (!spec.drivers[p].jump) continue;
    v += spec.drivers[p].jump->eval_scalar(t, mark) * basis_value(spec.basis[p], x);
  }
  return v;
}

BasisEval::BasisEval(const FieldSpec& spec)
    : spec_(&spec),
      dim_(spec.state_dim),
      values_(spec.size()),
      grads_(spec.size() * spec.state_dim),
      hessians_(spec.size() * spec.state_dim * spec.state_dim),
      hess_scratch_(spec.state_dim, spec.state_dim) {}

void BasisEval::compute(std::span<const double> x, bool need_derivatives) {
  for (std::size_t p = 0; p < spec_->size(); ++p) {
    values_[p] = basis_value(spec_->basis[p], x);
    if (!need_derivatives) continue;
    basis_gradient(spec_->basis[p], x, {grads_.data() + p * dim_, dim_});
    basis_hessian(spec_->basis[p], x, hess_scratch_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        hessians_[(p * dim_ + i) * dim_ + j] = hess_scratch_(i, j);
  }
}

}  // namespace itw
