#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>

#include "itw/errors.hpp"
#include "itw/linalg.hpp"

namespace itw {

/// Gaussian-kernel smoothing parameters. Quadrature is tensor-product
/// Gauss-Legendre on the cutoff box [x - R*eps, x + R*eps]^n after the
/// substitution z = (y - x)/eps; each axis uses two panels of
/// nodes_per_axis/2 points split at z = 0, so integrands with a kink at
/// the evaluation point stay piecewise-analytic.
struct MollifierParams {
  double epsilon = 0.1;
  std::size_t dim = 1;
  std::size_t nodes_per_axis = 64;  // even, >= 8
  double cutoff_radius = 8.0;       // in units of epsilon, >= 4

  void check() const;
};

/// Modulus-of-continuity witness |f(y1) - f(y2)| <= constant * |y1 - y2|^exponent.
struct HolderWitness {
  double constant = 0.0;    // L >= 0
  double exponent = 1.0;    // in (0, 1]
};

/// Product Gaussian kernel: prod_i exp(-u_i^2 / (2 eps^2)) / (eps sqrt(2 pi)).
double delta_eps(std::span<const double> u, const MollifierParams& params);

/// Smoothing-error bound 4 * eps^exponent * L / sqrt(2 pi). At exponent 1
/// this is the sharp closed-form constant; for exponent < 1 the same shape
/// is used with eps^exponent (extended constant, reported as such).
double holder_error_bound(const MollifierParams& params, const HolderWitness& witness);

/// Per-axis rule on z in [-R, R]: abscissas plus Gaussian-weighted weights
/// w_j * exp(-z_j^2/2)/sqrt(2 pi). Built once, reused across evaluations.
class MollifierRule {
 public:
  explicit MollifierRule(const MollifierParams& params);

  const MollifierParams& params() const { return params_; }

  /// Tensor-product quadrature of integral f(y) prod_i delta_eps(y_i - x_i) dy.
  /// Throws QuadratureOverflowError if f returns a non-finite value on a node.
  template <typename F>
  double mollify(F&& f, std::span<const double> x) const {
    const double eps = params_.epsilon;
    const std::size_t H = z_.size();
    double acc = 0.0;
    double y[3];
    switch (params_.dim) {
      case 1:
        for (std::size_t a = 0; a < H; ++a) {
          y[0] = x[0] + eps * z_[a];
          acc += w_[a] * checked(f(std::span<const double>(y, 1)));
        }
        break;
      case 2:
        for (std::size_t a = 0; a < H; ++a) {
          y[0] = x[0] + eps * z_[a];
          double inner = 0.0;
          for (std::size_t b = 0; b < H; ++b) {
            y[1] = x[1] + eps * z_[b];
            inner += w_[b] * checked(f(std::span<const double>(y, 2)));
          }
          acc += w_[a] * inner;
        }
        break;
      case 3:
        for (std::size_t a = 0; a < H; ++a) {
          y[0] = x[0] + eps * z_[a];
          double inner_a = 0.0;
          for (std::size_t b = 0; b < H; ++b) {
            y[1] = x[1] + eps * z_[b];
            double inner_b = 0.0;
            for (std::size_t c = 0; c < H; ++c) {
              y[2] = x[2] + eps * z_[c];
              inner_b += w_[c] * checked(f(std::span<const double>(y, 3)));
            }
            inner_a += w_[b] * inner_b;
          }
          acc += w_[a] * inner_a;
        }
        break;
      default:
        throw std::invalid_argument("mollify: dim must be 1..3");
    }
    return acc;
  }

  /// First-derivative transfer pair at scalar x (1-D rule):
  ///   lhs = -integral f(y) d/dy delta_eps(y - x) dy
  ///   rhs =  integral delta_eps(y - x) f'(y) dy
  template <typename F, typename DF>
  std::pair<double, double> grad_transfer(F&& f, DF&& df, double x) const {
    const double eps = params_.epsilon;
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t a = 0; a < z_.size(); ++a) {
      const double yy = x + eps * z_[a];
      lhs += w_[a] * (z_[a] / eps) * checked(f(yy));
      rhs += w_[a] * checked(df(yy));
    }
    return {lhs, rhs};
  }

  /// Second-derivative transfer pair at scalar x (1-D rule):
  ///   lhs = integral f(y) d^2/dy^2 delta_eps(y - x) dy
  ///   rhs = integral delta_eps(y - x) f''(y) dy
  template <typename F, typename D2F>
  std::pair<double, double> hess_transfer(F&& f, D2F&& d2f, double x) const {
    const double eps = params_.epsilon;
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t a = 0; a < z_.size(); ++a) {
      const double yy = x + eps * z_[a];
      lhs += w_[a] * ((z_[a] * z_[a] - 1.0) / (eps * eps)) * checked(f(yy));
      rhs += w_[a] * checked(d2f(yy));
    }
    return {lhs, rhs};
  }

  std::span<const double> abscissas() const { return z_; }
  std::span<const double> weights() const { return w_; }

 private:
  static double checked(double v) {
    if (!std::isfinite(v))
      throw QuadratureOverflowError("integrand returned a non-finite value on a quadrature node");
    return v;
  }

  MollifierParams params_;
  Vec z_;  // abscissas on [-R, R]
  Vec w_;  // Gaussian-weighted weights
};

using ScalarField = std::function<double(std::span<const double>)>;
using ScalarFn = std::function<double(double)>;

double mollify(const ScalarField& f, std::span<const double> x, const MollifierParams& params);
std::pair<double, double> mollify_grad_transfer(const ScalarFn& f, const ScalarFn& df, double x,
                                                const MollifierParams& params);
std::pair<double, double> mollify_hess_transfer(const ScalarFn& f, const ScalarFn& d2f, double x,
                                                const MollifierParams& params);

/// Plain Gauss-Legendre rule on [-1, 1] (Newton on the Legendre recurrence).
void gauss_legendre(std::size_t count, Vec& nodes, Vec& weights);

}  // namespace itw
