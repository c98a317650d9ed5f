#include "itw/mollifier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace itw {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

}  // namespace

void MollifierParams::check() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("mollifier: epsilon must be positive");
  if (dim < 1 || dim > 3) throw std::invalid_argument("mollifier: dim must be 1..3");
  if (nodes_per_axis < 8 || nodes_per_axis % 2 != 0)
    throw std::invalid_argument("mollifier: nodes_per_axis must be even and >= 8");
  if (!(cutoff_radius >= 4.0))
    throw std::invalid_argument("mollifier: cutoff_radius must be >= 4");
}

void gauss_legendre(std::size_t count, Vec& nodes, Vec& weights) {
  nodes.resize(count);
  weights.resize(count);
  const std::size_t half = (count + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_count.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(count) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= count; ++k) {
        const double pk = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 -
                           (static_cast<double>(k) - 1.0) * p0) /
                          static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(count) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[count - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[count - 1 - i] = w;
  }
}

double delta_eps(std::span<const double> u, const MollifierParams& params) {
  params.check();
  const double eps = params.epsilon;
  double out = 1.0;
  for (double ui : u) out *= kInvSqrt2Pi / eps * std::exp(-ui * ui / (2.0 * eps * eps));
  return out;
}

double holder_error_bound(const MollifierParams& params, const HolderWitness& witness) {
  return 4.0 * std::pow(params.epsilon, witness.exponent) * witness.constant /
         std::sqrt(2.0 * std::numbers::pi);
}

MollifierRule::MollifierRule(const MollifierParams& params) : params_(params) {
  params_.check();
  const std::size_t per_panel = params_.nodes_per_axis / 2;
  Vec ref_nodes;
  Vec ref_weights;
  gauss_legendre(per_panel, ref_nodes, ref_weights);

  const double R = params_.cutoff_radius;
  z_.resize(params_.nodes_per_axis);
  w_.resize(params_.nodes_per_axis);
  // panel [-R, 0] then [0, R]
  for (std::size_t panel = 0; panel < 2; ++panel) {
    const double a = panel == 0 ? -R : 0.0;
    const double b = panel == 0 ? 0.0 : R;
    for (std::size_t j = 0; j < per_panel; ++j) {
      const double z = 0.5 * (a + b) + 0.5 * (b - a) * ref_nodes[j];
      const double w = 0.5 * (b - a) * ref_weights[j];
      const std::size_t idx = panel * per_panel + j;
      z_[idx] = z;
      w_[idx] = w * kInvSqrt2Pi * std::exp(-z * z / 2.0);
    }
  }
}

double mollify(const ScalarField& f, std::span<const double> x, const MollifierParams& params) {
  return MollifierRule(params).mollify(f, x);
}

std::pair<double, double> mollify_grad_transfer(const ScalarFn& f, const ScalarFn& df, double x,
                                                const MollifierParams& params) {
  MollifierParams p1 = params;
  p1.dim = 1;
  return MollifierRule(p1).grad_transfer(f, df, x);
}

std::pair<double, double> mollify_hess_transfer(const ScalarFn& f, const ScalarFn& d2f, double x,
                                                const MollifierParams& params) {
  MollifierParams p1 = params;
  p1.dim = 1;
  return MollifierRule(p1).hess_transfer(f, d2f, x);
}

}  // namespace itw
