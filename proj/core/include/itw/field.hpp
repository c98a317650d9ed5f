#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "itw/checkpoints.hpp"
#include "itw/jump_map.hpp"
#include "itw/linalg.hpp"
#include "itw/noise.hpp"
#include "itw/schedule.hpp"

namespace itw {

/// Basis families. Each carries closed-form value, gradient and Hessian.
struct PolynomialBasis {
  std::vector<unsigned> exponents;  // multi-index, one entry per state dimension
  bool operator==(const PolynomialBasis&) const = default;
};

struct GaussianBumpBasis {
  Vec center;
  double width = 1.0;
  bool operator==(const GaussianBumpBasis&) const = default;
};

struct SinusoidBasis {
  Vec frequency;
  double phase = 0.0;
  bool operator==(const SinusoidBasis&) const = default;
};

using BasisFunction = std::variant<PolynomialBasis, GaussianBumpBasis, SinusoidBasis>;

double basis_value(const BasisFunction& basis, std::span<const double> x);
void basis_gradient(const BasisFunction& basis, std::span<const double> x, std::span<double> out);
void basis_hessian(const BasisFunction& basis, std::span<const double> x, Mat& out);

/// True for families bounded on the whole space (bump, sinusoid).
bool basis_is_bounded(const BasisFunction& basis);

/// Upper bound for sup |grad phi| over `box` (global bound for bounded
/// families; requires a box for polynomials, +inf without one).
double basis_gradient_sup_bound(const BasisFunction& basis, const Box* box);

/// Drivers of one expansion coefficient c_p:
///   dc_p = drift(t) dt + sum_k diffusion_k(t) dw_k + jump(t; mark) dN.
struct CoefficientDriver {
  double initial = 0.0;
  PiecewiseSchedule<double> drift;
  PiecewiseSchedule<Vec> diffusion;  // one m-vector per piece
  std::optional<JumpMap> jump;       // scalar-valued (out_dim == 1)

  bool operator==(const CoefficientDriver&) const = default;
};

/// Separable random field F(t,x) = sum_p c_p(t) phi_p(x). The coefficient
/// processes carry all randomness; space enters only through the fixed
/// basis, so F and its spatial derivatives are exact along any path.
struct FieldSpec {
  std::size_t state_dim = 0;
  std::vector<BasisFunction> basis;
  std::vector<CoefficientDriver> drivers;  // one per basis element
  std::optional<Box> state_box;            // required when any basis is unbounded

  std::size_t size() const { return basis.size(); }
  bool operator==(const FieldSpec&) const = default;
};

/// Field coefficients frozen at one instant.
struct FieldState {
  double time = 0.0;
  Vec coeffs;
};

/// Coefficient values at every checkpoint of a path walk, aligned
/// one-to-one with the StateTrajectory built from the same noise.
struct FieldPath {
  std::size_t coeff_count = 0;
  std::vector<double> times;
  std::vector<CheckpointKind> kinds;
  Vec values;  // times.size() x coeff_count, row-major

  std::size_t count() const { return times.size(); }
  std::span<const double> coeffs(std::size_t idx) const {
    return {values.data() + idx * coeff_count, coeff_count};
  }
  FieldState state(std::size_t idx) const {
    auto c = coeffs(idx);
    return FieldState{times[idx], Vec(c.begin(), c.end())};
  }
};

/// Integrates the coefficient processes along the given noise, exactly:
/// drift is advanced to each event time, jumps land at their exact times,
/// Wiener increments are booked at step ends. Checkpoints at every grid
/// node plus pre/post pairs at every jump.
FieldPath evolve_field(const FieldSpec& spec, const WienerPath& wiener, const JumpStream& jumps);

/// F(t,x), its gradient and Hessian from the expansion.
double eval_field(std::span<const double> coeffs, const FieldSpec& spec, std::span<const double> x);
void eval_field_grad(std::span<const double> coeffs, const FieldSpec& spec,
                     std::span<const double> x, std::span<double> out);
void eval_field_hess(std::span<const double> coeffs, const FieldSpec& spec,
                     std::span<const double> x, Mat& out);

inline double eval_field(const FieldState& state, const FieldSpec& spec, std::span<const double> x) {
  return eval_field(std::span<const double>(state.coeffs), spec, x);
}

/// Field-equation coefficients at (t, x): drift Q, diffusion row D_k,
/// diffusion spatial gradient dD_k/dx_i, and jump amplitude G.
/// Schedule breakpoints resolve right-open in t.
double field_drift_at(const FieldSpec& spec, double t, std::span<const double> x);
Vec field_diffusion_at(const FieldSpec& spec, double t, std::span<const double> x);
Mat field_diffusion_grad_at(const FieldSpec& spec, double t, std::span<const double> x);
double field_jump_at(const FieldSpec& spec, double t, std::span<const double> x,
                     std::span<const double> mark);

/// All basis values/gradients/Hessians at one point, computed once and
/// reused across the coefficient contractions of a ledger step.
class BasisEval {
 public:
  explicit BasisEval(const FieldSpec& spec);

  void compute(std::span<const double> x, bool need_derivatives);

  double value(std::size_t p) const { return values_[p]; }
  std::span<const double> grad(std::size_t p) const { return {grads_.data() + p * dim_, dim_}; }
  double hess(std::size_t p, std::size_t i, std::size_t j) const {
    return hessians_[(p * dim_ + i) * dim_ + j];
  }

  /// sum_p weight_p * phi_p(x)
  double contract(std::span<const double> weights) const {
    return dot(weights, std::span<const double>(values_));
  }

 private:
  const FieldSpec* spec_;
  std::size_t dim_;
  Vec values_;
  Vec grads_;
  Vec hessians_;
  Mat hess_scratch_;
};

}  // namespace itw
