#include "itw/scenario.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "itw/errors.hpp"

namespace itw {

const char* to_string(ValidationCode code) {
  switch (code) {
    case ValidationCode::invalid_dimension: return "InvalidDimension";
    case ValidationCode::invalid_schedule: return "InvalidSchedule";
    case ValidationCode::invalid_intensity: return "InvalidIntensity";
    case ValidationCode::invalid_field_spec: return "InvalidFieldSpec";
  }
  return "?";
}

std::string ValidationIssue::str() const {
  return std::string(to_string(code)) + "(" + field + "): " + message;
}

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

class Checker {
 public:
  explicit Checker(const ScenarioConfig& cfg) : cfg_(cfg) {}

  std::vector<ValidationIssue> run() {
    check_dimensions();
    check_state_coeffs();
    check_jump_law();
    check_field_spec();
    return std::move(issues_);
  }

 private:
  void add(ValidationCode code, std::string field, std::string message) {
    issues_.push_back({code, std::move(field), std::move(message)});
  }

  void check_dimensions() {
    if (cfg_.state_dim < 1) add(ValidationCode::invalid_dimension, "state_dim", "must be >= 1");
    if (cfg_.wiener_dim < 1) add(ValidationCode::invalid_dimension, "wiener_dim", "must be >= 1");
    if (cfg_.mark_dim < 1) add(ValidationCode::invalid_dimension, "mark_dim", "must be >= 1");
    if (!(cfg_.horizon > 0.0) || !std::isfinite(cfg_.horizon))
      add(ValidationCode::invalid_dimension, "horizon", "must be a positive finite real");
    if (cfg_.base_steps < 1) add(ValidationCode::invalid_dimension, "base_steps", "must be >= 1");
    if (cfg_.refinement_levels < 1)
      add(ValidationCode::invalid_dimension, "refinement_levels", "must be >= 1");
    else if (cfg_.base_steps >= 1) {
      const std::size_t max_steps = std::size_t{1} << 31;
      if (cfg_.refinement_levels > 31 ||
          cfg_.base_steps > (max_steps >> (cfg_.refinement_levels - 1)))
        add(ValidationCode::invalid_dimension, "refinement_levels",
            "finest grid base_steps * 2^(levels-1) must not exceed 2^31");
    }
    if (cfg_.n_paths < 1) add(ValidationCode::invalid_dimension, "n_paths", "must be >= 1");
    if (cfg_.initial_state.size() != cfg_.state_dim)
      add(ValidationCode::invalid_dimension, "initial_state",
          "length " + std::to_string(cfg_.initial_state.size()) + " != state_dim");
    else if (!all_finite(cfg_.initial_state))
      add(ValidationCode::invalid_dimension, "initial_state", "contains non-finite entries");
  }

  template <typename T>
  bool check_schedule_shape(const PiecewiseSchedule<T>& sched, const std::string& field) {
    if (sched.empty()) {
      add(ValidationCode::invalid_schedule, field, "schedule has no pieces");
      return false;
    }
    if (cfg_.base_steps >= 1 && !sched.aligned_with(cfg_.base_steps)) {
      add(ValidationCode::invalid_schedule, field,
          "piece count " + std::to_string(sched.piece_count()) +
              " does not divide base_steps " + std::to_string(cfg_.base_steps));
      return false;
    }
    if (sched.horizon() != cfg_.horizon) {
      add(ValidationCode::invalid_schedule, field, "schedule horizon != scenario horizon");
      return false;
    }
    return true;
  }

  void check_jump_map(const JumpMap& map, std::size_t out_dim, const std::string& field) {
    if (map.out_dim != out_dim)
      add(ValidationCode::invalid_schedule, field, "output dimension mismatch");
    if (map.mark_dim != cfg_.mark_dim)
      add(ValidationCode::invalid_schedule, field, "mark dimension mismatch");
    if (!(map.sup_bound >= 0.0) || !std::isfinite(map.sup_bound))
      add(ValidationCode::invalid_schedule, field + ".bound",
          "declared sup bound must be finite and >= 0");
    if (!check_schedule_shape(map.pieces, field + ".pieces")) return;
    for (std::size_t k = 0; k < map.pieces.piece_count(); ++k) {
      const JumpMapPiece& p = map.pieces.piece(k);
      const std::string where = field + ".pieces[" + std::to_string(k) + "]";
      if (p.offset.size() != map.out_dim || p.coeff.rows() != map.out_dim ||
          p.coeff.cols() != map.mark_dim) {
        add(ValidationCode::invalid_schedule, where, "piece shape mismatch");
        continue;
      }
      bool finite = all_finite(p.offset) && all_finite(p.coeff.data());
      if (p.form == JumpMapPiece::Form::sinusoid) {
        if (p.amp.size() != map.out_dim || p.phase.size() != map.out_dim) {
          add(ValidationCode::invalid_schedule, where, "sinusoid piece shape mismatch");
          continue;
        }
        finite = finite && all_finite(p.amp) && all_finite(p.phase);
      }
      if (!finite) add(ValidationCode::invalid_schedule, where, "non-finite piece values");
    }
  }

  void check_state_coeffs() {
    const auto& sc = cfg_.state_coeffs;
    if (check_schedule_shape(sc.drift, "state_coeffs.drift")) {
      for (std::size_t k = 0; k < sc.drift.piece_count(); ++k) {
        const Vec& a = sc.drift.piece(k);
        if (a.size() != cfg_.state_dim)
          add(ValidationCode::invalid_schedule,
              "state_coeffs.drift[" + std::to_string(k) + "]", "piece width != state_dim");
        else if (!all_finite(a))
          add(ValidationCode::invalid_schedule,
              "state_coeffs.drift[" + std::to_string(k) + "]", "non-finite values");
      }
    }
    if (check_schedule_shape(sc.diffusion, "state_coeffs.diffusion")) {
      for (std::size_t k = 0; k < sc.diffusion.piece_count(); ++k) {
        const Mat& b = sc.diffusion.piece(k);
        if (b.rows() != cfg_.state_dim || b.cols() != cfg_.wiener_dim)
          add(ValidationCode::invalid_schedule,
              "state_coeffs.diffusion[" + std::to_string(k) + "]",
              "piece shape != state_dim x wiener_dim");
        else if (!all_finite(b.data()))
          add(ValidationCode::invalid_schedule,
              "state_coeffs.diffusion[" + std::to_string(k) + "]", "non-finite values");
      }
    }
    check_jump_map(sc.jump_coeff, cfg_.state_dim, "state_coeffs.jump_coeff");
  }

  void check_jump_law() {
    const auto& law = cfg_.jump_law;
    if (!(law.total_intensity >= 0.0) || !std::isfinite(law.total_intensity))
      add(ValidationCode::invalid_intensity, "jump_law.total_intensity",
          "must be finite and >= 0");
    if (mark_dim_of(law.mark_sampler) != cfg_.mark_dim)
      add(ValidationCode::invalid_intensity, "jump_law.mark_sampler",
          "mark dimension != mark_dim");
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, UniformBoxMarks>) {
            if (s.lo.size() != s.hi.size())
              add(ValidationCode::invalid_intensity, "jump_law.mark_sampler",
                  "box lo/hi length mismatch");
            else
              for (std::size_t d = 0; d < s.lo.size(); ++d)
                if (!(s.lo[d] <= s.hi[d]) || !std::isfinite(s.lo[d]) || !std::isfinite(s.hi[d]))
                  add(ValidationCode::invalid_intensity,
                      "jump_law.mark_sampler.lo[" + std::to_string(d) + "]",
                      "box bounds must be ordered and finite");
          } else if constexpr (std::is_same_v<S, IsotropicGaussianMarks>) {
            if (!(s.sigma > 0.0) || !std::isfinite(s.sigma))
              add(ValidationCode::invalid_intensity, "jump_law.mark_sampler.sigma",
                  "must be positive and finite");
            if (!all_finite(s.mean))
              add(ValidationCode::invalid_intensity, "jump_law.mark_sampler.mean",
                  "non-finite values");
          } else if constexpr (std::is_same_v<S, DiscreteAtomMarks>) {
            if (s.weights.size() != s.atoms.rows() || s.weights.empty()) {
              add(ValidationCode::invalid_intensity, "jump_law.mark_sampler.weights",
                  "one weight per atom required");
              return;
            }
            double sum = 0.0;
            for (double w : s.weights) {
              if (!(w >= 0.0) || !std::isfinite(w))
                add(ValidationCode::invalid_intensity, "jump_law.mark_sampler.weights",
                    "weights must be finite and >= 0");
              sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-12) {
              std::ostringstream os;
              os << "weights sum " << sum << " != 1 within 1e-12";
              add(ValidationCode::invalid_intensity, "jump_law.mark_sampler.weights", os.str());
            }
            if (!all_finite(s.atoms.data()))
              add(ValidationCode::invalid_intensity, "jump_law.mark_sampler.atoms",
                  "non-finite values");
          }
        },
        law.mark_sampler);
  }

  void check_field_spec() {
    const auto& fs = cfg_.field_spec;
    if (fs.state_dim != cfg_.state_dim)
      add(ValidationCode::invalid_field_spec, "field_spec.state_dim", "!= scenario state_dim");
    if (fs.basis.empty())
      add(ValidationCode::invalid_field_spec, "field_spec.basis", "at least one basis required");
    if (fs.drivers.size() != fs.basis.size()) {
      add(ValidationCode::invalid_field_spec, "field_spec.coefficients",
          "one coefficient driver per basis element required");
      return;
    }

    bool any_unbounded = false;
    for (std::size_t p = 0; p < fs.basis.size(); ++p) {
      const std::string where = "field_spec.basis[" + std::to_string(p) + "]";
      std::visit(
          [&](const auto& b) {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, PolynomialBasis>) {
              if (b.exponents.size() != cfg_.state_dim)
                add(ValidationCode::invalid_field_spec, where, "exponent count != state_dim");
            } else if constexpr (std::is_same_v<B, GaussianBumpBasis>) {
              if (b.center.size() != cfg_.state_dim)
                add(ValidationCode::invalid_field_spec, where, "center length != state_dim");
              if (!(b.width > 0.0) || !std::isfinite(b.width))
                add(ValidationCode::invalid_field_spec, where, "width must be positive");
              if (!all_finite(b.center))
                add(ValidationCode::invalid_field_spec, where, "non-finite center");
            } else {
              if (b.frequency.size() != cfg_.state_dim)
                add(ValidationCode::invalid_field_spec, where, "frequency length != state_dim");
              if (!all_finite(b.frequency) || !std::isfinite(b.phase))
                add(ValidationCode::invalid_field_spec, where, "non-finite parameters");
            }
          },
          fs.basis[p]);
      if (!basis_is_bounded(fs.basis[p])) any_unbounded = true;

      const auto& drv = fs.drivers[p];
      const std::string dwhere = "field_spec.coefficients[" + std::to_string(p) + "]";
      if (!std::isfinite(drv.initial))
        add(ValidationCode::invalid_field_spec, dwhere + ".initial", "non-finite");
      if (check_schedule_shape(drv.drift, dwhere + ".drift")) {
        for (double v : drv.drift.pieces())
          if (!std::isfinite(v))
            add(ValidationCode::invalid_field_spec, dwhere + ".drift", "non-finite values");
      }
      if (check_schedule_shape(drv.diffusion, dwhere + ".diffusion")) {
        for (const Vec& piece : drv.diffusion.pieces()) {
          if (piece.size() != cfg_.wiener_dim)
            add(ValidationCode::invalid_field_spec, dwhere + ".diffusion",
                "piece width != wiener_dim");
          else if (!all_finite(piece))
            add(ValidationCode::invalid_field_spec, dwhere + ".diffusion", "non-finite values");
        }
      }
      if (drv.jump) check_jump_map(*drv.jump, 1, dwhere + ".jump");
    }

    if (fs.state_box) {
      if (fs.state_box->lo.size() != cfg_.state_dim ||
          fs.state_box->hi.size() != cfg_.state_dim)
        add(ValidationCode::invalid_field_spec, "field_spec.state_box",
            "box dimensions != state_dim");
      else
        for (std::size_t d = 0; d < cfg_.state_dim; ++d)
          if (!(fs.state_box->lo[d] < fs.state_box->hi[d]))
            add(ValidationCode::invalid_field_spec, "field_spec.state_box",
                "box bounds must be ordered");
    } else if (any_unbounded) {
      add(ValidationCode::invalid_field_spec, "field_spec.state_box",
          "required when the basis contains unbounded (polynomial) elements");
    }
  }

  const ScenarioConfig& cfg_;
  std::vector<ValidationIssue> issues_;
};

}  // namespace

std::vector<ValidationIssue> validate_scenario(const ScenarioConfig& cfg) {
  return Checker(cfg).run();
}

void ensure_valid(const ScenarioConfig& cfg) {
  auto issues = validate_scenario(cfg);
  if (issues.empty()) return;
  std::string what = "invalid scenario:";
  for (const auto& issue : issues) what += "\n  " + issue.str();
  throw ConfigError(what);
}

}  // namespace itw
