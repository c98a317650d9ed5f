#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace itw {

/// 99% two-sided normal quantile used by all pre-registered CI checks.
inline constexpr double kZ99 = 2.5758293035489004;

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares of y on x, with the usual slope standard error
/// sqrt(sum r^2 / (n-2) / sum (x - xbar)^2). With n == 2 the std_error is 0.
inline SlopeFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const double xb = mean(x);
  const double yb = mean(y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xb) * (x[i] - xb);
    sxy += (x[i] - xb) * (y[i] - yb);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = yb - fit.slope * xb;
  if (n > 2) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ss_res += r * r;
    }
    fit.std_error = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

}  // namespace itw
