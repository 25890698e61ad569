#pragma once

#include <limits>

namespace arf {

// Standard normal primitives. cdf/quantile are accurate to well below 1e-10
// absolute error; quantile uses a rational approximation refined by one
// Newton step against the erfc-based cdf.
double normal_pdf(double x);
double normal_cdf(double x);
double normal_cdf_upper(double x);  // 1 - cdf(x), accurate in the right tail
double normal_quantile(double p);   // p in (0,1)

// P(a < Z < b) for standard normal Z, computed tail-aware so narrow windows
// far from zero keep relative accuracy. Infinite endpoints allowed.
double normal_interval_prob(double a, double b);

// Normal distribution restricted and renormalized to [lower, upper].
// Infinite bounds allowed.
struct TruncNormParams {
  double mean = 0.0;
  double sd = 1.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool operator==(const TruncNormParams&) const = default;
};

// All throw Error on invalid parameters (sd <= 0, lower >= upper) or when the
// truncation window's normal mass underflows to zero.
double truncnorm_pdf(const TruncNormParams& params, double x);
double truncnorm_logpdf(const TruncNormParams& params, double x);  // -inf outside support
double truncnorm_cdf(const TruncNormParams& params, double x);
// u in (0,1); monotone in u, result clamped into [lower, upper].
double truncnorm_quantile(const TruncNormParams& params, double u);

}  // namespace arf
