#include "arf/truncnorm.hpp"

#include <algorithm>
#include <cmath>

#include "arf/error.hpp"

namespace arf {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kLogSqrt2Pi = 0.9189385332046727418;  // log(sqrt(2*pi))

// Acklam's rational approximation to the standard normal quantile,
// lower half only (p <= 0.5). Refined by one Newton step in the caller.
double quantile_lower_approx(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Solves cdf(x) = p for p in (0, 0.5]; cdf(x) in the left tail is
// relatively accurate via erfc, so the Newton step is well conditioned.
double quantile_lower(double p) {
  double x = quantile_lower_approx(p);
  const double err = normal_cdf(x) - p;
  const double pdf = normal_pdf(x);
  if (pdf > 0.0) x -= err / pdf;
  return x;
}

double clamp_unit_open(double p) {
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  return std::clamp(p, lo, hi);
}

void validate(const TruncNormParams& params) {
  if (!(params.sd > 0.0)) throw Error("truncated normal: sd must be positive");
  if (!(params.lower < params.upper))
    throw Error("truncated normal: lower bound must be below upper bound");
}

// Normal mass of the standardized window; throws when it underflows to zero.
double window_mass(double a, double b) {
  const double z = normal_interval_prob(a, b);
  if (!(z > 0.0)) throw Error("truncated normal: degenerate truncation window");
  return z;
}

}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_cdf_upper(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("normal_quantile: p must lie in (0,1)");
  if (p <= 0.5) return quantile_lower(p);
  return -quantile_lower(1.0 - p);
}

double normal_interval_prob(double a, double b) {
  // Right-tail windows go through the complement so the difference of two
  // small numbers keeps relative accuracy; left-tail and straddling windows
  // are already accurate through the plain cdf.
  if (a > 0.0) return normal_cdf_upper(a) - normal_cdf_upper(b);
  return normal_cdf(b) - normal_cdf(a);
}

double truncnorm_pdf(const TruncNormParams& params, double x) {
  return std::exp(truncnorm_logpdf(params, x));
}

double truncnorm_logpdf(const TruncNormParams& params, double x) {
  validate(params);
  const double a = (params.lower - params.mean) / params.sd;
  const double b = (params.upper - params.mean) / params.sd;
  const double mass = window_mass(a, b);
  if (x < params.lower || x > params.upper)
    return -std::numeric_limits<double>::infinity();
  const double z = (x - params.mean) / params.sd;
  return -0.5 * z * z - kLogSqrt2Pi - std::log(params.sd) - std::log(mass);
}

double truncnorm_cdf(const TruncNormParams& params, double x) {
  validate(params);
  const double a = (params.lower - params.mean) / params.sd;
  const double b = (params.upper - params.mean) / params.sd;
  const double mass = window_mass(a, b);
  if (x <= params.lower) return 0.0;
  if (x >= params.upper) return 1.0;
  const double z = (x - params.mean) / params.sd;
  return std::clamp(normal_interval_prob(a, z) / mass, 0.0, 1.0);
}

double truncnorm_quantile(const TruncNormParams& params, double u) {
  validate(params);
  if (!(u > 0.0 && u < 1.0)) throw Error("truncnorm_quantile: u must lie in (0,1)");
  const double a = (params.lower - params.mean) / params.sd;
  const double b = (params.upper - params.mean) / params.sd;
  (void)window_mass(a, b);

  double z;
  if (a > 0.0) {
    // Window in the right tail: interpolate upper-tail probabilities, which
    // stay relatively accurate where plain cdf values would round to 1.
    const double ta = normal_cdf_upper(a);
    const double tb = normal_cdf_upper(b);
    const double t = clamp_unit_open(ta - u * (ta - tb));
    z = -normal_quantile(t);
  } else {
    const double pa = normal_cdf(a);
    const double pb = normal_cdf(b);
    const double p = clamp_unit_open(pa + u * (pb - pa));
    z = normal_quantile(p);
  }
  return std::clamp(params.mean + params.sd * z, params.lower, params.upper);
}

}  // namespace arf
