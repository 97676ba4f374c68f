#include "ludo/normal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ludo {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176;

// Mills ratio m(x) = (1 - Phi(x)) / phi(x) via the Laplace continued
// fraction m(x) = 1/(x + 1/(x + 2/(x + 3/(...)))), evaluated backward.
// Converges to full double precision for x >= ~6.
double mills_ratio_cf(double x) {
  double f = 0.0;
  for (int k = 100; k >= 1; --k) {
    f = static_cast<double>(k) / (x + f);
  }
  return 1.0 / (x + f);
}
}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double clamp_prob(double p) {
  if (p < 1e-300) return 1e-300;
  if (p > 1.0 - 1e-16) return 1.0 - 1e-16;
  return p;
}

double log_norm_cdf(double x) {
  if (x >= -1.0) {
    // 1 - Phi(x) is computed without cancellation from erfc at a
    // positive-ish argument, so log1p keeps full precision here.
    return std::log1p(-0.5 * std::erfc(x * kInvSqrt2));
  }
  double w = 0.5 * std::erfc(-x * kInvSqrt2);
  if (w > 0.0) return std::log(w);
  // Past the erfc underflow point: log Phi(x) = -x^2/2 - log(-x sqrt(2 pi))
  // + log(1 - 1/x^2 + 3/x^4 - 15/x^6 + ...).
  const double ix2 = 1.0 / (x * x);
  const double series = 1.0 + ix2 * (-1.0 + ix2 * (3.0 + ix2 * (-15.0 + ix2 * 105.0)));
  return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

double norm_interval_prob(double lo, double hi) {
  if (!(lo <= hi)) throw std::domain_error("norm_interval_prob: lo > hi");
  // Pick the representation whose erfc arguments stay positive, so the
  // subtraction happens between well-scaled small numbers.
  if (lo + hi > 0.0) {
    return 0.5 * (std::erfc(lo * kInvSqrt2) - std::erfc(hi * kInvSqrt2));
  }
  return 0.5 * (std::erfc(-hi * kInvSqrt2) - std::erfc(-lo * kInvSqrt2));
}

double norm_hazard(double x) {
  if (x < 6.0) {
    double q = 0.5 * std::erfc(x * kInvSqrt2);
    if (q < 1e-300) q = 1e-300;
    return norm_pdf(x) / q;
  }
  return 1.0 / mills_ratio_cf(x);
}

double norm_reverse_hazard(double x) { return norm_hazard(-x); }

namespace {

// Acklam's rational starting approximation for Phi^{-1}.
double quantile_seed(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_quantile: p outside (0,1)");
  // Work in the lower tail; mirror at the end.
  const bool flip = p > 0.5;
  const double pl = flip ? 1.0 - p : p;
  double x = quantile_seed(pl);

  if (pl >= 1e-10) {
    // Two Halley steps against the erfc-based CDF.
    for (int it = 0; it < 2; ++it) {
      const double e = norm_cdf(x) - pl;
      const double u = e / norm_pdf(x);
      x -= u / (1.0 + 0.5 * x * u);
    }
  } else {
    // Deep tail: Newton in log space, g(x) = log Phi(x) - log pl,
    // g'(x) = phi/Phi (reverse hazard).
    const double lp = std::log(pl);
    for (int it = 0; it < 3; ++it) {
      x -= (log_norm_cdf(x) - lp) / norm_reverse_hazard(x);
    }
  }
  return flip ? -x : x;
}

}  // namespace ludo
