#pragma once

namespace ludo {

// Standard-normal density, CDF and friends. The CDF is erfc-based and keeps
// full relative accuracy in both tails; the hazard ratios switch to a
// continued-fraction Mills evaluation where the direct quotient would
// underflow.

double norm_pdf(double x);

// Phi(x), accurate to ~1e-16 relative error for |x| <= 8 and down to the
// underflow limit (~x = -38.5) in the left tail.
double norm_cdf(double x);

// log(Phi(x)), stable for all finite x (asymptotic expansion past the erfc
// underflow point).
double log_norm_cdf(double x);

// Phi(hi) - Phi(lo) without cancellation; requires lo <= hi.
double norm_interval_prob(double lo, double hi);

// Inverse CDF. Valid for p in (0, 1); relative accuracy ~1e-14 across
// (1e-300, 1 - 1e-16).
double norm_quantile(double p);

// Hazard ratio phi(x) / (1 - Phi(x)).
double norm_hazard(double x);

// Reverse hazard phi(x) / Phi(x) == norm_hazard(-x).
double norm_reverse_hazard(double x);

// Clamp a probability into [1e-300, 1 - 1e-16] before taking logs.
double clamp_prob(double p);

}  // namespace ludo
