#pragma once

#include <cmath>
#include <limits>

#include "stancekit/error.hpp"

namespace stancekit {
namespace detail {

/// Continued fraction for the incomplete beta (modified Lentz). Converges in
/// a handful of iterations for x < (a+1)/(a+b+2), which the callers ensure.
inline double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 400;
  constexpr double kEps = 1e-16;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw ContractViolation("betacf: continued fraction did not converge");
}

inline double ln_beta_prefactor(double a, double b, double x) {
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
         b * std::log1p(-x);
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double ibeta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw ContractViolation("ibeta: a and b must be positive");
  if (x < 0 || x > 1) throw ContractViolation("ibeta: x must lie in [0, 1]");
  if (x == 0) return 0.0;
  if (x == 1) return 1.0;
  const double ln_bt = detail::ln_beta_prefactor(a, b, x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(ln_bt) * detail::betacf(a, b, x) / a;
  return 1.0 - std::exp(ln_bt) * detail::betacf(b, a, 1.0 - x) / b;
}

/// Natural log of I_x(a, b), usable far below the double underflow range.
inline double log_ibeta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw ContractViolation("log_ibeta: a and b must be positive");
  if (x < 0 || x > 1) throw ContractViolation("log_ibeta: x must lie in [0, 1]");
  if (x == 0) return -std::numeric_limits<double>::infinity();
  if (x == 1) return 0.0;
  const double ln_bt = detail::ln_beta_prefactor(a, b, x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return ln_bt + std::log(detail::betacf(a, b, x) / a);
  const double complement = std::exp(ln_bt) * detail::betacf(b, a, 1.0 - x) / b;
  return std::log1p(-complement);
}

struct TwoSidedP {
  double p = 1.0;        // clamped into (0, 1]; 0 only when |t| is infinite
  double log10_p = 0.0;  // exact even when p underflows
};

/// Two-sided tail probability of Student's t with `df` degrees of freedom:
/// p = I_x(df/2, 1/2) at x = df / (df + t^2).
inline TwoSidedP student_t_two_sided(double t, double df) {
  if (!(df > 0)) throw ContractViolation("student_t_two_sided: df must be positive");
  if (std::isinf(t)) return {0.0, -std::numeric_limits<double>::infinity()};
  const double x = df / (df + t * t);
  TwoSidedP out;
  out.p = ibeta(df / 2.0, 0.5, x);
  out.log10_p = log_ibeta(df / 2.0, 0.5, x) / std::log(10.0);
  if (out.p > 1.0) out.p = 1.0;
  return out;
}

}  // namespace stancekit
