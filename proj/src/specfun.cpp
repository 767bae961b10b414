#include "hetcache/specfun.hpp"

#include <cmath>
#include <string>

#include "hetcache/common.hpp"

namespace hetcache::specfun {
namespace {

constexpr double kSeriesRelTol = 1e-16;
constexpr double kFamilyTol = 1e-12;

void check_family(const HypergeometricArgs& args) {
  if (!std::isfinite(args.z) || args.z > 0.0) {
    throw DomainError("hyp2f1: z must be finite and <= 0");
  }
  if (!(args.a < 0.0 && args.a > -1.0)) {
    throw DomainError("hyp2f1: a must lie in (-1, 0)");
  }
  if (std::abs(args.c - (args.a + 1.0)) > kFamilyTol) {
    throw DomainError("hyp2f1: c must equal a + 1");
  }
  if (args.b < 0.0 || args.b != std::floor(args.b)) {
    throw DomainError("hyp2f1: b must be a non-negative integer");
  }
}

// Leading term of the connection formula: Gamma(c) Gamma(b - a) /
// (Gamma(b) Gamma(c - a)) (-z)^-a with c - a == 1.
double inversion_leading(double a, double b, double c, double minus_z) {
  return std::exp(std::lgamma(c) + std::lgamma(b - a) - std::lgamma(b)) *
         std::pow(minus_z, -a);
}

// Correction of the connection formula:
// a / (a - b) (-z)^-b 2F1[b, b - a; b - a + 1; 1/z].
double inversion_correction(double a, double b, double z) {
  const double w = 1.0 / z;
  return a / (a - b) * std::pow(-z, -b) * detail::hyp2f1_series(b, b - a, b - a + 1.0, w);
}

}  // namespace

HypergeometricArgs HypergeometricArgs::for_pathloss(double alpha, int m, double z) {
  const double a = -2.0 / alpha;
  return {a, static_cast<double>(m), 1.0 + a, z};
}

double gamma(double x) {
  if (!(x > 0.0)) {
    throw DomainError("gamma: argument must be > 0, got " + std::to_string(x));
  }
  return std::tgamma(x);
}

namespace detail {

double hyp2f1_series(double a, double b, double c, double z) {
  if (!(std::abs(z) < 1.0)) {
    throw DomainError("hyp2f1_series: requires |z| < 1");
  }
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < kMaxTerms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
    if (std::abs(term) <= kSeriesRelTol * std::abs(sum)) {
      return sum;
    }
  }
  throw NumericalError("hyp2f1_series: no convergence after " + std::to_string(kMaxTerms) +
                       " terms at z = " + std::to_string(z));
}

double hyp2f1_pfaff(const HypergeometricArgs& args) {
  const double x = args.z / (args.z - 1.0);
  return std::pow(1.0 - args.z, -args.b) * hyp2f1_series(args.b, args.c - args.a, args.c, x);
}

double hyp2f1_inversion(const HypergeometricArgs& args) {
  if (!(args.z < -1.0)) {
    throw DomainError("hyp2f1_inversion: requires z < -1");
  }
  if (args.b == 0.0) {
    return 1.0;
  }
  return inversion_leading(args.a, args.b, args.c, -args.z) +
         inversion_correction(args.a, args.b, args.z);
}

}  // namespace detail

double hyp2f1(const HypergeometricArgs& args) {
  check_family(args);
  if (args.b == 0.0 || args.z == 0.0) {
    return 1.0;
  }
  if (args.z >= -0.5) {
    return detail::hyp2f1_series(args.a, args.b, args.c, args.z);
  }
  if (args.z >= -4.0) {
    return detail::hyp2f1_pfaff(args);
  }
  return detail::hyp2f1_inversion(args);
}

double hyp2f1_asymptotic_tail(double alpha, int m, double gamma0) {
  if (!(alpha > 2.0) || m < 1 || gamma0 < 0.0) {
    throw DomainError("hyp2f1_asymptotic_tail: requires alpha > 2, m >= 1, gamma0 >= 0");
  }
  const double delta = 2.0 / alpha;
  return gamma(1.0 - delta) * gamma(m + delta) / gamma(m) * std::pow(gamma0, delta);
}

double hyp2f1_excess_over_tail(double alpha, int m, double gamma0) {
  const auto args = HypergeometricArgs::for_pathloss(alpha, m, -gamma0);
  if (gamma0 > 4.0) {
    check_family(args);
    return inversion_correction(args.a, args.b, args.z);
  }
  return hyp2f1(args) - hyp2f1_asymptotic_tail(alpha, m, gamma0);
}

}  // namespace hetcache::specfun
