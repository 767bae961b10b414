#pragma once

namespace hetcache::specfun {

/// Arguments of 2F1[a, b; c; z] restricted to the family used by the
/// interference Laplace transforms: a = -2/alpha, b = M, c = 1 - 2/alpha,
/// z <= 0. Hence c == a + 1 always.
struct HypergeometricArgs {
  double a;
  double b;
  double c;
  double z;

  /// 2F1[-2/alpha, m; 1 - 2/alpha; z].
  static HypergeometricArgs for_pathloss(double alpha, int m, double z);
};

/// Gamma function for x > 0. Throws DomainError for x <= 0.
double gamma(double x);

/// Gauss hypergeometric function on the in-scope family.
///
/// Routing: defining series for |z| <= 0.5, Pfaff transform for
/// -4 <= z < -0.5, and the 1/z connection formula below -4. Because
/// c - a == 1 the connection formula has a closed-form leading term and a
/// single rapidly convergent correction series.
///
/// Throws DomainError when the arguments are outside the family and
/// NumericalError if a series fails to converge within the term cap.
double hyp2f1(const HypergeometricArgs& args);

/// Large-argument asymptote of 2F1[-2/alpha, m; 1 - 2/alpha; -gamma0]:
/// Gamma(1 - 2/alpha) Gamma(m + 2/alpha) / Gamma(m) * gamma0^(2/alpha).
double hyp2f1_asymptotic_tail(double alpha, int m, double gamma0);

/// 2F1[-2/alpha, m; 1 - 2/alpha; -gamma0] minus its asymptotic tail.
/// Evaluated without cancellation for large gamma0, where both terms are
/// large and the difference decays like 1/gamma0^m.
double hyp2f1_excess_over_tail(double alpha, int m, double gamma0);

namespace detail {

inline constexpr int kMaxTerms = 100000;

/// Defining power series; requires |z| < 1.
double hyp2f1_series(double a, double b, double c, double z);

/// Pfaff route: (1 - z)^-b 2F1[b, c - a; c; z / (z - 1)]; requires z < 1.
double hyp2f1_pfaff(const HypergeometricArgs& args);

/// 1/z connection formula specialised to c == a + 1; requires z < -1.
double hyp2f1_inversion(const HypergeometricArgs& args);

}  // namespace detail
}  // namespace hetcache::specfun
