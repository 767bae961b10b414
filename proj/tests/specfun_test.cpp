#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "hetcache/common.hpp"
#include "hetcache/specfun.hpp"

using namespace hetcache;
using specfun::HypergeometricArgs;

namespace {

double f21(int m, double z) { return specfun::hyp2f1(HypergeometricArgs::for_pathloss(3.7, m, z)); }

void check_rel(double got, double want, double tol) {
  CAPTURE(got);
  CAPTURE(want);
  CHECK(std::abs(got - want) <= tol * std::abs(want));
}

// 50-digit reference values, alpha = 3.7.
struct Reference {
  double z;
  double m1, m2, m4;
};
constexpr Reference kReference[] = {
    {-0.1, 1.114148631153137289508, 1.224990643078666045508, 1.437460386819821218718},
    {-0.5, 1.516047494380669591474, 1.975172266117968469748, 2.765925045290199753289},
    {-0.9, 1.858065202556037672987, 2.577929750168120625668, 3.750071862237349796219},
    {-1.0, 1.936875287388675078409, 2.713564631923094039711, 3.9657700118700973953},
    {-3.0, 3.198186068150570730248, 4.791800159042771124977, 7.160865858102347654367},
    {-10.0, 5.976715822031971788163, 9.15823297399028577685, 13.7267733142499465851},
    {-1000.0, 71.63640959914498104221, 110.3582531657103756602, 165.4433317343942229707},
    {-1e6, 2997.459381863501328741, 4617.70769584377285779, 6922.626316851742920725},
    {-2.5e6, 4918.764320391412140982, 7577.555844711094465837, 11359.87614703827816327},
};

}  // namespace

TEST_SUITE("specfun") {
  TEST_CASE("gamma against reference values") {
    check_rel(specfun::gamma(0.1), 9.513507698668731836292, 1e-13);
    check_rel(specfun::gamma(0.5), 1.772453850905516027298, 1e-14);
    check_rel(specfun::gamma(1.0 - 2.0 / 3.7), 1.927493710752250810116, 1e-13);
    check_rel(specfun::gamma(1.0 + 2.0 / 3.7), 0.8882129356208965740905, 1e-13);
    check_rel(specfun::gamma(3.3), 2.683437381955768793596, 1e-13);
    check_rel(specfun::gamma(49.5), 8.667601843135272345284e+61, 1e-12);
  }

  TEST_CASE("gamma recurrence") {
    for (double x : {0.05, 0.3, 0.4594594594594595, 1.7, 4.2, 11.5}) {
      CAPTURE(x);
      check_rel(specfun::gamma(x + 1.0), x * specfun::gamma(x), 1e-13);
    }
  }

  TEST_CASE("gamma rejects non-positive arguments") {
    CHECK_THROWS_AS(specfun::gamma(0.0), DomainError);
    CHECK_THROWS_AS(specfun::gamma(-1.5), DomainError);
  }

  TEST_CASE("hyp2f1 against reference values") {
    for (const auto& r : kReference) {
      CAPTURE(r.z);
      check_rel(f21(1, r.z), r.m1, 1e-12);
      check_rel(f21(2, r.z), r.m2, 1e-12);
      check_rel(f21(4, r.z), r.m4, 1e-12);
    }
  }

  TEST_CASE("hyp2f1 at other path-loss exponents") {
    // 2F1[-1/2, 2; 1/2; -7], alpha = 4.
    check_rel(specfun::hyp2f1(HypergeometricArgs::for_pathloss(4.0, 2, -7.0)),
              6.23727334877184242974, 1e-12);
  }

  TEST_CASE("hyp2f1 at z = 0 is one") { CHECK(f21(3, 0.0) == 1.0); }

  TEST_CASE("routed evaluation agrees with a long brute-force series") {
    const auto args = HypergeometricArgs::for_pathloss(3.7, 4, -0.1);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < 1000000; ++k) {
      term *= (args.a + k) * (args.b + k) / ((args.c + k) * (k + 1.0)) * args.z;
      sum += term;
    }
    check_rel(specfun::hyp2f1(args), sum, 1e-14);
  }

  TEST_CASE("series and Pfaff routes on their overlap") {
    // The alternating series loses a few digits to cancellation as z -> -1;
    // the Pfaff route, used in production there, does not.
    struct Overlap {
      int m;
      double z, value;
    };
    constexpr Overlap kOverlap[] = {
        {4, -0.6, 3.034282295644946422719700965577241825226},
        {4, -0.75, 3.406695386911470730917765071937722930132},
        {4, -0.9, 3.750071862237349796219029346555597446769},
        {8, -0.6, 4.434201591470744534390463971484786243053},
        {8, -0.75, 5.000476895406362560673378577340267139728},
        {8, -0.9, 5.51751419574436354070212860905036587005},
    };
    for (const auto& r : kOverlap) {
      const auto args = HypergeometricArgs::for_pathloss(3.7, r.m, r.z);
      CAPTURE(r.m);
      CAPTURE(r.z);
      check_rel(specfun::detail::hyp2f1_pfaff(args), r.value, 1e-14);
      check_rel(specfun::detail::hyp2f1_series(args.a, args.b, args.c, r.z), r.value, 1e-12);
    }
  }

  TEST_CASE("Pfaff and inversion routes agree on their overlap") {
    for (int m : {1, 2, 4, 8}) {
      for (double z : {-1.5, -3.0, -4.0, -6.0}) {
        const auto args = HypergeometricArgs::for_pathloss(3.7, m, z);
        CAPTURE(m);
        CAPTURE(z);
        check_rel(specfun::detail::hyp2f1_inversion(args), specfun::detail::hyp2f1_pfaff(args),
                  1e-12);
      }
    }
  }

  TEST_CASE("continuous across routing boundaries") {
    for (int m : {1, 4}) {
      for (double edge : {-0.5, -4.0}) {
        const double below = f21(m, std::nextafter(edge, -1e9));
        const double above = f21(m, std::nextafter(edge, 0.0));
        CAPTURE(m);
        CAPTURE(edge);
        check_rel(below, above, 1e-13);
      }
    }
  }

  TEST_CASE("at least one and increasing in |z| and in m") {
    double prev = 1.0;
    for (double z = 0.0; z >= -1e7; z = z == 0.0 ? -1e-3 : z * 1.7) {
      const double v1 = f21(1, z);
      CHECK(v1 >= 1.0);
      CHECK(v1 >= prev);
      CHECK(f21(2, z) >= v1);
      CHECK(f21(4, z) >= f21(2, z));
      prev = v1;
    }
  }

  TEST_CASE("asymptotic tail and excess") {
    check_rel(specfun::hyp2f1_asymptotic_tail(3.7, 1, 1.0), 1.71202484721807214782, 1e-13);
    check_rel(specfun::hyp2f1_asymptotic_tail(3.7, 1, 1e6), 2997.4593815126243485, 1e-13);
    check_rel(specfun::hyp2f1_excess_over_tail(3.7, 1, 1e6), 3.5087698021665136518e-7, 1e-8);
    for (double g : {0.1, 1.0, 10.0}) {
      CAPTURE(g);
      check_rel(specfun::hyp2f1_excess_over_tail(3.7, 1, g) + specfun::hyp2f1_asymptotic_tail(3.7, 1, g),
                f21(1, -g), 1e-13);
    }
  }

  TEST_CASE("arguments outside the family are rejected") {
    CHECK_THROWS_AS(specfun::hyp2f1({-0.5, 1.0, 0.5, 0.1}), DomainError);   // z > 0
    CHECK_THROWS_AS(specfun::hyp2f1({-0.5, 1.0, 0.7, -0.1}), DomainError);  // c != a + 1
    CHECK_THROWS_AS(specfun::hyp2f1({-1.5, 1.0, -0.5, -0.1}), DomainError); // a outside (-1, 0)
    CHECK_THROWS_AS(specfun::hyp2f1({-0.5, 1.5, 0.5, -0.1}), DomainError);  // b not integral
    CHECK_THROWS_AS(specfun::hyp2f1(HypergeometricArgs::for_pathloss(2.0, 1, -1.0)), DomainError);
  }
}
