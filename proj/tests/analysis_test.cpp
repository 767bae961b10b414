#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hetcache/analysis.hpp"
#include "hetcache/optimizer.hpp"

using namespace hetcache;

namespace {

NetworkConfig fixture(double gamma0_db = -10.0) {
  auto cfg = NetworkConfig::default_fixture();
  cfg.gamma0 = db_to_linear(gamma0_db);
  return cfg;
}

// Feasible policy with a saturated head, a random middle and an empty tail.
CachingPolicy random_policy(int n_files, int n_cache, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> q(static_cast<std::size_t>(n_files));
  for (auto& x : q) {
    x = u(rng) < 0.3 ? 0.0 : u(rng);
  }
  double total = 0.0;
  for (double x : q) total += x;
  if (total > n_cache) {
    for (auto& x : q) x *= n_cache / total;
  }
  return CachingPolicy(std::move(q));
}

constexpr double kMacroWeight = 0.25874430646185300304;

struct ConstantsReference {
  double gamma0_db, c1, c2, c3;
};
constexpr ConstantsReference kConstants[] = {
    {-15.0, 0.34952782477426357851, 0.26466666967537360888, -0.22782697590810648468},
    {-10.0, 0.51681029481534840781, 0.4931391961638483843, -0.37899056501071109479},
    {-5.0, 0.90616242284530134622, 0.91883978852118470977, -0.57815151011747707446},
    {0.0, 1.6790680911088875443, 1.7120248472180721478, -0.77514955982939706941},
};

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("dB conversions") {
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(db_to_linear(-10.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(dbm_to_mw(46.0) == doctest::Approx(39810.717055349735).epsilon(1e-14));
    CHECK(linear_to_db(db_to_linear(-7.25)) == doctest::Approx(-7.25).epsilon(1e-14));
  }

  TEST_CASE("default fixture") {
    const auto cfg = NetworkConfig::default_fixture();
    CHECK(cfg.density_ratio() == doctest::Approx(1.0 / 25.0).epsilon(1e-15));
    CHECK(cfg.power_ratio() == doctest::Approx(std::pow(10.0, 2.5)).epsilon(1e-14));
    CHECK(cfg.bias_ratio() == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(cfg.user_helper_ratio() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cfg.macro_weight() == doctest::Approx(kMacroWeight).epsilon(1e-14));
    CHECK(cfg.n_cache == 100);
    CHECK_NOTHROW(cfg.validate());
  }

  TEST_CASE("validation names the offending field") {
    const auto expect_field = [](NetworkConfig cfg, const char* field) {
      try {
        cfg.validate();
        FAIL("accepted invalid ", field);
      } catch (const ConfigError& e) {
        CHECK(e.field() == field);
      }
    };
    auto cfg = NetworkConfig::default_fixture();
    cfg.lambda2 = 0.0;
    expect_field(cfg, "lambda2");
    cfg = NetworkConfig::default_fixture();
    cfg.alpha = 2.0;
    expect_field(cfg, "alpha");
    cfg = NetworkConfig::default_fixture();
    cfg.m1 = 0;
    expect_field(cfg, "m1");
    cfg = NetworkConfig::default_fixture();
    cfg.n_cache = -1;
    expect_field(cfg, "n_cache");
    cfg = NetworkConfig::default_fixture();
    cfg.gamma0 = std::nan("");
    expect_field(cfg, "gamma0");
  }
}

TEST_SUITE("analysis") {
  TEST_CASE("constants against reference values") {
    for (const auto& r : kConstants) {
      CAPTURE(r.gamma0_db);
      const auto c = constants(fixture(r.gamma0_db));
      CHECK(c.c1 == doctest::Approx(r.c1).epsilon(1e-13));
      CHECK(c.c2 == doctest::Approx(r.c2).epsilon(1e-13));
      CHECK(c.c3 == doctest::Approx(r.c3).epsilon(1e-13));
    }
  }

  TEST_CASE("constants at a vanishing threshold") {
    auto cfg = fixture();
    cfg.gamma0 = 0.0;
    const auto c = constants(cfg);
    CHECK(c.c1 == doctest::Approx(kMacroWeight).epsilon(1e-14));
    CHECK(c.c2 == 0.0);
    CHECK(std::abs(c.c3) < 1e-15);
  }

  TEST_CASE("constant signs and C3 range over thresholds") {
    for (double db = -30.0; db <= 60.0; db += 2.5) {
      const auto c = constants(fixture(db));
      CAPTURE(db);
      CHECK(c.c1 >= 0.0);
      CHECK(c.c2 >= 0.0);
      CHECK(c.c3 <= 0.0);
      CHECK(c.c3 >= -1.0);
    }
  }

  TEST_CASE("association probability") {
    const auto cfg = fixture();
    const CachingPolicy policy({1.0, 0.5, 0.0});
    CHECK(association_prob(cfg, policy, 1) == doctest::Approx(1.0 / (kMacroWeight + 1.0)).epsilon(1e-14));
    CHECK(association_prob(cfg, policy, 2) == doctest::Approx(0.5 / (kMacroWeight + 0.5)).epsilon(1e-14));
    CHECK(association_prob(cfg, policy, 3) == 0.0);
    auto no_macro = cfg;
    no_macro.lambda1 = 1e-300;
    CHECK(association_prob(no_macro, policy, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("helper activity, uniform policy, direct summation") {
    const auto pop = zipf_pmf(1000, 0.5);
    const auto policy = baseline_uniform(pop, 100);
    CHECK(helper_active_prob(fixture(), policy, pop) ==
          doctest::Approx(0.235249856725425452259933072717).epsilon(1e-13));
    CHECK(offloading_prob(fixture(), policy, pop) ==
          doctest::Approx(0.13813958286848795811548225883).epsilon(1e-13));
  }

  TEST_CASE("helper activity limits and monotonicity") {
    const auto pop = zipf_pmf(200, 1.0);
    const auto policy = baseline_popular(pop, 20);
    auto cfg = fixture();
    CHECK(helper_active_prob(cfg, CachingPolicy::zeros(200), pop) == 0.0);
    double prev = 0.0;
    for (double ratio : {1e-3, 0.1, 1.0, 10.0, 100.0}) {
      cfg.lambda_u = ratio * cfg.lambda2;
      const double pa = helper_active_prob(cfg, policy, pop);
      CAPTURE(ratio);
      CHECK(pa > prev);
      CHECK(pa < 1.0);
      prev = pa;
    }
    // At extreme ratios the bound 1 is reached in double precision.
    cfg.lambda_u = 1e6 * cfg.lambda2;
    CHECK(helper_active_prob(cfg, policy, pop) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("two-file saturated sum by hand") {
    auto cfg = fixture();
    const auto pop = zipf_pmf(4, 1.0);
    const CachingPolicy policy({1.0, 1.0, 0.0, 0.0});
    CHECK(offloading_prob_saturated(cfg, policy, pop) ==
          doctest::Approx(0.441458082442176869162071807719).epsilon(1e-13));
  }

  TEST_CASE("zero policy offloads nothing") {
    const auto pop = zipf_pmf(50, 0.5);
    const auto zero = CachingPolicy::zeros(50);
    CHECK(offloading_prob(fixture(), zero, pop) == 0.0);
    CHECK(offloading_prob_saturated(fixture(), zero, pop) == 0.0);
    CHECK(offloading_prob_lower_bound(fixture(), zero, pop, 0.5) == 0.0);
  }

  TEST_CASE("single file, no macro, saturated helpers collapses to 1 / 2F1") {
    auto cfg = fixture(0.0);
    cfg.lambda1 = 1e-300;
    cfg.lambda_u = 1e12 * cfg.lambda2;
    const auto pop = zipf_pmf(1, 0.0);
    CHECK(offloading_prob(cfg, CachingPolicy({1.0}), pop) ==
          doctest::Approx(0.516295502612465727144096613775).epsilon(1e-12));
  }

  TEST_CASE("saturated form is the dense-user limit") {
    auto cfg = fixture();
    cfg.lambda_u = 1e6 * cfg.lambda2;
    const auto pop = zipf_pmf(1000, 0.5);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5; ++i) {
      const auto policy = random_policy(1000, 100, rng);
      CHECK(offloading_prob(cfg, policy, pop) ==
            doctest::Approx(offloading_prob_saturated(cfg, policy, pop)).epsilon(1e-6));
    }
  }

  TEST_CASE("lower bound collapses at its ends") {
    const auto cfg = fixture();
    const auto pop = zipf_pmf(30, 1.0);
    std::mt19937_64 rng(4);
    const auto policy = random_policy(30, 5, rng);
    CHECK(offloading_prob_lower_bound(cfg, policy, pop, 1.0) ==
          doctest::Approx(offloading_prob_saturated(cfg, policy, pop)).epsilon(1e-15));
    const double c1 = constants(cfg).c1;
    double direct = 0.0;
    for (Rank f = 1; f <= 30; ++f) {
      const double q = policy.q(f);
      direct += q > 0 ? pop.p(f) * q / (c1 + q) : 0.0;
    }
    CHECK(offloading_prob_lower_bound(cfg, policy, pop, 0.0) == doctest::Approx(direct).epsilon(1e-14));
    CHECK_THROWS_AS(offloading_prob_lower_bound(cfg, policy, pop, 1.5), DomainError);
  }

  TEST_CASE("lower bound never exceeds the exact value") {
    for (double skew : {0.5, 1.0}) {
      const auto cfg = fixture();
      const auto pop = zipf_pmf(1000, skew);
      const double pbar = solve_active_prob_max(cfg, pop).helper_activity;
      std::mt19937_64 rng(11);
      for (int i = 0; i < 100; ++i) {
        const auto policy = random_policy(1000, 100, rng);
        CHECK(offloading_prob_lower_bound(cfg, policy, pop, pbar) <=
              offloading_prob(cfg, policy, pop) + 1e-12);
      }
    }
  }

  TEST_CASE("total-probability decomposition") {
    const auto pop = zipf_pmf(300, 0.8);
    std::mt19937_64 rng(5);
    for (double db : {-15.0, -5.0, 5.0}) {
      const auto cfg = fixture(db);
      const auto policy = random_policy(300, 30, rng);
      double parts = 0.0;
      for (Rank f = 1; f <= 300; ++f) {
        const double success = conditional_success_prob(cfg, policy, pop, f);
        CHECK(success >= 0.0);
        CHECK(success <= 1.0);
        parts += pop.p(f) * association_prob(cfg, policy, f) * success;
      }
      CHECK(std::abs(parts - offloading_prob(cfg, policy, pop)) <= 1e-12);
    }
  }

  TEST_CASE("conditional success tends to one at a vanishing threshold") {
    auto cfg = fixture();
    cfg.gamma0 = 1e-12;
    const auto pop = zipf_pmf(10, 1.0);
    const auto policy = baseline_popular(pop, 3);
    CHECK(conditional_success_prob(cfg, policy, pop, 1) == doctest::Approx(1.0).epsilon(1e-5));
  }

  TEST_CASE("non-decreasing in every coordinate") {
    const auto pop = zipf_pmf(100, 0.7);
    std::mt19937_64 rng(6);
    for (double db : {-15.0, 0.0, 10.0}) {
      const auto cfg = fixture(db);
      for (int i = 0; i < 10; ++i) {
        const auto start = random_policy(100, 10, rng);
        auto q = std::vector<double>(start.values().begin(), start.values().end());
        const double base = offloading_prob(cfg, CachingPolicy(q), pop);
        for (std::size_t f = 0; f < q.size(); f += 7) {
          auto up = q;
          const double h = 1e-6;
          up[f] = std::min(1.0, up[f] + h);
          const double step = up[f] - q[f];
          if (step <= 0.0) continue;
          const double slope = (offloading_prob(cfg, CachingPolicy(up), pop) - base) / step;
          CHECK(slope >= -1e-9);
        }
      }
    }
  }

  TEST_CASE("analytic gradient matches central differences") {
    const auto pop = zipf_pmf(60, 0.9);
    const auto cfg = fixture(-5.0);
    const OffloadingModel model(cfg, pop);
    std::mt19937_64 rng(8);
    const auto start = random_policy(60, 6, rng);
    auto q = std::vector<double>(start.values().begin(), start.values().end());
    for (auto& x : q) x = std::clamp(x, 0.01, 0.99);
    std::vector<double> grad(q.size());
    model.offloading_with_gradient(q, grad);
    const auto pa_grad = model.active_prob_gradient(q);
    for (std::size_t f = 0; f < q.size(); ++f) {
      auto hi = q;
      auto lo = q;
      hi[f] += 1e-6;
      lo[f] -= 1e-6;
      CAPTURE(f);
      CHECK(grad[f] == doctest::Approx((model.offloading(hi) - model.offloading(lo)) / 2e-6).epsilon(1e-6));
      CHECK(pa_grad[f] ==
            doctest::Approx((model.active_prob(hi) - model.active_prob(lo)) / 2e-6).epsilon(1e-6));
    }
  }

  TEST_CASE("invariant under joint scaling of powers and densities") {
    const auto pop = zipf_pmf(500, 0.5);
    std::mt19937_64 rng(9);
    const auto policy = random_policy(500, 50, rng);
    const auto cfg = fixture();
    const double base = offloading_prob(cfg, policy, pop);
    for (double c : {0.5, 2.0, 10.0}) {
      auto power = cfg;
      power.p1 *= c;
      power.p2 *= c;
      auto density = cfg;
      density.lambda1 *= c;
      density.lambda2 *= c;
      density.lambda_u *= c;
      CHECK(std::abs(offloading_prob(power, policy, pop) - base) <= 1e-12);
      CHECK(std::abs(offloading_prob(density, policy, pop) - base) <= 1e-12);
    }
  }

  TEST_CASE("probabilities stay in the unit interval") {
    std::mt19937_64 rng(10);
    for (double skew : {0.0, 0.5, 1.5}) {
      const auto pop = zipf_pmf(200, skew);
      for (double db : {-30.0, -10.0, 0.0, 20.0}) {
        const auto cfg = fixture(db);
        const auto policy = random_policy(200, 20, rng);
        for (double v : {offloading_prob(cfg, policy, pop), offloading_prob_saturated(cfg, policy, pop),
                         helper_active_prob(cfg, policy, pop)}) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
      }
    }
  }

  TEST_CASE("policy validation") {
    CHECK_THROWS_AS(CachingPolicy({0.5, 1.2}), DomainError);
    CHECK_THROWS_AS(CachingPolicy({-0.1}), DomainError);
    CHECK(CachingPolicy({0.5, 0.5, 0.5}).feasible(2));
    CHECK_FALSE(CachingPolicy({1.0, 1.0, 0.5}).feasible(2));
  }
}
