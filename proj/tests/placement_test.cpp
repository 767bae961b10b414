#include <doctest.h>

#include <cmath>
#include <random>

#include "hetcache/placement.hpp"

using namespace hetcache;

TEST_SUITE("placement") {
  TEST_CASE("integral policy caches exactly the chosen files") {
    const CachingPolicy policy({1.0, 0.0, 1.0, 1.0, 0.0});
    auto rng = make_stream(1, 0);
    for (int i = 0; i < 100; ++i) {
      CHECK(realize(policy, 3, rng).files == std::vector<Rank>{1, 3, 4});
    }
  }

  TEST_CASE("cardinality and distinct files") {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto rng = make_stream(2, 0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> q(30);
      for (auto& x : q) x = u(gen);
      double total = 0.0;
      for (double x : q) total += x;
      for (auto& x : q) x *= 6.0 / total;
      for (auto& x : q) x = std::min(x, 1.0);
      const CachingPolicy policy(q);
      total = policy.total();
      for (int i = 0; i < 20; ++i) {
        const auto cache = realize(policy, 6, rng);
        CHECK(std::is_sorted(cache.files.begin(), cache.files.end()));
        CHECK(std::adjacent_find(cache.files.begin(), cache.files.end()) == cache.files.end());
        CHECK(cache.files.size() <= 6);
        CHECK(cache.files.size() >= static_cast<std::size_t>(std::floor(total + 1e-9)));
        CHECK(cache.files.size() <= static_cast<std::size_t>(std::ceil(total - 1e-9)));
      }
    }
  }

  TEST_CASE("layout membership agrees with the realized file list") {
    const CachingPolicy policy({0.9, 0.7, 0.5, 0.4, 0.3, 0.2, 0.0, 0.0, 0.0});
    const CacheLayout layout(policy, 3);
    for (double u = 0.0; u < 1.0; u += 0.0137) {
      const auto cache = layout.files(u);
      for (Rank f = 1; f <= 9; ++f) {
        CHECK(layout.contains(u, f) == cache.contains(f));
      }
    }
    CHECK(layout.cached_anywhere(6));
    CHECK_FALSE(layout.cached_anywhere(7));
  }

  TEST_CASE("inclusion frequencies match the policy") {
    const CachingPolicy policy({1.0, 0.8, 0.6, 0.35, 0.15, 0.1, 0.0});
    auto rng = make_stream(3, 0);
    constexpr int kDraws = 100000;
    std::vector<int> hits(8, 0);
    for (int i = 0; i < kDraws; ++i) {
      for (Rank f : realize(policy, 3, rng).files) ++hits[static_cast<std::size_t>(f)];
    }
    for (Rank f = 1; f <= 7; ++f) {
      const double q = policy.q(f);
      const double sigma = std::sqrt(q * (1.0 - q) / kDraws);
      CAPTURE(f);
      CHECK(std::abs(hits[static_cast<std::size_t>(f)] / double(kDraws) - q) <= 3.0 * sigma + 1e-12);
    }
  }

  TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(CacheLayout(CachingPolicy({0.5}), -1), DomainError);
    auto rng = make_stream(4, 0);
    CHECK(realize(CachingPolicy::zeros(4), 2, rng).files.empty());
  }
}
