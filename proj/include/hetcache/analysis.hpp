#pragma once

#include <span>
#include <vector>

#include "hetcache/common.hpp"
#include "hetcache/network.hpp"
#include "hetcache/popularity.hpp"

namespace hetcache {

/// Per-file helper caching probabilities q_f, indexed by rank - 1.
class CachingPolicy {
 public:
  /// Throws DomainError unless every entry is finite and within [0, 1].
  explicit CachingPolicy(std::vector<double> q);

  static CachingPolicy zeros(int n_files) {
    return CachingPolicy(std::vector<double>(static_cast<std::size_t>(n_files), 0.0));
  }

  int size() const noexcept { return static_cast<int>(q_.size()); }
  double q(Rank f) const { return q_.at(static_cast<std::size_t>(f - 1)); }
  std::span<const double> values() const noexcept { return q_; }
  double total() const;

  /// Cache-capacity constraint: sum q <= n_cache + tol.
  bool feasible(int n_cache, double tol = 1e-9) const { return total() <= n_cache + tol; }

 private:
  std::vector<double> q_;
};

/// Constants of the closed-form offloading probability.
struct ClosedFormConstants {
  double c1;  ///< macro interference and association term, >= 0
  double c2;  ///< interference from helpers not caching the file, >= 0
  double c3;  ///< correction for helpers caching the file, in [-1, 0]
};

/// C1 = lambda12 (P12 B12)^(2/a) 2F1[-2/a, M1; 1-2/a; -gamma0/(M1 B12)],
/// C2 = Gamma(1-2/a) Gamma(1+2/a) gamma0^(2/a),
/// C3 = 2F1[-2/a, 1; 1-2/a; -gamma0] - C2 - 1.
ClosedFormConstants constants(const NetworkConfig& cfg);

/// Closed-form evaluator bound to one network and popularity model.
/// Constants are computed once at construction.
class OffloadingModel {
 public:
  OffloadingModel(const NetworkConfig& cfg, const PopularityModel& popularity);

  const NetworkConfig& config() const noexcept { return cfg_; }
  const PopularityModel& popularity() const noexcept { return *popularity_; }
  const ClosedFormConstants& constants() const noexcept { return constants_; }
  double macro_weight() const noexcept { return macro_weight_; }

  /// Probability of helper association for a file cached with probability q.
  double association_prob(double q) const { return q / (macro_weight_ + q); }

  /// Helper-tier association mass: sum_f p_f q_f / (lambda12 (P12 B12)^(2/a) + q_f).
  double association_mass(std::span<const double> q) const;

  /// Probability that a randomly chosen helper has a user to serve.
  double active_prob(std::span<const double> q) const;

  /// d active_prob / d q_f for every file.
  std::vector<double> active_prob_gradient(std::span<const double> q) const;

  /// Offloading probability with the helper activity pinned at `pa`.
  double offloading(std::span<const double> q, double pa) const;

  /// Offloading probability with the policy-dependent activity.
  double offloading(std::span<const double> q) const { return offloading(q, active_prob(q)); }

  /// Offloading probability and its gradient w.r.t. q (policy-dependent
  /// activity included through the chain rule).
  double offloading_with_gradient(std::span<const double> q, std::span<double> grad) const;

  /// P(SINR > gamma0 | file f requested, helper association) given activity.
  double conditional_success(double q, double pa) const;

 private:
  double denominator(double q, double pa) const {
    return constants_.c1 + constants_.c2 * pa + (constants_.c3 * pa + 1.0) * q;
  }

  NetworkConfig cfg_;
  const PopularityModel* popularity_;
  ClosedFormConstants constants_;
  double macro_weight_;
};

double association_prob(const NetworkConfig& cfg, const CachingPolicy& policy, Rank f);

double helper_active_prob(const NetworkConfig& cfg, const CachingPolicy& policy,
                          const PopularityModel& popularity);

double offloading_prob(const NetworkConfig& cfg, const CachingPolicy& policy,
                       const PopularityModel& popularity);

/// All helpers active (user density much larger than helper density).
double offloading_prob_saturated(const NetworkConfig& cfg, const CachingPolicy& policy,
                                 const PopularityModel& popularity);

/// Offloading probability with activity fixed at the policy-independent
/// upper bound `pbar`; a lower bound of offloading_prob when pbar bounds
/// the true activity.
double offloading_prob_lower_bound(const NetworkConfig& cfg, const CachingPolicy& policy,
                                   const PopularityModel& popularity, double pbar);

double conditional_success_prob(const NetworkConfig& cfg, const CachingPolicy& policy,
                                const PopularityModel& popularity, Rank f);

}  // namespace hetcache
