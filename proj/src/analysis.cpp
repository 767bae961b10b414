#include "hetcache/analysis.hpp"

#include <cmath>
#include <numeric>

#include "hetcache/specfun.hpp"

namespace hetcache {
namespace {

constexpr double kLoadShape = 3.5;

void check_sizes(const CachingPolicy& policy, const PopularityModel& popularity) {
  if (policy.size() != popularity.n_files()) {
    throw DomainError("policy length does not match the catalog size");
  }
}

}  // namespace

CachingPolicy::CachingPolicy(std::vector<double> q) : q_(std::move(q)) {
  for (double v : q_) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw DomainError("caching probabilities must lie in [0, 1]");
    }
  }
}

double CachingPolicy::total() const { return std::accumulate(q_.begin(), q_.end(), 0.0); }

ClosedFormConstants constants(const NetworkConfig& cfg) {
  cfg.validate();
  const double m12 = static_cast<double>(cfg.m1) / NetworkConfig::kHelperAntennas;
  const double b12 = cfg.bias_ratio();

  const auto macro = specfun::HypergeometricArgs::for_pathloss(cfg.alpha, cfg.m1,
                                                               -cfg.gamma0 / (m12 * b12));
  const double c1 = cfg.macro_weight() * specfun::hyp2f1(macro);
  const double c2 = specfun::hyp2f1_asymptotic_tail(cfg.alpha, NetworkConfig::kHelperAntennas,
                                                    cfg.gamma0);
  const double c3 =
      specfun::hyp2f1_excess_over_tail(cfg.alpha, NetworkConfig::kHelperAntennas, cfg.gamma0) -
      1.0;
  return {c1, c2, c3};
}

OffloadingModel::OffloadingModel(const NetworkConfig& cfg, const PopularityModel& popularity)
    : cfg_(cfg),
      popularity_(&popularity),
      constants_(hetcache::constants(cfg)),
      macro_weight_(cfg.macro_weight()) {}

double OffloadingModel::association_mass(std::span<const double> q) const {
  const auto p = popularity_->pmf();
  double mass = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) {
      mass += p[i] * q[i] / (macro_weight_ + q[i]);
    }
  }
  return mass;
}

double OffloadingModel::active_prob(std::span<const double> q) const {
  const double load = cfg_.user_helper_ratio() * association_mass(q);
  return 1.0 - std::pow(1.0 + load / kLoadShape, -kLoadShape);
}

std::vector<double> OffloadingModel::active_prob_gradient(std::span<const double> q) const {
  const double ratio = cfg_.user_helper_ratio();
  const double load = ratio * association_mass(q);
  // d/dS [1 - (1 + r S / 3.5)^-3.5] = r (1 + r S / 3.5)^-4.5
  const double outer = ratio * std::pow(1.0 + load / kLoadShape, -kLoadShape - 1.0);
  const auto p = popularity_->pmf();
  std::vector<double> grad(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double d = macro_weight_ + q[i];
    grad[i] = outer * p[i] * macro_weight_ / (d * d);
  }
  return grad;
}

double OffloadingModel::offloading(std::span<const double> q, double pa) const {
  const auto p = popularity_->pmf();
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) {
      total += p[i] * q[i] / denominator(q[i], pa);
    }
  }
  return total;
}

double OffloadingModel::offloading_with_gradient(std::span<const double> q,
                                                 std::span<double> grad) const {
  const auto p = popularity_->pmf();
  const double pa = active_prob(q);
  const auto& k = constants_;
  const double numer_const = k.c1 + k.c2 * pa;

  double value = 0.0;
  double d_value_d_pa = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double d = denominator(q[i], pa);
    const double d2 = d * d;
    value += p[i] * q[i] / d;
    d_value_d_pa -= p[i] * q[i] * (k.c2 + k.c3 * q[i]) / d2;
    grad[i] = p[i] * numer_const / d2;
  }
  const auto dpa = active_prob_gradient(q);
  for (std::size_t i = 0; i < q.size(); ++i) {
    grad[i] += d_value_d_pa * dpa[i];
  }
  return value;
}

double OffloadingModel::conditional_success(double q, double pa) const {
  return (macro_weight_ + q) / denominator(q, pa);
}

double association_prob(const NetworkConfig& cfg, const CachingPolicy& policy, Rank f) {
  const double q = policy.q(f);
  return q / (cfg.macro_weight() + q);
}

double helper_active_prob(const NetworkConfig& cfg, const CachingPolicy& policy,
                          const PopularityModel& popularity) {
  check_sizes(policy, popularity);
  return OffloadingModel(cfg, popularity).active_prob(policy.values());
}

double offloading_prob(const NetworkConfig& cfg, const CachingPolicy& policy,
                       const PopularityModel& popularity) {
  check_sizes(policy, popularity);
  return OffloadingModel(cfg, popularity).offloading(policy.values());
}

double offloading_prob_saturated(const NetworkConfig& cfg, const CachingPolicy& policy,
                                 const PopularityModel& popularity) {
  check_sizes(policy, popularity);
  return OffloadingModel(cfg, popularity).offloading(policy.values(), 1.0);
}

double offloading_prob_lower_bound(const NetworkConfig& cfg, const CachingPolicy& policy,
                                   const PopularityModel& popularity, double pbar) {
  if (!(pbar >= 0.0 && pbar <= 1.0)) {
    throw DomainError("offloading_prob_lower_bound: pbar must lie in [0, 1]");
  }
  check_sizes(policy, popularity);
  return OffloadingModel(cfg, popularity).offloading(policy.values(), pbar);
}

double conditional_success_prob(const NetworkConfig& cfg, const CachingPolicy& policy,
                                const PopularityModel& popularity, Rank f) {
  check_sizes(policy, popularity);
  const OffloadingModel model(cfg, popularity);
  return model.conditional_success(policy.q(f), model.active_prob(policy.values()));
}

}  // namespace hetcache
