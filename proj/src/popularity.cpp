#include "hetcache/popularity.hpp"

#include <algorithm>
#include <cmath>

namespace hetcache {

PopularityModel::PopularityModel(double skew, std::vector<double> pmf)
    : skew_(skew), pmf_(std::move(pmf)), cdf_(pmf_.size()) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    acc += pmf_[i];
    cdf_[i] = acc;
  }
  cdf_.back() = 1.0;
}

PopularityModel PopularityModel::zipf(int n_files, double skew) {
  if (n_files < 1) {
    throw DomainError("zipf: n_files must be >= 1");
  }
  if (!(skew >= 0.0) || !std::isfinite(skew)) {
    throw DomainError("zipf: skew must be finite and >= 0");
  }
  std::vector<double> weights(static_cast<std::size_t>(n_files));
  for (int f = 1; f <= n_files; ++f) {
    weights[static_cast<std::size_t>(f - 1)] = std::pow(static_cast<double>(f), -skew);
  }
  // Sum smallest-first to limit rounding in the normalizer.
  double norm = 0.0;
  for (auto it = weights.rbegin(); it != weights.rend(); ++it) {
    norm += *it;
  }
  for (double& w : weights) {
    w /= norm;
  }
  return PopularityModel(skew, std::move(weights));
}

Rank PopularityModel::sample(RngStream& rng) const {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = std::min<std::ptrdiff_t>(it - cdf_.begin(), n_files() - 1);
  return static_cast<Rank>(idx + 1);
}

}  // namespace hetcache
