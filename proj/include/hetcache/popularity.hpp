#pragma once

#include <span>
#include <vector>

#include "hetcache/common.hpp"

namespace hetcache {

/// Zipf request distribution over a catalog of equal-size files.
class PopularityModel {
 public:
  /// p_f = f^-skew / sum_n n^-skew for ranks f = 1..n_files.
  /// Throws DomainError on n_files < 1 or skew < 0.
  static PopularityModel zipf(int n_files, double skew);

  int n_files() const noexcept { return static_cast<int>(pmf_.size()); }
  double skew() const noexcept { return skew_; }

  /// Request probabilities indexed by rank - 1.
  std::span<const double> pmf() const noexcept { return pmf_; }
  double p(Rank f) const { return pmf_.at(static_cast<std::size_t>(f - 1)); }

  /// Draws a rank with probability p(rank) by inverting the CDF.
  Rank sample(RngStream& rng) const;

 private:
  PopularityModel(double skew, std::vector<double> pmf);

  double skew_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

inline PopularityModel zipf_pmf(int n_files, double skew) {
  return PopularityModel::zipf(n_files, skew);
}

inline Rank sample_request(const PopularityModel& model, RngStream& rng) {
  return model.sample(rng);
}

}  // namespace hetcache
