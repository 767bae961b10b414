#include "hetcache/placement.hpp"

#include <algorithm>
#include <cmath>

namespace hetcache {

bool CacheRealization::contains(Rank f) const {
  return std::binary_search(files.begin(), files.end(), f);
}

CacheLayout::CacheLayout(const CachingPolicy& policy, int n_cache)
    : bounds_(static_cast<std::size_t>(policy.size()) + 1, 0.0), n_cache_(n_cache) {
  if (n_cache < 0) {
    throw DomainError("placement: n_cache must be >= 0");
  }
  const auto q = policy.values();
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 1.0 || q[i] < 0.0) {
      throw DomainError("placement: caching probabilities must lie in [0, 1]");
    }
    bounds_[i + 1] = bounds_[i] + q[i];
  }
}

bool CacheLayout::contains(double u, Rank f) const noexcept {
  const double lo = bounds_[static_cast<std::size_t>(f - 1)];
  const double hi = bounds_[static_cast<std::size_t>(f)];
  if (!(hi > lo)) {
    return false;
  }
  // First point u + i at or beyond lo. Correct the ceil for rounding so the
  // test agrees with the point-by-point walk in files().
  double i = std::max(0.0, std::ceil(lo - u));
  if (i >= 1.0 && u + (i - 1.0) >= lo) {
    i -= 1.0;
  } else if (u + i < lo) {
    i += 1.0;
  }
  const double point = u + i;
  return i < n_cache_ && point < hi && point < bounds_.back();
}

CacheRealization CacheLayout::files(double u) const {
  CacheRealization out;
  out.files.reserve(static_cast<std::size_t>(n_cache_));
  const double total = bounds_.back();
  for (int i = 0; i < n_cache_; ++i) {
    const double point = u + i;
    if (!(point < total)) {
      break;
    }
    const auto it = std::upper_bound(bounds_.begin(), bounds_.end(), point);
    out.files.push_back(static_cast<Rank>(it - bounds_.begin()));
  }
  return out;
}

CacheRealization realize(const CachingPolicy& policy, int n_cache, RngStream& rng) {
  return CacheLayout(policy, n_cache).files(uniform01(rng));
}

}  // namespace hetcache
