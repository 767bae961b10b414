#pragma once

#include <span>
#include <vector>

#include "hetcache/analysis.hpp"
#include "hetcache/common.hpp"

namespace hetcache {

/// Files held by one helper, ascending rank.
struct CacheRealization {
  std::vector<Rank> files;

  bool contains(Rank f) const;
};

/// Interval construction for probabilistic placement: segments of length
/// q_f are laid end to end in rank order over [0, sum q); a helper with
/// offset u in [0, 1) caches the files whose half-open segments contain one
/// of the points u, u + 1, ..., u + n_cache - 1. Each file is then cached
/// with probability exactly q_f and no file twice.
///
/// The layout is shared by every helper of a network; a helper is fully
/// described by its offset, and membership is an O(1) query.
class CacheLayout {
 public:
  /// Throws DomainError if a q_f lies outside [0, 1] or n_cache < 0.
  CacheLayout(const CachingPolicy& policy, int n_cache);

  int n_files() const noexcept { return static_cast<int>(bounds_.size()) - 1; }
  int n_cache() const noexcept { return n_cache_; }

  /// Whether the helper with offset `u` caches file `f`.
  bool contains(double u, Rank f) const noexcept;

  /// Whether any helper can cache `f` (q_f > 0).
  bool cached_anywhere(Rank f) const noexcept {
    return bounds_[static_cast<std::size_t>(f)] > bounds_[static_cast<std::size_t>(f - 1)];
  }

  /// All files cached by the helper with offset `u`.
  CacheRealization files(double u) const;

 private:
  std::vector<double> bounds_;  // bounds_[f] = q_1 + ... + q_f, bounds_[0] = 0
  int n_cache_;
};

/// Draws one cache realization.
CacheRealization realize(const CachingPolicy& policy, int n_cache, RngStream& rng);

}  // namespace hetcache
