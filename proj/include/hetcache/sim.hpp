#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "hetcache/analysis.hpp"
#include "hetcache/common.hpp"
#include "hetcache/network.hpp"
#include "hetcache/placement.hpp"
#include "hetcache/popularity.hpp"

namespace hetcache {

struct Point {
  double x;
  double y;
};

struct SimConfig {
  NetworkConfig network;
  double window_radius = 2500.0;  ///< metres; typical user at the centre
  long long n_drops = 20000;
  std::optional<double> noise_dbm;  ///< thermal noise; none when empty
  std::uint64_t seed = 1;
  /// Also require the serving helper to pick the typical user among its
  /// associated users. Off by default; sensitivity analysis only.
  bool require_selection = false;
  unsigned threads = 0;  ///< 0 selects std::thread::hardware_concurrency()

  /// Checks the network and the edge-effect rules: every tier expects
  /// >= 30 points in the window and the radius is >= 10 mean association
  /// distances. Throws ConfigError.
  void validate() const;

  /// Mean distance to the nearest macro station scaled by the helper
  /// range extension (P2 B2 / (P1 B1))^(1/alpha) when that exceeds 1.
  double mean_association_distance() const;
};

/// Monte Carlo estimate of an event probability with a 95% normal
/// confidence half-width.
struct SimEstimate {
  double p_hat = 0.0;
  long long n_drops = 0;
  double half_width_95 = 0.0;

  static SimEstimate from_counts(long long hits, long long trials);
};

enum class Tier { macro = 1, helper = 2 };

struct Association {
  Tier tier;
  int index;        ///< station index within its tier
  double distance;  ///< metres
};

class SpatialGrid;

/// One snapshot of the three point processes inside the simulation disc.
/// Helpers carry a placement offset that selects their cached files.
class NetworkRealization {
 public:
  NetworkRealization(const NetworkConfig& cfg, double window_radius, std::vector<Point> macros,
                     std::vector<Point> helpers, std::vector<double> helper_offsets,
                     std::vector<Point> users, std::shared_ptr<const CacheLayout> layout);
  ~NetworkRealization();
  NetworkRealization(NetworkRealization&&) noexcept;
  NetworkRealization& operator=(NetworkRealization&&) noexcept;

  const NetworkConfig& config() const noexcept { return cfg_; }
  double window_radius() const noexcept { return window_radius_; }
  const std::vector<Point>& macros() const noexcept { return macros_; }
  const std::vector<Point>& helpers() const noexcept { return helpers_; }
  const std::vector<Point>& users() const noexcept { return users_; }
  const CacheLayout& layout() const noexcept { return *layout_; }

  bool helper_caches(int helper, Rank f) const {
    return layout_->contains(helper_offsets_[static_cast<std::size_t>(helper)], f);
  }
  CacheRealization helper_cache(int helper) const {
    return layout_->files(helper_offsets_[static_cast<std::size_t>(helper)]);
  }

  /// Strongest biased received power P_k B_k r^-alpha among all macro
  /// stations and the helpers caching `f`. Empty when no candidate exists.
  std::optional<Association> associate(Point at, Rank f) const;

  /// Association of the typical user at the origin.
  std::optional<Association> associate(Rank f) const { return associate(Point{0.0, 0.0}, f); }

 private:
  NetworkConfig cfg_;
  double window_radius_;
  std::vector<Point> macros_;
  std::vector<Point> helpers_;
  std::vector<double> helper_offsets_;
  std::vector<Point> users_;
  std::shared_ptr<const CacheLayout> layout_;
  std::unique_ptr<SpatialGrid> macro_grid_;
  std::unique_ptr<SpatialGrid> helper_grid_;
  double range_extension_sq_;  // (P2 B2 / (P1 B1))^(2/alpha)
};

/// Independent PPPs of macros, helpers and users on the disc, each helper
/// with its own placement substream.
NetworkRealization drop_network(const SimConfig& cfg, std::shared_ptr<const CacheLayout> layout,
                                RngStream& rng);

struct DropOptions {
  std::optional<Rank> typical_file;  ///< force the typical request
  bool require_selection = false;
  double noise_mw = 0.0;
  double inner_radius = 0.0;  ///< helpers within this radius enter the activity tally
};

struct DropRecord {
  Rank file = 0;
  std::optional<Association> serving;  ///< empty: no candidate, resample the drop
  bool offloaded = false;  ///< helper association and SINR > gamma0
  double sinr = 0.0;       ///< typical user's SINR when helper-served, else 0
  int inner_helpers = 0;
  int inner_active = 0;  ///< inner helpers with >= 1 non-typical user
};

/// Requests and associations for every user, helper idling, and the
/// typical user's SINR with Rayleigh serving fading and Gamma(M1, 1/M1)
/// macro interference.
DropRecord evaluate_drop(const NetworkRealization& net, const PopularityModel& popularity,
                         RngStream& rng, const DropOptions& options);

struct MonteCarloSummary {
  long long drops = 0;
  long long offloaded = 0;
  long long helper_associated = 0;
  long long inner_helpers = 0;
  long long inner_active = 0;

  SimEstimate offloading() const { return SimEstimate::from_counts(offloaded, drops); }
  SimEstimate helper_association() const {
    return SimEstimate::from_counts(helper_associated, drops);
  }
  /// Success frequency among helper-associated drops.
  SimEstimate conditional_success() const {
    return SimEstimate::from_counts(offloaded, helper_associated);
  }
  double active_fraction() const {
    return inner_helpers > 0 ? static_cast<double>(inner_active) / inner_helpers : 0.0;
  }

  MonteCarloSummary& operator+=(const MonteCarloSummary& other);
};

/// Runs cfg.n_drops independent drops. Drop i uses substream i of cfg.seed,
/// so results do not depend on the thread count.
MonteCarloSummary run_monte_carlo(const SimConfig& cfg, const CachingPolicy& policy,
                                  const PopularityModel& popularity,
                                  std::optional<Rank> typical_file = std::nullopt);

SimEstimate estimate_offloading(const SimConfig& cfg, const CachingPolicy& policy,
                                const PopularityModel& popularity);

}  // namespace hetcache
