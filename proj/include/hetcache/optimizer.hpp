#pragma once

#include <functional>
#include <limits>
#include <span>

#include "hetcache/analysis.hpp"
#include "hetcache/network.hpp"
#include "hetcache/popularity.hpp"

namespace hetcache {

/// maximize sum_f p_f q_f / (c_num + c_den q_f)
/// s.t. sum_f q_f <= n_cache, 0 <= q_f <= 1.
///
/// Every closed-form solver in this module reduces to this concave problem
/// with different (c_num, c_den).
struct WaterfillingProblem {
  double c_num;
  double c_den;
  const PopularityModel* popularity;
  int n_cache;

  double objective(std::span<const double> q) const;
  /// Marginal value d objective / d q_f.
  double marginal(Rank f, double q) const;
};

struct SolverReport {
  CachingPolicy policy;
  double multiplier = 0.0;  ///< Lagrange multiplier of the capacity constraint
  double objective = 0.0;   ///< value of the objective the solver maximized
  int iterations = 0;
  double residual = 0.0;    ///< |sum q - n_cache|
  /// Helper activity the objective was evaluated with (1 saturated,
  /// 0 sparse users, the activity bound for the lower-bound solver, the
  /// policy-dependent activity for the local solver). NaN when unused.
  double helper_activity = std::numeric_limits<double>::quiet_NaN();
};

/// Water-filling solution
///   q_f = [ sqrt(c_num) / (sqrt(nu) c_den) sqrt(p_f) - c_num / c_den ]_0^1
/// with nu found by bisection so that sum q = n_cache. The bisection fixes
/// the saturation pattern; the water level is then recomputed in closed
/// form from that pattern.
SolverReport solve_waterfilling(const WaterfillingProblem& problem);

/// All helpers active: c_num = C1 + C2, c_den = C3 + 1. Falls back to
/// caching the most popular files when C3 + 1 underflows.
SolverReport solve_saturated(const NetworkConfig& cfg, const PopularityModel& popularity);

/// Helpers almost never active: c_num = C1, c_den = 1.
SolverReport solve_sparse_users(const NetworkConfig& cfg, const PopularityModel& popularity);

/// Policy maximizing the helper activity probability: c_num = lambda12
/// (P12 B12)^(2/alpha), c_den = 1. `helper_activity` of the report is the
/// policy-independent activity bound.
SolverReport solve_active_prob_max(const NetworkConfig& cfg, const PopularityModel& popularity);

/// Maximizer of the offloading lower bound obtained by pinning the helper
/// activity at its upper bound pbar: c_num = C1 + pbar C2, c_den = pbar C3 + 1.
SolverReport solve_lower_bound(const NetworkConfig& cfg, const PopularityModel& popularity);

/// Same, with a caller-supplied activity bound.
SolverReport solve_lower_bound(const NetworkConfig& cfg, const PopularityModel& popularity,
                               double pbar);

struct LocalSolverOptions {
  int max_iterations = 100000;
  double tolerance = 1e-8;  ///< on || P(q + grad) - q ||_2
  /// Called with (iteration, iterate, objective) for every accepted iterate.
  std::function<void(int, std::span<const double>, double)> observer;
};

/// Projected-gradient ascent with Barzilai-Borwein steps and Armijo
/// backtracking on the exact offloading probability (policy-dependent
/// helper activity). Objective never decreases between iterates.
SolverReport solve_local(const NetworkConfig& cfg, const PopularityModel& popularity,
                         const CachingPolicy& init, const LocalSolverOptions& options = {});

/// solve_local started from solve_lower_bound and from popular caching; the
/// better of the two stationary points is returned.
SolverReport solve_local(const NetworkConfig& cfg, const PopularityModel& popularity);

/// Euclidean projection onto {0 <= q <= 1, sum q <= n_cache}.
std::vector<double> project_capped_box(std::span<const double> y, int n_cache);

CachingPolicy baseline_popular(const PopularityModel& popularity, int n_cache);
CachingPolicy baseline_uniform(const PopularityModel& popularity, int n_cache);

}  // namespace hetcache
