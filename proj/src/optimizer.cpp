#include "hetcache/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hetcache {
namespace {

constexpr int kBisectionIterations = 200;
constexpr double kCapacityTol = 1e-9;
constexpr double kMinCoefficient = 1e-12;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// q_f(nu) for the whole catalog; returns the sum.
double fill(const WaterfillingProblem& pb, double nu, std::span<double> q) {
  const auto p = pb.popularity->pmf();
  const double scale = std::sqrt(pb.c_num / nu) / pb.c_den;
  const double offset = pb.c_num / pb.c_den;
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = clamp01(scale * std::sqrt(p[i]) - offset);
    sum += q[i];
  }
  return sum;
}

// Recomputes the interior coordinates from the saturation pattern of `q`.
// With R = sum_{interior} sqrt(p_g), n interior and N_1 saturated files the
// water level is scale = (N_c - N_1 + n * offset) / R, so
//   q_f = ((N_c - N_1) sqrt(p_f) + offset * sum_g (sqrt(p_f) - sqrt(p_g))) / R,
// which avoids cancelling two terms of size `offset` when c_den is tiny.
// Returns false (leaving q untouched) if the pattern has no interior
// coordinate or a recomputed value leaves [0, 1].
bool polish(const WaterfillingProblem& pb, std::vector<double>& q, double& nu) {
  const auto p = pb.popularity->pmf();
  const double offset = pb.c_num / pb.c_den;
  int saturated = 0;
  std::vector<std::size_t> interior;
  double root_sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] >= 1.0) {
      ++saturated;
    } else if (q[i] > 0.0) {
      interior.push_back(i);
      root_sum += std::sqrt(p[i]);
    }
  }
  if (interior.empty()) {
    return false;
  }
  const double free_capacity = pb.n_cache - saturated;
  std::vector<double> next = q;
  for (std::size_t i : interior) {
    const double root = std::sqrt(p[i]);
    double spread = 0.0;
    for (std::size_t g : interior) {
      spread += root - std::sqrt(p[g]);
    }
    const double v = (free_capacity * root + offset * spread) / root_sum;
    if (v < -1e-12 || v > 1.0 + 1e-12) {
      return false;
    }
    next[i] = clamp01(v);
  }
  q = std::move(next);
  const double scale = (free_capacity + static_cast<double>(interior.size()) * offset) / root_sum;
  nu = pb.c_num / (pb.c_den * pb.c_den * scale * scale);
  return true;
}

SolverReport make_report(const WaterfillingProblem& pb, std::vector<double> q, double nu,
                         int iterations) {
  const double total = std::accumulate(q.begin(), q.end(), 0.0);
  const double objective = pb.objective(q);
  return SolverReport{
      .policy = CachingPolicy(std::move(q)),
      .multiplier = nu,
      .objective = objective,
      .iterations = iterations,
      .residual = std::abs(total - std::min(pb.n_cache, pb.popularity->n_files())),
  };
}

}  // namespace

double WaterfillingProblem::objective(std::span<const double> q) const {
  const auto p = popularity->pmf();
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    total += p[i] * q[i] / (c_num + c_den * q[i]);
  }
  return total;
}

double WaterfillingProblem::marginal(Rank f, double q) const {
  const double d = c_num + c_den * q;
  return popularity->p(f) * c_num / (d * d);
}

SolverReport solve_waterfilling(const WaterfillingProblem& pb) {
  if (pb.popularity == nullptr) {
    throw DomainError("solve_waterfilling: missing popularity model");
  }
  if (!(pb.c_num > 0.0) || !(pb.c_den > 0.0) || !std::isfinite(pb.c_num) ||
      !std::isfinite(pb.c_den)) {
    throw DomainError("solve_waterfilling: c_num and c_den must be finite and > 0");
  }
  if (pb.n_cache < 0) {
    throw DomainError("solve_waterfilling: n_cache must be >= 0");
  }
  const auto p = pb.popularity->pmf();
  const int n_files = pb.popularity->n_files();
  const double p_max = *std::max_element(p.begin(), p.end());
  const double p_min = *std::min_element(p.begin(), p.end());

  // Multiplier at which every coordinate just reaches 0 (resp. 1).
  const double nu_all_zero = p_max / pb.c_num;
  const double nu_all_one = p_min * pb.c_num / ((pb.c_num + pb.c_den) * (pb.c_num + pb.c_den));

  if (pb.n_cache == 0) {
    return make_report(pb, std::vector<double>(p.size(), 0.0), nu_all_zero, 0);
  }
  if (pb.n_cache >= n_files) {
    return make_report(pb, std::vector<double>(p.size(), 1.0), nu_all_one, 0);
  }

  // Sum q(nu) is continuous and non-increasing; bisect on log(nu).
  std::vector<double> q(p.size());
  double lo = std::log(nu_all_one);   // sum >= N_c
  double hi = std::log(nu_all_zero);  // sum <= N_c
  double nu = std::exp(0.5 * (lo + hi));
  int iterations = 0;
  for (; iterations < kBisectionIterations; ++iterations) {
    const double mid = 0.5 * (lo + hi);
    nu = std::exp(mid);
    const double gap = fill(pb, nu, q) - pb.n_cache;
    if (std::abs(gap) <= kCapacityTol) {
      break;
    }
    if (gap > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 0.0) {
      break;
    }
  }
  polish(pb, q, nu);

  const double total = std::accumulate(q.begin(), q.end(), 0.0);
  if (!(std::abs(total - pb.n_cache) <= kCapacityTol)) {
    // The sum is monotone in nu and the bracket spans [0, N_f]; landing
    // here means the arithmetic broke down.
    throw NumericalError("solve_waterfilling: capacity residual " +
                         std::to_string(total - pb.n_cache) + " after bisection");
  }
  return make_report(pb, std::move(q), nu, iterations);
}

SolverReport solve_saturated(const NetworkConfig& cfg, const PopularityModel& popularity) {
  const auto k = constants(cfg);
  const double c_num = k.c1 + k.c2;
  const double c_den = k.c3 + 1.0;
  if (c_den <= kMinCoefficient) {
    // Threshold so high that the objective is linear in q: cache the most
    // popular files.
    const WaterfillingProblem pb{c_num, kMinCoefficient, &popularity, cfg.n_cache};
    auto policy = baseline_popular(popularity, cfg.n_cache);
    const double objective = pb.objective(policy.values());
    return SolverReport{.policy = std::move(policy),
                        .multiplier = 0.0,
                        .objective = objective,
                        .iterations = 0,
                        .residual = 0.0,
                        .helper_activity = 1.0};
  }
  auto report = solve_waterfilling({c_num, c_den, &popularity, cfg.n_cache});
  report.helper_activity = 1.0;
  return report;
}

SolverReport solve_sparse_users(const NetworkConfig& cfg, const PopularityModel& popularity) {
  const auto k = constants(cfg);
  auto report = solve_waterfilling({k.c1, 1.0, &popularity, cfg.n_cache});
  report.helper_activity = 0.0;
  return report;
}

SolverReport solve_active_prob_max(const NetworkConfig& cfg, const PopularityModel& popularity) {
  cfg.validate();
  auto report = solve_waterfilling({cfg.macro_weight(), 1.0, &popularity, cfg.n_cache});
  report.helper_activity =
      OffloadingModel(cfg, popularity).active_prob(report.policy.values());
  return report;
}

SolverReport solve_lower_bound(const NetworkConfig& cfg, const PopularityModel& popularity,
                               double pbar) {
  if (!(pbar >= 0.0 && pbar <= 1.0)) {
    throw DomainError("solve_lower_bound: activity bound must lie in [0, 1]");
  }
  const auto k = constants(cfg);
  const double c_num = k.c1 + pbar * k.c2;
  const double c_den = std::max(pbar * k.c3 + 1.0, kMinCoefficient);
  auto report = solve_waterfilling({c_num, c_den, &popularity, cfg.n_cache});
  report.helper_activity = pbar;
  return report;
}

SolverReport solve_lower_bound(const NetworkConfig& cfg, const PopularityModel& popularity) {
  const double pbar = solve_active_prob_max(cfg, popularity).helper_activity;
  return solve_lower_bound(cfg, popularity, pbar);
}

std::vector<double> project_capped_box(std::span<const double> y, int n_cache) {
  std::vector<double> z(y.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    z[i] = clamp01(y[i]);
    sum += z[i];
  }
  if (sum <= n_cache) {
    return z;
  }
  // Find the shift tau > 0 with sum clamp(y - tau) = n_cache.
  double lo = 0.0;
  double hi = *std::max_element(y.begin(), y.end());
  for (int it = 0; it < 100 && hi - lo > 0.0; ++it) {
    const double tau = 0.5 * (lo + hi);
    double s = 0.0;
    for (double v : y) {
      s += clamp01(v - tau);
    }
    (s > n_cache ? lo : hi) = tau;
  }
  // Exact shift from the active pattern at the upper end.
  int saturated = 0;
  int interior = 0;
  double interior_sum = 0.0;
  for (double v : y) {
    const double shifted = v - hi;
    if (shifted >= 1.0) {
      ++saturated;
    } else if (shifted > 0.0) {
      ++interior;
      interior_sum += v;
    }
  }
  double tau = hi;
  if (interior > 0) {
    const double exact = (interior_sum - (n_cache - saturated)) / interior;
    if (exact >= lo && exact <= hi) {
      tau = exact;
    }
  }
  sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    z[i] = clamp01(y[i] - tau);
    sum += z[i];
  }
  if (sum > n_cache) {
    // Rounding in the exact shift; fall back to the feasible bracket end.
    for (std::size_t i = 0; i < y.size(); ++i) {
      z[i] = clamp01(y[i] - hi);
    }
  }
  return z;
}

SolverReport solve_local(const NetworkConfig& cfg, const PopularityModel& popularity,
                         const CachingPolicy& init, const LocalSolverOptions& options) {
  if (init.size() != popularity.n_files()) {
    throw DomainError("solve_local: initial policy length does not match the catalog");
  }
  if (!init.feasible(cfg.n_cache)) {
    throw DomainError("solve_local: initial policy violates the cache capacity");
  }
  const OffloadingModel model(cfg, popularity);
  const std::size_t n = init.values().size();

  std::vector<double> q(init.values().begin(), init.values().end());
  std::vector<double> grad(n);
  double value = model.offloading_with_gradient(q, grad);

  auto dot = [](std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  };

  const double g_max = std::abs(*std::max_element(
      grad.begin(), grad.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }));
  double step = g_max > 0.0 ? 1.0 / g_max : 1.0;

  std::vector<double> y(n);
  std::vector<double> grad_next(n);
  std::vector<double> s(n);
  std::vector<double> dg(n);
  int iteration = 0;
  if (options.observer) {
    options.observer(0, q, value);
  }
  for (; iteration < options.max_iterations; ++iteration) {
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = q[i] + grad[i];
    }
    const auto unit = project_capped_box(y, cfg.n_cache);
    double pg_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pg_norm += (unit[i] - q[i]) * (unit[i] - q[i]);
    }
    if (std::sqrt(pg_norm) < options.tolerance) {
      break;
    }

    bool accepted = false;
    std::vector<double> candidate;
    double candidate_value = value;
    for (double t = step; t > 1e-30; t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = q[i] + t * grad[i];
      }
      candidate = project_capped_box(y, cfg.n_cache);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = candidate[i] - q[i];
      }
      candidate_value = model.offloading_with_gradient(candidate, grad_next);
      if (candidate_value >= value + 1e-4 * dot(grad, s) && candidate_value >= value) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      break;  // no ascent possible at machine precision
    }

    for (std::size_t i = 0; i < n; ++i) {
      dg[i] = grad_next[i] - grad[i];
    }
    const double ss = dot(s, s);
    const double sy = dot(s, dg);
    step = (sy < 0.0 && ss > 0.0) ? std::clamp(-ss / sy, 1e-12, 1e12) : 2.0 * step;

    q = std::move(candidate);
    grad.swap(grad_next);
    value = candidate_value;
    if (options.observer) {
      options.observer(iteration + 1, q, value);
    }
  }

  const double total = std::accumulate(q.begin(), q.end(), 0.0);
  const double pa = model.active_prob(q);
  return SolverReport{
      .policy = CachingPolicy(std::move(q)),
      .multiplier = 0.0,
      .objective = value,
      .iterations = iteration,
      .residual = std::abs(total - std::min(cfg.n_cache, popularity.n_files())),
      .helper_activity = pa,
  };
}

SolverReport solve_local(const NetworkConfig& cfg, const PopularityModel& popularity) {
  // The exact objective is not concave; popular caching can be a better
  // stationary point than the lower-bound optimum at high thresholds.
  const auto warm = solve_lower_bound(cfg, popularity);
  auto best = solve_local(cfg, popularity, warm.policy);
  auto vertex = solve_local(cfg, popularity, baseline_popular(popularity, cfg.n_cache));
  if (vertex.objective > best.objective) {
    vertex.iterations += best.iterations;
    return vertex;
  }
  best.iterations += vertex.iterations;
  return best;
}

CachingPolicy baseline_popular(const PopularityModel& popularity, int n_cache) {
  std::vector<double> q(static_cast<std::size_t>(popularity.n_files()), 0.0);
  const auto top = static_cast<std::size_t>(std::clamp(n_cache, 0, popularity.n_files()));
  std::fill(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(top), 1.0);
  return CachingPolicy(std::move(q));
}

CachingPolicy baseline_uniform(const PopularityModel& popularity, int n_cache) {
  const double share =
      std::min(1.0, static_cast<double>(std::max(n_cache, 0)) / popularity.n_files());
  return CachingPolicy(std::vector<double>(static_cast<std::size_t>(popularity.n_files()), share));
}

}  // namespace hetcache
