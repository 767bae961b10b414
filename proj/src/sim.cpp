#include "hetcache/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

namespace hetcache {

// Uniform bucket grid over the square enclosing the window. Points are
// stored contiguously per cell.
class SpatialGrid {
 public:
  SpatialGrid(const std::vector<Point>& points, double half_extent, double density)
      : points_(&points), half_extent_(half_extent) {
    // About two points per cell.
    const double target = density > 0.0 ? std::sqrt(2.0 / density) : 2.0 * half_extent;
    dim_ = std::clamp(static_cast<int>(std::ceil(2.0 * half_extent / target)), 1, 1024);
    cell_ = 2.0 * half_extent / dim_;
    start_.assign(static_cast<std::size_t>(dim_) * dim_ + 1, 0);
    std::vector<int> cell_of(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cell_of[i] = index(cell_coord(points[i].x), cell_coord(points[i].y));
      ++start_[static_cast<std::size_t>(cell_of[i]) + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) {
      start_[c] += start_[c - 1];
    }
    members_.resize(points.size());
    std::vector<int> cursor(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i) {
      members_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(cell_of[i])]++)] =
          static_cast<int>(i);
    }
  }

  // Nearest point strictly closer than sqrt(max_d2) accepted by `accept`;
  // returns -1 if none. `best_d2` receives the squared distance.
  template <class Accept>
  int nearest(Point p, double max_d2, Accept&& accept, double& best_d2) const {
    const int cx = cell_coord(p.x);
    const int cy = cell_coord(p.y);
    int best = -1;
    best_d2 = max_d2;
    for (int ring = 0;; ++ring) {
      if (ring >= 2) {
        const double gap = (ring - 1) * cell_;
        if (gap * gap >= best_d2) {
          break;
        }
      }
      if (cx - ring < 0 && cy - ring < 0 && cx + ring >= dim_ && cy + ring >= dim_) {
        break;  // ring lies entirely outside the grid
      }
      const int gy_end = std::min(cy + ring, dim_ - 1);
      for (int gy = std::max(cy - ring, 0); gy <= gy_end; ++gy) {
        const bool full_row = ring == 0 || gy == cy - ring || gy == cy + ring;
        const int stride = full_row ? 1 : 2 * ring;
        for (int gx = cx - ring; gx <= cx + ring; gx += stride) {
          if (gx < 0 || gx >= dim_ || cell_distance_sq(p, gx, gy) >= best_d2) {
            continue;
          }
          const int c = index(gx, gy);
          for (int k = start_[static_cast<std::size_t>(c)];
               k < start_[static_cast<std::size_t>(c) + 1]; ++k) {
            const int id = members_[static_cast<std::size_t>(k)];
            const Point& q = (*points_)[static_cast<std::size_t>(id)];
            const double dx = q.x - p.x;
            const double dy = q.y - p.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2 && accept(id)) {
              best_d2 = d2;
              best = id;
            }
          }
        }
      }
    }
    return best;
  }

 private:
  int cell_coord(double v) const {
    return std::clamp(static_cast<int>(std::floor((v + half_extent_) / cell_)), 0, dim_ - 1);
  }
  int index(int gx, int gy) const { return gy * dim_ + gx; }

  // Squared distance from p to the closed rectangle of cell (gx, gy).
  double cell_distance_sq(Point p, int gx, int gy) const {
    const double x0 = gx * cell_ - half_extent_;
    const double y0 = gy * cell_ - half_extent_;
    const double dx = std::max({0.0, x0 - p.x, p.x - (x0 + cell_)});
    const double dy = std::max({0.0, y0 - p.y, p.y - (y0 + cell_)});
    return dx * dx + dy * dy;
  }

  const std::vector<Point>* points_;
  double half_extent_;
  int dim_ = 1;
  double cell_ = 1.0;
  std::vector<int> start_;
  std::vector<int> members_;
};

namespace {

constexpr double kMinExpectedPoints = 30.0;
constexpr double kMinWindowToAssociation = 10.0;

std::vector<Point> poisson_disc(double density, double radius, RngStream& rng) {
  std::poisson_distribution<long long> count_dist(density * std::numbers::pi * radius * radius);
  const long long n = count_dist(rng);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(n));
  const double r2 = radius * radius;
  while (static_cast<long long>(pts.size()) < n) {
    const double x = (2.0 * uniform01(rng) - 1.0) * radius;
    const double y = (2.0 * uniform01(rng) - 1.0) * radius;
    if (x * x + y * y <= r2) {
      pts.push_back({x, y});
    }
  }
  return pts;
}

double exponential1(RngStream& rng) { return -std::log1p(-uniform01(rng)); }

// Gamma(shape, 1/shape): unit-mean sum of `shape` exponentials.
double unit_gamma(int shape, RngStream& rng) {
  double prod = 1.0;
  for (int i = 0; i < shape; ++i) {
    prod *= 1.0 - uniform01(rng);
  }
  return -std::log(prod) / shape;
}

double norm2(Point p) { return p.x * p.x + p.y * p.y; }

}  // namespace

void SimConfig::validate() const {
  network.validate();
  if (!(window_radius > 0.0) || !std::isfinite(window_radius)) {
    throw ConfigError("window_radius", "must be > 0");
  }
  if (n_drops < 1) {
    throw ConfigError("drops", "must be >= 1");
  }
  const double area = std::numbers::pi * window_radius * window_radius;
  const std::pair<const char*, double> tiers[] = {
      {"lambda1", network.lambda1}, {"lambda2", network.lambda2}, {"lambda_u", network.lambda_u}};
  for (const auto& [field, density] : tiers) {
    if (density * area < kMinExpectedPoints) {
      throw ConfigError(field, "window holds fewer than 30 expected points; enlarge "
                               "window_radius");
    }
  }
  if (window_radius < kMinWindowToAssociation * mean_association_distance()) {
    throw ConfigError("window_radius", "must be >= 10 mean association distances");
  }
}

double SimConfig::mean_association_distance() const {
  const double extension =
      std::pow(network.p2 * network.b2 / (network.p1 * network.b1), 1.0 / network.alpha);
  return 0.5 / std::sqrt(network.lambda1) * std::max(1.0, extension);
}

SimEstimate SimEstimate::from_counts(long long hits, long long trials) {
  if (trials <= 0) {
    return {};
  }
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {p, trials, 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
}

NetworkRealization::NetworkRealization(const NetworkConfig& cfg, double window_radius,
                                       std::vector<Point> macros, std::vector<Point> helpers,
                                       std::vector<double> helper_offsets,
                                       std::vector<Point> users,
                                       std::shared_ptr<const CacheLayout> layout)
    : cfg_(cfg),
      window_radius_(window_radius),
      macros_(std::move(macros)),
      helpers_(std::move(helpers)),
      helper_offsets_(std::move(helper_offsets)),
      users_(std::move(users)),
      layout_(std::move(layout)),
      range_extension_sq_(std::pow(cfg.p2 * cfg.b2 / (cfg.p1 * cfg.b1), 2.0 / cfg.alpha)) {
  if (helper_offsets_.size() != helpers_.size()) {
    throw DomainError("NetworkRealization: one placement offset per helper required");
  }
  if (!layout_) {
    throw DomainError("NetworkRealization: missing cache layout");
  }
  const double area = std::numbers::pi * window_radius * window_radius;
  macro_grid_ = std::make_unique<SpatialGrid>(macros_, window_radius,
                                              static_cast<double>(macros_.size()) / area);
  helper_grid_ = std::make_unique<SpatialGrid>(helpers_, window_radius,
                                               static_cast<double>(helpers_.size()) / area);
}

NetworkRealization::~NetworkRealization() = default;
NetworkRealization::NetworkRealization(NetworkRealization&&) noexcept = default;
NetworkRealization& NetworkRealization::operator=(NetworkRealization&&) noexcept = default;

std::optional<Association> NetworkRealization::associate(Point at, Rank f) const {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double macro_d2 = kInf;
  const int macro = macro_grid_->nearest(at, kInf, [](int) { return true; }, macro_d2);

  // A helper wins iff P2 B2 r2^-a > P1 B1 r1^-a, i.e. r2^2 < ext^2 r1^2.
  const double helper_limit = macro >= 0 ? range_extension_sq_ * macro_d2 : kInf;
  double helper_d2 = kInf;
  if (!layout_->cached_anywhere(f)) {
    return macro >= 0 ? std::optional(Association{Tier::macro, macro, std::sqrt(macro_d2)})
                      : std::nullopt;
  }
  const int helper = helper_grid_->nearest(
      at, helper_limit, [&](int h) { return helper_caches(h, f); }, helper_d2);

  if (helper >= 0) {
    return Association{Tier::helper, helper, std::sqrt(helper_d2)};
  }
  if (macro >= 0) {
    return Association{Tier::macro, macro, std::sqrt(macro_d2)};
  }
  return std::nullopt;
}

NetworkRealization drop_network(const SimConfig& cfg, std::shared_ptr<const CacheLayout> layout,
                                RngStream& rng) {
  const auto& net = cfg.network;
  auto macros = poisson_disc(net.lambda1, cfg.window_radius, rng);
  auto helpers = poisson_disc(net.lambda2, cfg.window_radius, rng);
  auto users = poisson_disc(net.lambda_u, cfg.window_radius, rng);
  const std::uint64_t placement_seed = rng();
  std::vector<double> offsets(helpers.size());
  for (std::size_t h = 0; h < offsets.size(); ++h) {
    offsets[h] = unit_interval(substream_seed(placement_seed, h));
  }
  return NetworkRealization(net, cfg.window_radius, std::move(macros), std::move(helpers),
                            std::move(offsets), std::move(users), std::move(layout));
}

DropRecord evaluate_drop(const NetworkRealization& net, const PopularityModel& popularity,
                         RngStream& rng, const DropOptions& options) {
  const auto& cfg = net.config();
  const auto& helpers = net.helpers();
  std::vector<int> load(helpers.size(), 0);
  for (const Point& user : net.users()) {
    const Rank f = popularity.sample(rng);
    const auto a = net.associate(user, f);
    if (a && a->tier == Tier::helper) {
      ++load[static_cast<std::size_t>(a->index)];
    }
  }

  DropRecord record;
  const double inner2 = options.inner_radius * options.inner_radius;
  for (std::size_t h = 0; h < helpers.size(); ++h) {
    if (norm2(helpers[h]) <= inner2) {
      ++record.inner_helpers;
      record.inner_active += load[h] > 0 ? 1 : 0;
    }
  }

  record.file = options.typical_file ? *options.typical_file : popularity.sample(rng);
  record.serving = net.associate(record.file);
  if (!record.serving || record.serving->tier != Tier::helper) {
    return record;
  }

  const int serving = record.serving->index;
  const double alpha = cfg.alpha;
  const double signal =
      cfg.p2 / NetworkConfig::kHelperAntennas * exponential1(rng) *
      std::pow(record.serving->distance, -alpha);

  double interference = 0.0;
  for (const Point& m : net.macros()) {
    interference += cfg.p1 * unit_gamma(cfg.m1, rng) * std::pow(norm2(m), -0.5 * alpha);
  }
  for (std::size_t h = 0; h < helpers.size(); ++h) {
    if (load[h] > 0 && static_cast<int>(h) != serving) {
      interference += cfg.p2 * exponential1(rng) * std::pow(norm2(helpers[h]), -0.5 * alpha);
    }
  }
  record.sinr = signal / (interference + options.noise_mw);
  record.offloaded = record.sinr > cfg.gamma0;
  if (record.offloaded && options.require_selection) {
    const int contenders = load[static_cast<std::size_t>(serving)] + 1;
    record.offloaded = uniform01(rng) * contenders < 1.0;
  }
  return record;
}

MonteCarloSummary& MonteCarloSummary::operator+=(const MonteCarloSummary& other) {
  drops += other.drops;
  offloaded += other.offloaded;
  helper_associated += other.helper_associated;
  inner_helpers += other.inner_helpers;
  inner_active += other.inner_active;
  return *this;
}

MonteCarloSummary run_monte_carlo(const SimConfig& cfg, const CachingPolicy& policy,
                                  const PopularityModel& popularity,
                                  std::optional<Rank> typical_file) {
  cfg.validate();
  if (policy.size() != popularity.n_files()) {
    throw DomainError("run_monte_carlo: policy length does not match the catalog");
  }
  if (typical_file && (*typical_file < 1 || *typical_file > popularity.n_files())) {
    throw DomainError("run_monte_carlo: typical file rank out of range");
  }
  const auto layout = std::make_shared<const CacheLayout>(policy, cfg.network.n_cache);
  const DropOptions options{
      .typical_file = typical_file,
      .require_selection = cfg.require_selection,
      .noise_mw = cfg.noise_dbm ? dbm_to_mw(*cfg.noise_dbm) : 0.0,
      .inner_radius = 0.5 * cfg.window_radius,
  };

  auto run_drop = [&](long long i, MonteCarloSummary& acc) {
    const std::uint64_t drop_seed = substream_seed(cfg.seed, static_cast<std::uint64_t>(i));
    for (std::uint64_t attempt = 0;; ++attempt) {
      RngStream rng(substream_seed(drop_seed, attempt));
      const auto net = drop_network(cfg, layout, rng);
      const auto rec = evaluate_drop(net, popularity, rng, options);
      if (!rec.serving) {
        continue;  // empty window for this request; redraw
      }
      ++acc.drops;
      acc.offloaded += rec.offloaded ? 1 : 0;
      acc.helper_associated += rec.serving->tier == Tier::helper ? 1 : 0;
      acc.inner_helpers += rec.inner_helpers;
      acc.inner_active += rec.inner_active;
      return;
    }
  };

  unsigned n_threads = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(cfg.n_drops)));
  std::vector<MonteCarloSummary> partial(n_threads);
  if (n_threads == 1) {
    for (long long i = 0; i < cfg.n_drops; ++i) {
      run_drop(i, partial[0]);
    }
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
      workers.emplace_back([&, t] {
        for (long long i = t; i < cfg.n_drops; i += n_threads) {
          run_drop(i, partial[t]);
        }
      });
    }
  }
  MonteCarloSummary total;
  for (const auto& p : partial) {
    total += p;
  }
  return total;
}

SimEstimate estimate_offloading(const SimConfig& cfg, const CachingPolicy& policy,
                                const PopularityModel& popularity) {
  return run_monte_carlo(cfg, policy, popularity).offloading();
}

}  // namespace hetcache
