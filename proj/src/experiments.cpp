#include "hetcache/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <istream>
#include <ostream>

namespace hetcache {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError(std::string(key), "expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

long long parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(key), "expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

int parse_int(std::string_view key, std::string_view text) {
  const long long v = parse_integer(key, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(std::string(key), "integer out of range");
  }
  return static_cast<int>(v);
}

template <class Enum, std::size_t N>
Enum lookup(std::string_view what, std::string_view name,
            const std::pair<std::string_view, Enum> (&table)[N]) {
  for (const auto& [key, value] : table) {
    if (key == name) {
      return value;
    }
  }
  std::string known;
  for (const auto& entry : table) {
    known += (known.empty() ? "" : ", ") + std::string(entry.first);
  }
  throw ConfigError(std::string(what), "unknown value '" + std::string(name) + "' (expected one of " +
                                           known + ")");
}

template <class Enum, std::size_t N>
std::string_view reverse_lookup(Enum v, const std::pair<std::string_view, Enum> (&table)[N]) {
  for (const auto& [key, value] : table) {
    if (value == v) {
      return key;
    }
  }
  return "?";
}

constexpr std::pair<std::string_view, SolverKind> kSolvers[] = {
    {"saturated", SolverKind::saturated},   {"sparse-users", SolverKind::sparse_users},
    {"active-max", SolverKind::active_prob_max}, {"lower-bound", SolverKind::lower_bound},
    {"local", SolverKind::local},           {"popular", SolverKind::popular},
    {"uniform", SolverKind::uniform},
};

constexpr std::pair<std::string_view, SweepVariable> kVariables[] = {
    {"gamma0_db", SweepVariable::gamma0_db},
    {"lambda2", SweepVariable::lambda2},
    {"p1_over_p2_db", SweepVariable::p1_over_p2_db},
    {"b2_db", SweepVariable::b2_db},
    {"lambda_u", SweepVariable::lambda_u},
};

constexpr std::pair<std::string_view, PolicyKind> kPolicies[] = {
    {"opt-local", PolicyKind::opt_local},
    {"opt-lower-bound", PolicyKind::opt_lower_bound},
    {"popular", PolicyKind::popular},
    {"uniform", PolicyKind::uniform},
};

constexpr std::pair<std::string_view, Evaluator> kEvaluators[] = {
    {"closed-form", Evaluator::closed_form},
    {"monte-carlo", Evaluator::monte_carlo},
    {"both", Evaluator::both},
};

}  // namespace

SimConfig Scenario::sim_config() const {
  SimConfig cfg;
  cfg.network = network;
  cfg.window_radius = window_radius;
  cfg.n_drops = n_drops;
  cfg.noise_dbm = noise_dbm;
  cfg.seed = seed;
  return cfg;
}

void Scenario::validate() const {
  network.validate();
  if (n_files < 1) {
    throw ConfigError("n_files", "must be >= 1");
  }
  if (!(skew >= 0.0)) {
    throw ConfigError("skew", "must be >= 0");
  }
  if (!(window_radius > 0.0)) {
    throw ConfigError("window_radius", "must be > 0");
  }
  if (n_drops < 1) {
    throw ConfigError("drops", "must be >= 1");
  }
}

const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys = {
      "lambda1",   "lambda2",   "lambda_u", "lambda1_cells", "lambda2_cells", "lambda_u_cells",
      "m1",        "p1_dbm",    "p2_dbm",   "b1_db",         "b2_db",         "alpha",
      "gamma0_db", "n_cache",   "n_files",  "skew",          "window_radius", "drops",
      "noise_dbm", "seed",
  };
  return keys;
}

void apply_setting(Scenario& s, std::string_view key, std::string_view value) {
  auto& net = s.network;
  const auto number = [&] { return parse_double(key, value); };
  if (key == "lambda1") {
    net.lambda1 = number();
  } else if (key == "lambda2") {
    net.lambda2 = number();
  } else if (key == "lambda_u") {
    net.lambda_u = number();
  } else if (key == "lambda1_cells") {
    net.lambda1 = per_reference_cell(number());
  } else if (key == "lambda2_cells") {
    net.lambda2 = per_reference_cell(number());
  } else if (key == "lambda_u_cells") {
    net.lambda_u = per_reference_cell(number());
  } else if (key == "m1") {
    net.m1 = parse_int(key, value);
  } else if (key == "p1_dbm") {
    net.p1 = dbm_to_mw(number());
  } else if (key == "p2_dbm") {
    net.p2 = dbm_to_mw(number());
  } else if (key == "b1_db") {
    net.b1 = db_to_linear(number());
  } else if (key == "b2_db") {
    net.b2 = db_to_linear(number());
  } else if (key == "alpha") {
    net.alpha = number();
  } else if (key == "gamma0_db") {
    net.gamma0 = db_to_linear(number());
  } else if (key == "n_cache") {
    net.n_cache = parse_int(key, value);
  } else if (key == "n_files") {
    s.n_files = parse_int(key, value);
  } else if (key == "skew") {
    s.skew = number();
  } else if (key == "window_radius") {
    s.window_radius = number();
  } else if (key == "drops") {
    s.n_drops = parse_integer(key, value);
  } else if (key == "noise_dbm") {
    if (trim(value) == "none") {
      s.noise_dbm.reset();
    } else {
      s.noise_dbm = number();
    }
  } else if (key == "seed") {
    const long long seed = parse_integer(key, value);
    if (seed < 0) {
      throw ConfigError("seed", "must be >= 0");
    }
    s.seed = static_cast<std::uint64_t>(seed);
  } else {
    throw ConfigError(std::string(key), "unknown setting");
  }
}

Scenario parse_scenario(std::istream& in, Scenario base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) {
      continue;
    }
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    apply_setting(base, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
  }
  base.validate();
  return base;
}

SolverKind parse_solver(std::string_view name) { return lookup("solver", name, kSolvers); }
std::string_view to_string(SolverKind kind) { return reverse_lookup(kind, kSolvers); }

SweepVariable parse_sweep_variable(std::string_view name) {
  return lookup("variable", name, kVariables);
}
PolicyKind parse_policy(std::string_view name) { return lookup("policies", name, kPolicies); }
Evaluator parse_evaluator(std::string_view name) { return lookup("evaluator", name, kEvaluators); }
std::string_view to_string(SweepVariable v) { return reverse_lookup(v, kVariables); }
std::string_view to_string(PolicyKind p) { return reverse_lookup(p, kPolicies); }

SolverKind solver_for(PolicyKind policy) {
  switch (policy) {
    case PolicyKind::opt_local:
      return SolverKind::local;
    case PolicyKind::opt_lower_bound:
      return SolverKind::lower_bound;
    case PolicyKind::popular:
      return SolverKind::popular;
    case PolicyKind::uniform:
      return SolverKind::uniform;
  }
  return SolverKind::lower_bound;
}

SolverReport run_solver(SolverKind kind, const NetworkConfig& cfg,
                        const PopularityModel& popularity) {
  const auto baseline = [&](CachingPolicy policy) {
    const OffloadingModel model(cfg, popularity);
    const double pa = model.active_prob(policy.values());
    const double objective = model.offloading(policy.values(), pa);
    const double residual =
        std::abs(policy.total() - std::min(cfg.n_cache, popularity.n_files()));
    return SolverReport{.policy = std::move(policy),
                        .multiplier = 0.0,
                        .objective = objective,
                        .iterations = 0,
                        .residual = residual,
                        .helper_activity = pa};
  };
  switch (kind) {
    case SolverKind::saturated:
      return solve_saturated(cfg, popularity);
    case SolverKind::sparse_users:
      return solve_sparse_users(cfg, popularity);
    case SolverKind::active_prob_max:
      return solve_active_prob_max(cfg, popularity);
    case SolverKind::lower_bound:
      return solve_lower_bound(cfg, popularity);
    case SolverKind::local:
      return solve_local(cfg, popularity);
    case SolverKind::popular:
      return baseline(baseline_popular(popularity, cfg.n_cache));
    case SolverKind::uniform:
      return baseline(baseline_uniform(popularity, cfg.n_cache));
  }
  throw DomainError("run_solver: unknown solver");
}

void SweepSpec::validate() const {
  if (values.empty()) {
    throw ConfigError("values", "sweep needs at least one value");
  }
  const bool increasing = std::adjacent_find(values.begin(), values.end(),
                                             std::greater_equal<>()) == values.end();
  const bool decreasing = std::adjacent_find(values.begin(), values.end(),
                                             std::less_equal<>()) == values.end();
  if (!increasing && !decreasing) {
    throw ConfigError("values", "sweep values must be strictly monotone");
  }
  if (policies.empty()) {
    throw ConfigError("policies", "sweep needs at least one policy");
  }
}

Scenario with_value(const Scenario& base, SweepVariable variable, double value) {
  Scenario s = base;
  switch (variable) {
    case SweepVariable::gamma0_db:
      s.network.gamma0 = db_to_linear(value);
      break;
    case SweepVariable::lambda2:
      s.network.lambda2 = value;
      break;
    case SweepVariable::p1_over_p2_db:
      s.network.p1 = s.network.p2 * db_to_linear(value);
      break;
    case SweepVariable::b2_db:
      s.network.b2 = db_to_linear(value);
      break;
    case SweepVariable::lambda_u:
      s.network.lambda_u = value;
      break;
  }
  return s;
}

std::vector<SweepRow> run_sweep(const Scenario& base, const SweepSpec& spec, bool record_timing) {
  spec.validate();
  base.validate();
  const auto popularity = base.popularity();
  const bool closed = spec.evaluator != Evaluator::monte_carlo;
  const bool mc = spec.evaluator != Evaluator::closed_form;

  std::vector<SweepRow> rows;
  rows.reserve(spec.values.size() * spec.policies.size());
  for (double value : spec.values) {
    const Scenario s = with_value(base, spec.variable, value);
    s.validate();
    for (PolicyKind policy : spec.policies) {
      const auto start = std::chrono::steady_clock::now();
      const auto report = run_solver(solver_for(policy), s.network, popularity);
      const auto stop = std::chrono::steady_clock::now();

      SweepRow row{value, policy, std::numeric_limits<double>::quiet_NaN(), {}, {}, {}};
      if (closed) {
        row.p_off_closed_form = offloading_prob(s.network, report.policy, popularity);
      }
      if (mc) {
        const auto estimate = estimate_offloading(s.sim_config(), report.policy, popularity);
        row.p_off_mc = estimate.p_hat;
        row.mc_half_width = estimate.half_width_95;
      }
      if (record_timing) {
        row.solve_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string format_number(double value) {
  if (std::isnan(value)) {
    return "";
  }
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string();
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  const auto opt = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
  };
  out << "value,policy,p_off_closed_form,p_off_mc,mc_half_width,solve_time_ms\n";
  for (const auto& r : rows) {
    out << format_number(r.value) << ',' << to_string(r.policy) << ','
        << format_number(r.p_off_closed_form) << ',' << opt(r.p_off_mc) << ','
        << opt(r.mc_half_width) << ',' << opt(r.solve_time_ms) << '\n';
  }
}

void write_policy_csv(std::ostream& out, const CachingPolicy& policy) {
  out << "rank,q\n";
  for (Rank f = 1; f <= policy.size(); ++f) {
    out << f << ',' << format_number(policy.q(f)) << '\n';
  }
}

FigureSweep figure_sinr_threshold(double skew) {
  Scenario s;
  s.skew = skew;
  SweepSpec spec{.variable = SweepVariable::gamma0_db,
                 .values = {-20.0, -15.0, -10.0, -5.0, -2.5, 0.0, 5.0, 10.0},
                 .policies = {PolicyKind::opt_local, PolicyKind::opt_lower_bound,
                              PolicyKind::popular, PolicyKind::uniform},
                 .evaluator = Evaluator::closed_form};
  return {s, spec};
}

FigureSweep figure_helper_density() {
  Scenario s;
  s.skew = 1.0;
  SweepSpec spec{.variable = SweepVariable::lambda2,
                 .values = {},
                 .policies = {PolicyKind::opt_local, PolicyKind::opt_lower_bound,
                              PolicyKind::popular, PolicyKind::uniform},
                 .evaluator = Evaluator::closed_form};
  for (double count : {5.0, 10.0, 25.0, 50.0, 100.0, 200.0}) {
    spec.values.push_back(per_reference_cell(count));
  }
  return {s, spec};
}

FigureSweep figure_bias() {
  Scenario s;
  s.skew = 0.5;
  SweepSpec spec{.variable = SweepVariable::b2_db,
                 .values = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0},
                 .policies = {PolicyKind::opt_local, PolicyKind::opt_lower_bound,
                              PolicyKind::popular, PolicyKind::uniform},
                 .evaluator = Evaluator::closed_form};
  return {s, spec};
}

std::pair<Scenario, std::vector<double>> figure_transmit_power() {
  Scenario s;
  s.skew = 1.0;
  return {s, {36.0, 46.0, 56.0}};
}

}  // namespace hetcache
