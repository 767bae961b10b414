#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetcache/analysis.hpp"
#include "hetcache/network.hpp"
#include "hetcache/optimizer.hpp"
#include "hetcache/popularity.hpp"
#include "hetcache/sim.hpp"

namespace hetcache {

/// Everything an experiment needs: radio network, catalog and Monte Carlo
/// settings.
struct Scenario {
  NetworkConfig network = NetworkConfig::default_fixture();
  int n_files = 1000;
  double skew = 0.5;
  double window_radius = 2500.0;
  long long n_drops = 20000;
  std::optional<double> noise_dbm = -95.0;
  std::uint64_t seed = 1;

  PopularityModel popularity() const { return zipf_pmf(n_files, skew); }
  SimConfig sim_config() const;
  void validate() const;
};

/// Applies one `key = value` setting. dB-valued keys are converted to linear
/// here. Densities are accepted per m^2 (`lambda1`, `lambda2`, `lambda_u`)
/// or as counts per pi 250^2 m^2 (`lambda1_cells`, ...). Throws ConfigError.
void apply_setting(Scenario& scenario, std::string_view key, std::string_view value);

/// Setting keys understood by apply_setting, in a stable order.
const std::vector<std::string>& setting_keys();

/// Reads `key = value` lines; `#` starts a comment. Throws ConfigError.
Scenario parse_scenario(std::istream& in, Scenario base = {});

enum class SolverKind { saturated, sparse_users, active_prob_max, lower_bound, local, popular, uniform };

SolverKind parse_solver(std::string_view name);
std::string_view to_string(SolverKind kind);

SolverReport run_solver(SolverKind kind, const NetworkConfig& cfg,
                        const PopularityModel& popularity);

enum class SweepVariable { gamma0_db, lambda2, p1_over_p2_db, b2_db, lambda_u };
enum class PolicyKind { opt_local, opt_lower_bound, popular, uniform };
enum class Evaluator { closed_form, monte_carlo, both };

SweepVariable parse_sweep_variable(std::string_view name);
PolicyKind parse_policy(std::string_view name);
Evaluator parse_evaluator(std::string_view name);
std::string_view to_string(SweepVariable v);
std::string_view to_string(PolicyKind p);

SolverKind solver_for(PolicyKind policy);

struct SweepSpec {
  SweepVariable variable = SweepVariable::gamma0_db;
  std::vector<double> values;
  std::vector<PolicyKind> policies;
  Evaluator evaluator = Evaluator::closed_form;

  /// Values non-empty and strictly monotone, at least one policy.
  void validate() const;
};

/// `base` with the swept variable set to `value` (dB values converted).
Scenario with_value(const Scenario& base, SweepVariable variable, double value);

struct SweepRow {
  double value;
  PolicyKind policy;
  double p_off_closed_form;
  std::optional<double> p_off_mc;
  std::optional<double> mc_half_width;
  std::optional<double> solve_time_ms;
};

/// One row per (value, policy), in value-major order. Wall-clock solve
/// times are recorded only when `record_timing` is set, so the default
/// output is reproducible byte for byte.
std::vector<SweepRow> run_sweep(const Scenario& base, const SweepSpec& spec,
                                bool record_timing = false);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_policy_csv(std::ostream& out, const CachingPolicy& policy);

/// Locale-independent shortest round-trip formatting.
std::string format_number(double value);

/// Figure fixtures on the evaluation setting. Each returns the scenario
/// (catalog skew as in the figure) and the sweep.
struct FigureSweep {
  Scenario scenario;
  SweepSpec spec;
};

FigureSweep figure_sinr_threshold(double skew);  ///< offloading vs gamma0
FigureSweep figure_helper_density();             ///< offloading vs lambda2, skew 1
FigureSweep figure_bias();                       ///< offloading vs B2, skew 0.5
/// Caching policy vs P1: the scenario for skew 1 and the P1 values (dBm).
std::pair<Scenario, std::vector<double>> figure_transmit_power();

}  // namespace hetcache
