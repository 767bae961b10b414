// hetcache: cache placement solver and offloading evaluator.
//
//   hetcache solve       --solver lower-bound
//   hetcache evaluate    --solver popular --gamma0_db 0
//   hetcache simulate    --solver local --drops 100000 --seed 7
//   hetcache sweep       --variable gamma0_db --values -15,-10,-5 --policies opt-local,popular
//   hetcache show-policy --solver saturated --out policy.csv
//
// Exit codes: 0 success, 2 invalid configuration or arguments, 3 numerical failure.

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>

#include "hetcache/experiments.hpp"

namespace hc = hetcache;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(text.substr(0, comma));
    if (comma == std::string_view::npos) {
      break;
    }
    text.remove_prefix(comma + 1);
  }
  return out;
}

struct Options {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> settings;
  std::string out_path;
  std::string solver = "lower-bound";
  std::optional<int> file;
  std::string variable = "gamma0_db";
  std::string values;
  std::string policies = "opt-local,opt-lower-bound,popular,uniform";
  std::string evaluator = "closed-form";
  bool timing = false;
};

hc::Scenario load_scenario(const Options& opt) {
  hc::Scenario scenario;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) {
      throw hc::ConfigError("config", "cannot open '" + opt.config_path + "'");
    }
    scenario = hc::parse_scenario(in, scenario);
  }
  for (const auto& [key, value] : opt.settings) {
    hc::apply_setting(scenario, key, value);
  }
  scenario.validate();
  return scenario;
}

// Writes to --out if given, stdout otherwise.
template <class Fn>
void emit(const Options& opt, Fn&& write) {
  if (opt.out_path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(opt.out_path, std::ios::binary);
  if (!out) {
    throw hc::ConfigError("out", "cannot write '" + opt.out_path + "'");
  }
  write(out);
}

void run_solve(const Options& opt) {
  const auto scenario = load_scenario(opt);
  const auto kind = hc::parse_solver(opt.solver);
  const auto report = hc::run_solver(kind, scenario.network, scenario.popularity());
  const auto fmt = hc::format_number;
  emit(opt, [&](std::ostream& out) {
    out << "solver,objective,p_off,multiplier,iterations,residual,helper_activity,total_q\n";
    out << hc::to_string(kind) << ',' << fmt(report.objective) << ','
        << fmt(hc::offloading_prob(scenario.network, report.policy, scenario.popularity()))
        << ',' << fmt(report.multiplier) << ',' << report.iterations << ','
        << fmt(report.residual) << ',' << fmt(report.helper_activity) << ','
        << fmt(report.policy.total()) << '\n';
  });
}

void run_evaluate(const Options& opt) {
  const auto scenario = load_scenario(opt);
  const auto popularity = scenario.popularity();
  const auto kind = hc::parse_solver(opt.solver);
  const auto policy = hc::run_solver(kind, scenario.network, popularity).policy;
  const hc::OffloadingModel model(scenario.network, popularity);
  const double pa = model.active_prob(policy.values());
  const auto& c = model.constants();
  const auto fmt = hc::format_number;
  emit(opt, [&](std::ostream& out) {
    out << "solver,p_off,p_off_saturated,helper_active_prob,c1,c2,c3\n";
    out << hc::to_string(kind) << ',' << fmt(model.offloading(policy.values(), pa)) << ','
        << fmt(model.offloading(policy.values(), 1.0)) << ',' << fmt(pa) << ','
        << fmt(c.c1) << ',' << fmt(c.c2) << ',' << fmt(c.c3) << '\n';
  });
}

void run_simulate(const Options& opt) {
  const auto scenario = load_scenario(opt);
  const auto popularity = scenario.popularity();
  const auto kind = hc::parse_solver(opt.solver);
  const auto policy = hc::run_solver(kind, scenario.network, popularity).policy;
  const auto cfg = scenario.sim_config();
  cfg.validate();
  if (opt.file && (*opt.file < 1 || *opt.file > popularity.n_files())) {
    throw hc::ConfigError("file", "rank outside the catalog");
  }
  const auto summary = hc::run_monte_carlo(cfg, policy, popularity, opt.file);
  const auto p_off = summary.offloading();
  const auto assoc = summary.helper_association();
  const hc::OffloadingModel model(scenario.network, popularity);
  const double pa = model.active_prob(policy.values());
  double closed = 0.0;
  double closed_assoc = 0.0;
  if (opt.file) {
    const double q = policy.q(*opt.file);
    closed_assoc = model.association_prob(q);
    closed = q > 0.0 ? model.association_prob(q) * model.conditional_success(q, pa) : 0.0;
  } else {
    closed = model.offloading(policy.values(), pa);
    closed_assoc = model.association_mass(policy.values());
  }
  const auto fmt = hc::format_number;
  emit(opt, [&](std::ostream& out) {
    out << "solver,drops,p_off_mc,mc_half_width,p_off_closed_form,helper_association_mc,"
           "helper_association_closed_form,active_fraction_mc,helper_active_prob\n";
    out << hc::to_string(kind) << ',' << summary.drops << ',' << fmt(p_off.p_hat) << ','
        << fmt(p_off.half_width_95) << ',' << fmt(closed) << ',' << fmt(assoc.p_hat) << ','
        << fmt(closed_assoc) << ',' << fmt(summary.active_fraction()) << ',' << fmt(pa) << '\n';
  });
}

void run_sweep_command(const Options& opt) {
  const auto scenario = load_scenario(opt);
  hc::SweepSpec spec;
  spec.variable = hc::parse_sweep_variable(opt.variable);
  for (auto item : split_list(opt.values)) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw hc::ConfigError("values", "expected a number, got '" + std::string(item) + "'");
    }
    spec.values.push_back(v);
  }
  for (auto item : split_list(opt.policies)) {
    spec.policies.push_back(hc::parse_policy(item));
  }
  spec.evaluator = hc::parse_evaluator(opt.evaluator);
  const auto rows = hc::run_sweep(scenario, spec, opt.timing);
  emit(opt, [&](std::ostream& out) { hc::write_sweep_csv(out, rows); });
}

void run_show_policy(const Options& opt) {
  const auto scenario = load_scenario(opt);
  const auto kind = hc::parse_solver(opt.solver);
  const auto report = hc::run_solver(kind, scenario.network, scenario.popularity());
  emit(opt, [&](std::ostream& out) { hc::write_policy_csv(out, report.policy); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic cache placement for two-tier networks with helpers"};
  app.require_subcommand(1);
  Options opt;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "key = value scenario file");
    cmd->add_option("--out", opt.out_path, "write CSV here instead of stdout");
    for (const auto& key : hc::setting_keys()) {
      cmd->add_option_function<std::string>(
          "--" + key, [&opt, key](const std::string& v) { opt.settings.emplace_back(key, v); },
          "override '" + key + "'");
    }
  };
  const auto add_solver = [&](CLI::App* cmd) {
    cmd->add_option("--solver", opt.solver,
                    "saturated|sparse-users|active-max|lower-bound|local|popular|uniform")
        ->capture_default_str();
  };

  auto* solve = app.add_subcommand("solve", "solve for a caching policy, print a summary");
  add_common(solve);
  add_solver(solve);
  auto* evaluate = app.add_subcommand("evaluate", "closed-form offloading of a policy");
  add_common(evaluate);
  add_solver(evaluate);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate for a policy");
  add_common(simulate);
  add_solver(simulate);
  simulate->add_option("--file", opt.file, "condition on the typical user requesting this rank");
  auto* sweep = app.add_subcommand("sweep", "offloading versus one parameter");
  add_common(sweep);
  sweep->add_option("--variable", opt.variable, "gamma0_db|lambda2|p1_over_p2_db|b2_db|lambda_u")
      ->capture_default_str();
  sweep->add_option("--values", opt.values, "comma-separated, strictly monotone")->required();
  sweep->add_option("--policies", opt.policies, "subset of opt-local,opt-lower-bound,popular,uniform")
      ->capture_default_str();
  sweep->add_option("--evaluator", opt.evaluator, "closed-form|monte-carlo|both")
      ->capture_default_str();
  sweep->add_flag("--timing", opt.timing, "record solve wall time (output no longer reproducible)");
  auto* show = app.add_subcommand("show-policy", "print the solved policy as rank,q");
  add_common(show);
  add_solver(show);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (solve->parsed()) {
      run_solve(opt);
    } else if (evaluate->parsed()) {
      run_evaluate(opt);
    } else if (simulate->parsed()) {
      run_simulate(opt);
    } else if (sweep->parsed()) {
      run_sweep_command(opt);
    } else if (show->parsed()) {
      run_show_policy(opt);
    }
  } catch (const hc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const hc::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const hc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
