// catsense: generalized-cat-state metrology experiments.
//
// Subcommands: qindex, ghz-curve, scaling, thermal-demo, mc-validate,
// ramsey, optimize. A JSON config may be passed with --config; explicit
// flags override its values. CATSENSE_THREADS caps sweep parallelism.
//
// Exit codes: 0 success, 2 invalid config, 3 numerical failure,
// 4 validation/regression failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "catsense/errors.hpp"
#include "catsense/experiments.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::string family, observable, n_range, t_range, working_point, out_path, format;
  double b = 0, lambda = 0, tau_c = 0, t2 = 0, p2 = 0, T_total = 0, t_int = 0, phase = 0,
         omega0 = 0;
  int sector_m = 0, n_traj = 0;
  std::uint64_t seed = 0;
};

void add_common_options(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file; flags override");
  cmd->add_option("--family", flags.family,
                  "ghz | staircase | rho_ex | product_plus | thermal_x | projected_thermal | "
                  "ghz_closed");
  cmd->add_option("--obs", flags.observable, "mz | mx | my (default per family)");
  cmd->add_option("--N", flags.n_range, "size range A..B (step 2) or A..B:step or single N");
  cmd->add_option("--b", flags.b, "thermal weight b (default atanh(0.6))");
  cmd->add_option("--M", flags.sector_m, "magnetization sector for the conversion");
  cmd->add_option("--lambda", flags.lambda, "dephasing amplitude (rad/s)");
  cmd->add_option("--T2", flags.t2, "coherence time; sets lambda = 1/(sqrt(2) T2)");
  cmd->add_option("--tauc", flags.tau_c, "noise correlation time (s)");
  cmd->add_option("--p2", flags.p2, "phase budget omega t N for working_point=p2");
  cmd->add_option("--T", flags.T_total, "total measurement time (s)");
  cmd->add_option("--t", flags.t_range, "interaction-time grid lo..hi/points");
  cmd->add_option("--t-int", flags.t_int, "single interaction time (ramsey)");
  cmd->add_option("--omega0", flags.omega0, "applied-field shift (rad/s); overrides p2 rule");
  cmd->add_option("--working-point", flags.working_point, "scan | p2 | phase");
  cmd->add_option("--phase", flags.phase, "extremal phase for working_point=phase");
  cmd->add_option("--seed", flags.seed, "RNG seed");
  cmd->add_option("--n-traj", flags.n_traj, "Monte Carlo trajectories");
  cmd->add_option("--out", flags.out_path, "output path (default stdout)");
  cmd->add_option("--format", flags.format, "csv | json");
}

catsense::RunConfig build_config(const CLI::App* cmd, const Flags& flags,
                                 const std::string& command) {
  catsense::RunConfig config;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw catsense::ConfigError("cannot read config file '" + flags.config_path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& err) {
      throw catsense::ConfigError(std::string("config file is not valid JSON: ") + err.what());
    }
    config = catsense::RunConfig::from_json(j);
  }
  config.command = command;

  auto passed = [cmd](const std::string& name) { return cmd->count(name) > 0; };
  if (passed("--family")) config.family = flags.family;
  if (passed("--obs")) config.observable = flags.observable;
  if (passed("--N")) config.n_range = flags.n_range;
  if (passed("--b")) config.b = flags.b;
  if (passed("--M")) config.sector_m = flags.sector_m;
  if (passed("--lambda")) config.lambda = flags.lambda;
  if (passed("--T2")) {
    if (!(flags.t2 > 0.0)) throw catsense::ConfigError("--T2 must be > 0");
    config.lambda = catsense::lambda_from_t2(flags.t2);
  }
  if (passed("--tauc")) config.tau_c = flags.tau_c;
  if (passed("--p2")) config.p2 = flags.p2;
  if (passed("--T")) config.T_total = flags.T_total;
  if (passed("--t")) config.t_range = flags.t_range;
  if (passed("--t-int")) config.t_int = flags.t_int;
  if (passed("--omega0")) config.omega0 = flags.omega0;
  if (passed("--working-point")) config.working_point = flags.working_point;
  if (passed("--phase")) config.phase = flags.phase;
  if (passed("--seed")) config.seed = flags.seed;
  if (passed("--n-traj")) config.n_traj = flags.n_traj;
  if (passed("--out")) config.out_path = flags.out_path;
  if (passed("--format")) config.format = flags.format;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized-cat-state metrology experiments"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"qindex", "macroscopicity diagnostics and index fit over a family"},
      {"ghz-curve", "closed-form uncertainty vs interaction time for a T2 set"},
      {"scaling", "per-N optimized uncertainty and log-log scaling fit"},
      {"thermal-demo", "projected-thermal cat vs thermal and product baselines"},
      {"mc-validate", "Monte Carlo vs closed-form dephasing z-score table"},
      {"ramsey", "sensitivity report at a single working point"},
      {"optimize", "interaction-time optimization for one family"},
  };

  Flags flags;
  std::vector<CLI::App*> subs;
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    add_common_options(sub, flags);
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (CLI::App* sub : subs) {
      if (!sub->parsed()) continue;
      const catsense::RunConfig config = build_config(sub, flags, sub->get_name());
      const catsense::ExperimentResult result = catsense::run_command(config);
      catsense::emit_result(result, config);
      if (result.summary.is_object() && result.summary.value("regression", false)) {
        std::cerr << "validation failure: |z| > 4 at a Zeno-regime point\n";
        return 4;
      }
      return 0;
    }
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const catsense::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const catsense::ValidationError& err) {
    std::cerr << "validation failure: " << err.what() << "\n";
    return 4;
  } catch (const catsense::NumericalError& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::domain_error& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return 3;
  }
}
