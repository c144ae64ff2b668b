// Command-line front end: run fidelity sweeps (simulate), cross-check an
// instance against the oracle routes (verify), and print engineered
// couplings (solve-couplings).
//
// Exit codes: 0 success, 1 failed verification or scenario-level failure,
// 2 usage or configuration errors.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drsn/scenario.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

struct SimulateArgs {
  std::string config_path;
  std::string family = "cycle";
  std::vector<int> params;
  std::vector<double> gammas;
  std::string couplings = "solver";
  double t0 = 1.0;
  double t_max = 20.0;
  double dt = 0.01;
  std::string csv_dir;
  std::string svg_dir;
  bool oracle = false;
  int oracle_cap = drsn::FullSpaceOracle::default_cap;
  bool paper_normalization = false;
};

struct VerifyArgs {
  std::string config_path;
  std::string family = "cycle";
  int param = 2;
  double gamma = 0.1;
  std::string couplings = "solver";
  double t0 = 1.0;
  double t_max = 20.0;
  double dt = 0.01;
  int oracle_cap = drsn::FullSpaceOracle::default_cap;
};

struct SolveArgs {
  std::string family = "cycle";
  int param = 2;
  std::string strategy; // empty = family default
  double t0 = 1.0;
};

drsn::ScenarioConfig config_from_args(const SimulateArgs& a) {
  if (!a.config_path.empty()) return drsn::config_from_file(a.config_path);
  drsn::ScenarioConfig cfg;
  cfg.family = drsn::parse_family(a.family);
  if (!a.params.empty()) cfg.params = a.params;
  if (!a.gammas.empty()) cfg.gammas = a.gammas;
  cfg.couplings = drsn::parse_couplings_spec(a.couplings, a.t0);
  cfg.t_max = a.t_max;
  cfg.dt = a.dt;
  cfg.csv_dir = a.csv_dir;
  cfg.svg_dir = a.svg_dir;
  cfg.oracle = a.oracle;
  cfg.oracle_cap = a.oracle_cap;
  cfg.paper_normalization = a.paper_normalization;
  cfg.validate();
  return cfg;
}

int run_simulate(const SimulateArgs& args) {
  drsn::ScenarioConfig cfg;
  try {
    cfg = config_from_args(args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return exit_usage;
  }

  const drsn::ScenarioResult res = drsn::run_scenario(cfg);
  std::printf("%-16s %-8s %-18s %-18s %-8s %-12s %s\n", "instance", "gamma", "steady", "peak F",
              "peak t", "oracle dev", "csv");
  for (const auto& row : res.rows) {
    std::string dev = row.oracle_dev < 0.0 ? "-" : drsn::format_compact(row.oracle_dev);
    std::printf("%-16s %-8s %-18s %-18s %-8s %-12s %s\n", row.instance.c_str(),
                drsn::format_compact(row.gamma).c_str(), drsn::format_sig15(row.steady).c_str(),
                drsn::format_sig15(row.peak_value).c_str(),
                drsn::format_compact(row.peak_time).c_str(), dev.c_str(),
                row.csv_path.empty() ? "-" : row.csv_path.c_str());
  }
  for (const auto& path : res.svg_paths) std::printf("svg: %s\n", path.c_str());
  for (const auto& err : res.errors) std::fprintf(stderr, "error: %s\n", err.c_str());
  return res.ok() ? exit_ok : exit_failure;
}

int run_verify(const VerifyArgs& args) {
  drsn::NetworkInstance inst;
  drsn::CouplingVector j;
  double gamma = args.gamma, t_max = args.t_max, dt = args.dt;
  int cap = args.oracle_cap;
  try {
    if (!args.config_path.empty()) {
      const drsn::ScenarioConfig cfg = drsn::config_from_file(args.config_path);
      inst = cfg.family == drsn::Family::custom
                 ? drsn::make_custom_instance(cfg.custom_adjacency, cfg.custom_reference)
                 : drsn::make_instance(cfg.family, cfg.params.at(0));
      j = drsn::resolve_couplings(inst, cfg.couplings);
      gamma = cfg.gammas.at(0);
      t_max = cfg.t_max;
      dt = cfg.dt;
      cap = cfg.oracle_cap;
    } else {
      inst = drsn::make_instance(drsn::parse_family(args.family), args.param);
      j = drsn::resolve_couplings(inst, drsn::parse_couplings_spec(args.couplings, args.t0));
    }
  } catch (const drsn::NotStratifiable& e) {
    std::printf("[FAIL] stratification: %s\n", e.what());
    return exit_failure;
  } catch (const drsn::UnsupportedTopology& e) {
    std::printf("[FAIL] topology: %s\n", e.what());
    return exit_failure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return exit_usage;
  }

  const drsn::VerifyReport rep = drsn::verify_instance(inst, j, gamma, t_max, dt, cap);
  std::printf("verify %s (gamma=%s, grid [0,%s] step %s)\n", rep.instance.c_str(),
              drsn::format_compact(gamma).c_str(), drsn::format_compact(t_max).c_str(),
              drsn::format_compact(dt).c_str());
  for (const auto& c : rep.checks)
    std::printf("[%s] %-55s metric %-12s tol %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                drsn::format_compact(c.metric).c_str(), drsn::format_compact(c.tol).c_str());
  if (!rep.all_pass()) {
    std::printf("verification FAILED\n");
    return exit_failure;
  }
  std::printf("all checks passed\n");
  return exit_ok;
}

int run_solve(const SolveArgs& args) {
  try {
    const drsn::NetworkInstance inst =
        drsn::make_instance(drsn::parse_family(args.family), args.param);
    drsn::PstTarget target;
    target.transfer_time = args.t0;
    if (args.strategy.empty()) {
      target.strategy = drsn::default_strategy(inst.family);
    } else if (args.strategy == "ladder") {
      target.strategy = drsn::TargetStrategy::ladder;
    } else if (args.strategy == "folded") {
      target.strategy = drsn::TargetStrategy::folded;
    } else {
      throw drsn::InvalidParameter("unknown strategy '" + args.strategy +
                                   "' (expected ladder|folded)");
    }
    const drsn::CouplingVector j = drsn::solve_couplings(inst.spectrum, target);
    const drsn::EnergyLevels e = drsn::energies(j, inst.spectrum);
    const drsn::PstCheckResult pst = drsn::pst_check(e, args.t0);

    std::printf("# %s, strategy %s, t0 = %s\n", inst.name.c_str(),
                drsn::to_string(target.strategy), drsn::format_compact(args.t0).c_str());
    std::printf("J =");
    for (double v : j.values) std::printf(" %s", drsn::format_sig15(v).c_str());
    std::printf("\n");
    std::printf("# transfer phase residual at t0: %s\n",
                drsn::format_compact(pst.phase_residual).c_str());
    return exit_ok;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return exit_usage;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"spin-network state transfer under intrinsic decoherence"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "run fidelity sweeps, write CSV/SVG traces");
  auto* cfg_opt = simulate->add_option("--config", sim.config_path, "JSON scenario config");
  simulate->add_option("--family", sim.family, "cycle|hypercube|crown")->excludes(cfg_opt);
  simulate->add_option("--param", sim.params, "family parameter(s), comma separated")
      ->delimiter(',')
      ->excludes(cfg_opt);
  simulate->add_option("--gamma", sim.gammas, "decoherence rate(s), comma separated")
      ->delimiter(',')
      ->excludes(cfg_opt);
  simulate
      ->add_option("--couplings", sim.couplings,
                   "preset:<name>|solver[:ladder|:folded]|explicit:<list>")
      ->excludes(cfg_opt);
  simulate->add_option("--t0", sim.t0, "transfer time for solver couplings")->excludes(cfg_opt);
  simulate->add_option("--t-max", sim.t_max, "grid end")->excludes(cfg_opt);
  simulate->add_option("--dt", sim.dt, "grid step")->excludes(cfg_opt);
  simulate->add_option("--csv", sim.csv_dir, "directory for CSV traces")->excludes(cfg_opt);
  simulate->add_option("--svg", sim.svg_dir, "directory for SVG plots")->excludes(cfg_opt);
  simulate->add_flag("--oracle", sim.oracle, "cross-check traces against the oracle routes")
      ->excludes(cfg_opt);
  simulate->add_option("--oracle-cap", sim.oracle_cap, "dense-oracle vertex cap")
      ->excludes(cfg_opt);
  simulate
      ->add_flag("--paper-normalization", sim.paper_normalization,
                 "use the stratum-scaled weight normalization (compatibility mode)")
      ->excludes(cfg_opt);

  VerifyArgs ver;
  CLI::App* verify = app.add_subcommand("verify", "run the cross-check battery for one instance");
  auto* vcfg_opt = verify->add_option("--config", ver.config_path, "JSON scenario config");
  verify->add_option("--family", ver.family, "cycle|hypercube|crown")->excludes(vcfg_opt);
  verify->add_option("--param", ver.param, "family parameter")->excludes(vcfg_opt);
  verify->add_option("--gamma", ver.gamma, "decoherence rate")->excludes(vcfg_opt);
  verify
      ->add_option("--couplings", ver.couplings,
                   "preset:<name>|solver[:ladder|:folded]|explicit:<list>")
      ->excludes(vcfg_opt);
  verify->add_option("--t0", ver.t0, "transfer time for solver couplings")->excludes(vcfg_opt);
  verify->add_option("--t-max", ver.t_max, "grid end")->excludes(vcfg_opt);
  verify->add_option("--dt", ver.dt, "grid step")->excludes(vcfg_opt);
  verify->add_option("--oracle-cap", ver.oracle_cap, "dense-oracle vertex cap")->excludes(vcfg_opt);

  SolveArgs sol;
  CLI::App* solve = app.add_subcommand("solve-couplings", "print engineered couplings");
  solve->add_option("--family", sol.family, "cycle|hypercube|crown");
  solve->add_option("--param", sol.param, "family parameter");
  solve->add_option("--strategy", sol.strategy, "ladder|folded (default: family choice)");
  solve->add_option("--t0", sol.t0, "transfer time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (verify->parsed()) return run_verify(ver);
    if (solve->parsed()) return run_solve(sol);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_failure;
  }
  return exit_usage;
}
