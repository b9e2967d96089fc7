// stickywave: batch driver for the particle solvers.
//
//   stickywave <subcommand> [--config FILE] [flags]
//
// Flags override values from the JSON config. Exit codes: 0 success,
// 2 invalid input, 3 numerical failure (including a failed selftest).

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stickywave/bench.hpp"
#include "stickywave/errors.hpp"

namespace {

using stickywave::bench::RunConfig;

struct Flags {
  std::string config;
  std::optional<std::string> mode, out, flux, n, t, oracle;
  std::vector<std::string> measures;
  std::optional<double> delta;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> instances, threads, x_points, resolution;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration");
  cmd->add_option("--mode", f.mode, "scalar | system | psystem");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--flux", f.flux, "flux or field spec, e.g. burgers, psystem:nu=0.5,kappa=5");
  cmd->add_option("--measure", f.measures, "measure spec (repeatable; one per type for systems)")
      ->take_all();
  cmd->add_option("--n", f.n, "particle counts: 2,4,8 | 2^1..2^9 | 2..512:2");
  cmd->add_option("--t", f.t, "times: 1,10,50 | 10..50:10");
  cmd->add_option("--delta", f.delta, "time step of the iterated scheme");
  cmd->add_option("--oracle", f.oracle, "run the exact event-driven oracle")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--seed", f.seed, "seed for randomised suites");
  cmd->add_option("--instances", f.instances, "instances per property suite");
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  cmd->add_option("--x-points", f.x_points, "samples along x in field exports");
  cmd->add_option("--resolution", f.resolution, "particle count of the scalar reference");
}

RunConfig resolve(const Flags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : stickywave::bench::load_config(f.config);
  if (f.mode) cfg.mode = *f.mode;
  if (f.out) cfg.out = *f.out;
  if (f.flux) cfg.flux = *f.flux;
  if (!f.measures.empty()) cfg.measures = f.measures;
  if (f.n) cfg.n = stickywave::bench::parse_n_list(*f.n);
  if (f.t) cfg.t = stickywave::bench::parse_t_list(*f.t);
  if (f.delta) cfg.delta = *f.delta;
  if (f.oracle) cfg.oracle = *f.oracle == "on";
  if (f.seed) cfg.seed = *f.seed;
  if (f.instances) cfg.instances = *f.instances;
  if (f.threads) cfg.threads = *f.threads;
  if (f.x_points) cfg.x_points = *f.x_points;
  if (f.resolution) cfg.reference_resolution = *f.resolution;
  stickywave::bench::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sticky particle solvers for conservation laws and hyperbolic systems"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"scalar-convergence", "L1 error of scalar SPD against the reference, per (n, t)"},
      {"scalar-field", "empirical CDF sampled on a (t, x) grid"},
      {"system-run", "iterated scheme trajectories, plus the exact event log with --oracle on"},
      {"delta-study", "sup-error of the iterated scheme against the exact dynamics per step size"},
      {"quantize-study", "W1 decay of optimal quantization and fitted tail rates"},
      {"selftest", "randomised property suites"}};
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  namespace bench = stickywave::bench;
  try {
    const RunConfig cfg = resolve(flags);
    const std::string cmd = app.get_subcommands().front()->get_name();
    std::vector<std::filesystem::path> written;
    int status = 0;
    if (cmd == "scalar-convergence") {
      written = bench::cmd_scalar_convergence(cfg);
    } else if (cmd == "scalar-field") {
      written = bench::cmd_scalar_field(cfg);
    } else if (cmd == "system-run") {
      written = bench::cmd_system_run(cfg);
    } else if (cmd == "delta-study") {
      written = bench::cmd_delta_study(cfg);
    } else if (cmd == "quantize-study") {
      written = bench::cmd_quantize_study(cfg);
    } else {
      bool passed = false;
      written = bench::cmd_selftest(cfg, passed);
      status = passed ? 0 : 3;
    }
    for (const auto& p : written) std::cout << p.string() << '\n';
    return status;
  } catch (const stickywave::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const stickywave::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}
