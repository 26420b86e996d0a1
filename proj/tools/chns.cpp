// Command-line driver: run, converge, probe-monotonicity.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "chns/cli_io.hpp"
#include "chns/error.hpp"

namespace fs = std::filesystem;
using namespace chns;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> snapshot_every;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("CONFIG", c.config, "Configuration file");
  app->add_option("--config", c.config, "Configuration file");
  app->add_option("--out", c.out, "Output directory (overrides [run] output)");
  app->add_option("--seed", c.seed, "Seed override for random initial data");
  app->add_option("--snapshot-every", c.snapshot_every, "Field snapshot cadence in steps");
}

RunConfig load(const Common& c) {
  if (c.config.empty()) throw InvalidArgument("a configuration file is required");
  RunConfig cfg = load_config(c.config);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.seed) cfg.scenario.seed = *c.seed;
  if (c.snapshot_every) cfg.snapshot_every = *c.snapshot_every;
  if (cfg.snapshot_every < 0) throw InvalidArgument("snapshot_every >= 0 required");
  cfg.scenario.validate();
  fs::create_directories(cfg.output_dir);
  return cfg;
}

std::string snapshot_name(std::int64_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fields_%06lld.vtk", static_cast<long long>(k));
  return buf;
}

int cmd_run(const Common& c) {
  const RunConfig cfg = load(c);
  const fs::path dir = cfg.output_dir;
  for (const auto& w : cfg.scenario.warnings()) std::cerr << "warning: " << w << '\n';
  std::ofstream(dir / "config.ini") << format_config(cfg);

  std::shared_ptr<const FeSystem> fe = build_fe(cfg.scenario.mesh);
  RunOptions opts;
  opts.on_step = [&](const SimState& s, const StepReport& r) {
    if (cfg.snapshot_every > 0 && s.k % cfg.snapshot_every == 0) {
      write_fields(*fe, s, (dir / snapshot_name(s.k)).string());
    }
    std::cerr << "step " << r.step << " t=" << format_double(r.t) << " picard=" << r.picard_iters
              << " newton=" << r.newton_iters << " E_app=" << format_double(r.energy_after) << '\n';
  };
  const RunArtifacts art = run_scenario(cfg.scenario, opts);
  write_diagnostics(art.rows, (dir / "diagnostics.csv").string());
  write_step_reports(art.reports, (dir / "steps.csv").string());
  write_fields(*art.fe, art.final_state, (dir / "fields_final.vtk").string());
  std::cout << "wrote " << art.rows.size() << " steps to " << dir.string() << '\n';
  return 0;
}

int cmd_converge(const Common& c) {
  const RunConfig cfg = load(c);
  const CauchyTable table = cauchy_convergence(cauchy_setup(cfg.scenario), cfg.scenario.levels);
  write_cauchy_table(table, (fs::path(cfg.output_dir) / "convergence.csv").string());
  std::printf("%-4s %6s %6s %14s %8s\n", "var", "coarse", "fine", "L2 error", "rate");
  for (const auto& r : table.rows) {
    std::printf("%-4s %6lld %6lld %14.6e %8.3f\n", r.variable.c_str(), static_cast<long long>(r.coarse),
                static_cast<long long>(r.fine), r.error, r.rate);
  }
  for (const auto& w : table.warnings) std::cerr << "warning: " << w << '\n';
  return 0;
}

int cmd_probe(const Common& c, int trials) {
  const RunConfig cfg = load(c);
  const Scenario& s = cfg.scenario;
  std::shared_ptr<const FeSystem> fe = build_fe(s.mesh);
  Stepper stepper(fe, s.phys, s.scheme, boundary_for(s));
  auto [phi0, u0] = initial_fields(s, *fe);
  const SimState frozen = stepper.startup_first_order(phi0, u0).state;
  const MonotonicityReport rep = monotonicity_probe(stepper, frozen, trials, s.seed.value_or(0));
  for (std::size_t i = 0; i < rep.trials.size(); ++i) {
    std::printf("trial %2zu pairing %.6e  ||mu-nu||_H1^2 %.6e\n", i, rep.trials[i].pairing, rep.trials[i].h1_sq);
  }
  std::printf("min pairing %.6e  min scaled %.6e\n", rep.min_pairing, rep.min_scaled);
  return rep.min_scaled >= -1e-10 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cahn-Hilliard-Navier-Stokes solver"};
  app.require_subcommand(1);
  Common run_opts, conv_opts, probe_opts;
  int trials = 20;
  CLI::App* run = app.add_subcommand("run", "Run a scenario, writing CSV diagnostics and VTK fields");
  add_common(run, run_opts);
  CLI::App* conv = app.add_subcommand("converge", "Cauchy convergence study over refinement levels");
  add_common(conv, conv_opts);
  CLI::App* probe = app.add_subcommand("probe-monotonicity", "Sample the monotonicity of the reduced operator");
  add_common(probe, probe_opts);
  probe->add_option("--trials", trials, "Number of random (mu, nu) pairs");
  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_opts);
    if (*conv) return cmd_converge(conv_opts);
    if (*probe) return cmd_probe(probe_opts, trials);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
