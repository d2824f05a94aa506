// hpfo: run, verify or synthesize profiles for one scenario file.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "hpfo/error.hpp"
#include "hpfo/scenario.hpp"
#include "hpfo/verify.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<double> horizon_s;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config, "scenario file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "profile seed (overrides sim.seed)");
  cmd->add_option("--out-dir", c.out_dir, "output directory (default $HPFO_OUT_DIR, else ./out)");
  cmd->add_option("--horizon-s", c.horizon_s, "simulated seconds (overrides sim.horizon_s)")
      ->check(CLI::NonNegativeNumber);
}

hpfo::ScenarioConfig load(const Common& c) {
  hpfo::ScenarioConfig cfg = hpfo::load_config(c.config);
  if (c.seed) cfg.sim.seed = *c.seed;
  if (c.horizon_s) cfg.sim.horizon_s = *c.horizon_s;
  cfg.validate();
  return cfg;
}

fs::path out_dir(const Common& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* env = std::getenv("HPFO_OUT_DIR"); env && *env) return env;
  return "out";
}

int verify(const hpfo::ScenarioConfig& cfg) {
  hpfo::EquivalenceOptions eq;
  hpfo::InvarianceOptions inv;
  hpfo::GradientOptions grad;
  eq.seed ^= cfg.sim.seed;
  inv.seed ^= cfg.sim.seed;
  grad.seed ^= cfg.sim.seed;
  // Lighter than the acceptance run; same checks.
  inv.starts = 100;
  inv.steps = 2000;
  bool ok = true;
  for (const auto& r : {hpfo::check_oracle_equivalence(eq, cfg.limits), hpfo::check_forward_invariance(inv, cfg.limits),
                        hpfo::check_gradients(grad)}) {
    hpfo::print_check(std::cout, r);
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feedback-optimization supervisory control of a wind/solar/battery plant"};
  app.require_subcommand(1);
  Common run_opts;
  Common verify_opts;
  Common synth_opts;
  add_common(app.add_subcommand("run", "closed-loop run; writes log.csv, summary.txt, plot_*.csv"), run_opts);
  add_common(app.add_subcommand("verify", "oracle equivalence, forward invariance, gradient checks"), verify_opts);
  add_common(app.add_subcommand("synth-profiles", "write the disturbance and demand profiles as profiles.csv"),
             synth_opts);
  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) {
      const auto cfg = load(run_opts);
      const fs::path dir = out_dir(run_opts);
      const int code = hpfo::run_scenario(cfg, dir, std::cout);
      std::cout << "wrote " << dir.string() << '\n';
      return code;
    }
    if (app.got_subcommand("verify")) return verify(load(verify_opts));
    if (app.got_subcommand("synth-profiles")) {
      const auto cfg = load(synth_opts);
      const fs::path dir = out_dir(synth_opts);
      hpfo::synth_profiles(cfg, dir);
      std::cout << "wrote " << (dir / "profiles.csv").string() << '\n';
      return 0;
    }
  } catch (const hpfo::ParseError& e) {
    std::cerr << e.what() << '\n';
    return hpfo::kExitConfig;
  } catch (const hpfo::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return hpfo::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hpfo::kExitSimulation;
  }
  return 0;
}
