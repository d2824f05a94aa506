#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "hpfo/error.hpp"
#include "hpfo/scenario.hpp"

using namespace hpfo;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = HPFO_CONFIG_DIR;
const fs::path kData = HPFO_DATA_DIR;

ScenarioConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hpfo_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("reference configuration parses to the canonical scenario") {
  const ScenarioConfig c = load_config(kConfigs / "reference.cfg");
  CHECK(c.plant.num_turbines == 10);
  CHECK(c.plant.wind_capacity_mw == 50.0);
  CHECK(c.plant.solar_capacity_mw == 100.0);
  CHECK(c.plant.battery_capacity_mw == 20.0);
  CHECK(c.controller.dt == 0.03);
  CHECK(c.controller.eta == 0.95);
  CHECK(c.controller.beta == 1.0);
  CHECK(c.controller.battery_mode == Mode::Discharging);
  CHECK(c.controller.components == std::vector<std::string>{"wind", "solar", "battery"});
  CHECK(c.limits == PlantLimits{50000.0, 100000.0, 20000.0, -20000.0, 0.0, 0.0});
  CHECK(c.cost.q_r == 10.0);
  CHECK(c.cost.q_b == 80.0);

  const SimSetup s = make_setup(c);
  CHECK(s.wind.n_t == 10);
  CHECK(s.wind.rated_power == 5000.0);
  CHECK(s.solar.rated_power == 100000.0);
  CHECK(s.battery.capacity_c == 80000.0);
  CHECK(s.battery.p_max_b == 20000.0);
  CHECK(s.battery_p_avail == 20000.0);
  CHECK(s.controller_ratio == 3);
  CHECK(s.controller.rate_limit == Vector5(5000.0, 5000.0, 2000.0, 5000.0, 5000.0));
}

TEST_CASE("battery mode must be charge or discharge") {
  CHECK_THROWS_AS(parse("controller.battery_mode = hold\n"), ValidationError);
  CHECK(parse("controller.battery_mode = charge\n").controller.battery_mode == Mode::Charging);
}

TEST_CASE("omitted cost block takes the mode's tuned gains") {
  const ScenarioConfig d = parse("controller.battery_mode = discharge\n");
  CHECK(d.cost.q_r == 10.0);
  CHECK(d.cost.q_b == 80.0);
  const ScenarioConfig c = parse("controller.battery_mode = charge\n");
  CHECK(c.cost.q_r == 45.0);
  CHECK(c.cost.q_b == 2.0);
  CHECK(parse("").cost.q_b == 80.0);  // no mode given: discharge
}

TEST_CASE("limits follow capacities unless given") {
  const ScenarioConfig c = parse("plant.wind_capacity_mw = 30\nplant.battery_capacity_mw = 10\n");
  CHECK(c.limits.p_max_w == 30000.0);
  CHECK(c.limits.p_max_b == 10000.0);
  CHECK(c.limits.p_min_b == -10000.0);
  CHECK(c.plant.battery_p_avail_kw == 10000.0);
  CHECK_THROWS_AS(parse("plant.wind_capacity_mw = 30\nlimits.p_max_w = 50000\n"), ValidationError);
}

TEST_CASE("malformed files name the line and key") {
  try {
    parse("plant.num_turbines = 10\n\n# comment\nplant.turbine_count = 4\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("plant.turbine_count") != std::string::npos);
  }
  try {
    parse("controller.eta = fast\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("controller.eta") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("controller.eta\n"), ParseError);
  CHECK_THROWS_AS(parse("controller.eta = 1\ncontroller.eta = 2\n"), ParseError);
  CHECK_THROWS_AS(parse("plant.num_turbines = 2.5\n"), ParseError);
  CHECK_THROWS_AS(load_config(kConfigs / "missing.cfg"), ParseError);
}

TEST_CASE("validation names the broken constraint") {
  CHECK_THROWS_AS(parse("controller.components = wind, solar\n"), ValidationError);
  CHECK_THROWS_AS(parse("controller.components = wind, solar, battery, battery\n"), ValidationError);
  CHECK_NOTHROW(parse("controller.components = battery, wind, solar\n"));
  CHECK_THROWS_AS(parse("plant.solar_capacity_mw = 0\n"), ValidationError);
  CHECK_THROWS_AS(parse("sim.dt_plant = 0.02\n"), ValidationError);  // 0.03 is not a multiple
  CHECK_THROWS_AS(parse("plant.battery_soc = 0.95\n"), ValidationError);
  CHECK_THROWS_AS(parse("cost.q_r = 0\n"), ValidationError);
  try {
    parse("controller.beta = -1\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("controller.beta") != std::string::npos);
  }
}

TEST_CASE("write_config round-trips") {
  std::vector<ScenarioConfig> cases = {load_config(kConfigs / "reference.cfg"), load_config(kConfigs / "charging.cfg"),
                                       load_config(kConfigs / "discharging.cfg")};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    ScenarioConfig c = ScenarioConfig::defaults(i % 2 ? Mode::Charging : Mode::Discharging);
    c.plant.num_turbines = 1 + i;
    c.plant.wind_capacity_mw = 10.0 + 90.0 * u01(rng);
    c.plant.battery_soc = 0.1 + 0.8 * u01(rng);
    c.controller.eta = u01(rng) + 0.01;
    c.controller.beta = 1.0 / 3.0 + u01(rng);
    c.limits.p_max_w = c.plant.wind_capacity_mw * 1000.0 * u01(rng) + 1.0;
    c.cost.q_r = 1.0 + 99.0 * u01(rng);
    c.profiles.dni_end_wm2 = 1000.0 * u01(rng);
    c.profiles.file = i % 3 ? "" : "profiles dir/p.csv";
    c.sim.seed = rng();
    c.validate();
    cases.push_back(c);
  }
  for (const ScenarioConfig& c : cases) {
    std::stringstream text;
    write_config(text, c);
    const ScenarioConfig back = parse_config(text);
    CHECK(back == c);
  }
}

TEST_CASE("cp table path resolves next to the config") {
  const fs::path dir = scratch("cp");
  fs::create_directories(dir / "sub");
  fs::copy_file(kData / "reference_5mw_cp.txt", dir / "sub" / "cp.txt");
  std::ofstream(dir / "s.cfg") << "plant.cp_table = sub/cp.txt\nsim.horizon_s = 1\n";
  const ScenarioConfig c = load_config(dir / "s.cfg");
  CHECK(fs::path(c.plant.cp_table) == dir / "sub" / "cp.txt");
  const SimSetup s = make_setup(c);
  const CpCurve builtin = CpCurve::reference_5mw();
  for (double v = 3.0; v <= 25.0; v += 0.37) CHECK(s.wind.cp(v) == builtin(v));
}

TEST_CASE("profile file columns override synthesis") {
  const fs::path dir = scratch("profile");
  fs::create_directories(dir);
  std::ofstream(dir / "p.csv") << "t_s,demand_kw\n0,60000\n100,70000\n";
  std::ofstream(dir / "s.cfg") << "profiles.file = p.csv\nsim.horizon_s = 100\n";
  const ScenarioConfig c = load_config(dir / "s.cfg");
  const DisturbanceProfile p = build_profile(c);
  CHECK(p.demand_kw.at(50.0) == doctest::Approx(65000.0));
  CHECK(p.wind_ms == synth_wind_profile(c.profiles.wind_mean_ms, 100.0, c.sim.seed));
  CHECK(p.dni_wm2.at(0.0) == c.profiles.dni_start_wm2);
}

TEST_CASE("run_scenario writes its artifacts and reports thresholds in the exit code") {
  ScenarioConfig c = load_config(kConfigs / "charging.cfg");
  c.sim.horizon_s = 90.0;
  const fs::path dir = scratch("run");
  std::ostringstream msg;
  CHECK(run_scenario(c, dir, msg) == kExitOk);
  for (const char* f : {"log.csv", "summary.txt", "plot_total_vs_demand.csv", "plot_components.csv",
                        "plot_availability.csv"})
    CHECK(fs::exists(dir / f));
  std::ifstream summary(dir / "summary.txt");
  std::string text((std::istreambuf_iterator<char>(summary)), std::istreambuf_iterator<char>());
  CHECK(text.find("thresholds_met: yes") != std::string::npos);
  CHECK(text.find("qp_optimal_pct: 100") != std::string::npos);

  c.summary.max_rmse_pct = 1e-9;
  CHECK(run_scenario(c, dir, msg) == kExitThresholds);

  // Wind turns negative mid-run: the step error surfaces as exit code 2.
  const fs::path bad = scratch("bad");
  fs::create_directories(bad);
  std::ofstream(bad / "p.csv") << "t_s,wind_ms\n0,8\n5,8\n6,-3\n";
  c.profiles.file = (bad / "p.csv").string();
  c.sim.horizon_s = 10.0;
  CHECK(run_scenario(c, bad / "out", msg) == kExitSimulation);
  CHECK(fs::exists(bad / "out" / "summary.txt"));
}

TEST_CASE("summary over a short hand-made log") {
  ScenarioConfig c = ScenarioConfig::defaults(Mode::Discharging);
  c.summary.settle_s = 1.0;
  SimLog log;
  log.mode = Mode::Discharging;
  log.initial_energy_kwh = 40000.0;
  const double errs[] = {-500.0, 30.0, -40.0};
  for (int k = 0; k < 3; ++k) {
    SimRecord r;
    r.t = k;
    r.demand_kw = 1000.0;
    r.tracking_error_kw = errs[k];
    r.energy_kwh = 40000.0 - k;
    r.qp_status = k == 2 ? qp::QpStatus::MaxIterations : qp::QpStatus::Optimal;
    log.records.push_back(r);
  }
  const ScenarioSummary s = summarize(log, c);
  CHECK(s.rmse_kw == doctest::Approx(std::sqrt((900.0 + 1600.0) / 2.0)));
  CHECK(s.max_abs_error_kw == 40.0);
  CHECK(s.mean_demand_kw == 1000.0);
  CHECK(s.energy_monotone);
  CHECK(s.qp_optimal_pct == doctest::Approx(200.0 / 3.0));
  CHECK(s.soc_start == 0.5);
  CHECK(s.soc_end == doctest::Approx(39998.0 / 80000.0));
}

TEST_CASE("synth-profiles writes the configured horizon") {
  ScenarioConfig c = load_config(kConfigs / "discharging.cfg");
  c.sim.horizon_s = 30.0;
  const fs::path dir = scratch("synth");
  synth_profiles(c, dir);
  const ProfileColumns cols = read_profile_csv((dir / "profiles.csv").string());
  REQUIRE(cols.wind_ms);
  REQUIRE(cols.demand_kw);
  CHECK(cols.wind_ms->times().back() == 30.0);
  const DisturbanceProfile p = build_profile(c);
  for (double t : {0.0, 7.0, 30.0}) CHECK(cols.demand_kw->at(t) == doctest::Approx(p.demand_kw.at(t)).epsilon(1e-6));
}
