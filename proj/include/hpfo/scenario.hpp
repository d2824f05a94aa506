#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hpfo/cosim.hpp"

namespace hpfo {

/// A scenario file as written: capacities in MW, limits in kW, times in s.
/// Conversion to library units happens in make_setup.
struct ScenarioConfig {
  struct Plant {
    int num_turbines = 10;
    double wind_capacity_mw = 50.0;
    double solar_capacity_mw = 100.0;
    double battery_capacity_mw = 20.0;
    double battery_duration_h = 4.0;
    double battery_soc = 0.5;
    double battery_soc_min = 0.1;
    double battery_soc_max = 0.9;
    double battery_ramp_kw_s = 2000.0;
    double battery_p_avail_kw = 20000.0;
    double rotor_diameter_m = 126.0;
    double air_density = 1.225;
    double cut_in_ms = 3.0;
    double cut_out_ms = 25.0;
    double wake_factor = 1.0;
    std::string cp_table;  // empty: built-in 5 MW table
    double solar_area_m2 = 500000.0;
    double solar_eta_ref = 0.2;
    double solar_temp_coeff = 0.004;
    double solar_t_ref_c = 25.0;
    double solar_r_b = 1.0;
    double solar_r_d = 1.0;
    double solar_r_r = 0.0;
    friend bool operator==(const Plant&, const Plant&) = default;
  } plant;

  struct Controller {
    double dt = 0.03;
    std::vector<std::string> components{"wind", "solar", "battery"};
    Mode battery_mode = Mode::Discharging;
    double eta = 0.95;
    double beta = 1.0;
    double rate_limit_wind_kw_s = 5000.0;
    double rate_limit_solar_kw_s = 5000.0;
    friend bool operator==(const Controller&, const Controller&) = default;
  } controller;

  PlantLimits limits;

  struct Cost {
    double q_r = 10.0;
    double q_b = 80.0;
    friend bool operator==(const Cost&, const Cost&) = default;
  } cost;

  struct Sim {
    double dt_plant = 0.01;
    double horizon_s = 600.0;
    std::uint64_t seed = 1;
    friend bool operator==(const Sim&, const Sim&) = default;
  } sim;

  /// Columns missing from `file` (or all of them, if no file) are synthesized.
  struct Profiles {
    std::string file;
    double wind_mean_ms = 9.5;
    double demand_base_kw = 77500.0;
    double demand_variation_kw = 2500.0;
    double demand_period_s = 120.0;
    double dni_start_wm2 = 420.0;
    double dni_end_wm2 = 380.0;
    double dhi_wm2 = 80.0;
    double tair_c = 25.0;
    friend bool operator==(const Profiles&, const Profiles&) = default;
  } profiles;

  struct Summary {
    double settle_s = 60.0;
    double max_rmse_pct = 3.0;
    friend bool operator==(const Summary&, const Summary&) = default;
  } summary;

  /// Full defaults for one battery mode (gains, profiles, thresholds).
  static ScenarioConfig defaults(Mode mode);

  /// Throws ValidationError naming the violated condition.
  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Flat `section.key = value` lines; '#' starts a comment. Keys left out
/// take the defaults of the file's battery_mode, and limits left out follow
/// the capacities. Relative paths are resolved against `base_dir`.
/// Throws ParseError (line and key) or ValidationError.
ScenarioConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);
/// Every key, full precision, so parse_config(write_config(c)) == c.
void write_config(std::ostream& out, const ScenarioConfig& c);

/// Disturbance and demand profiles: CSV columns where given, synthesis
/// otherwise (wind from `seed`, demand from `seed + 1`).
DisturbanceProfile build_profile(const ScenarioConfig& c);

/// Library-unit closed-loop setup.
SimSetup make_setup(const ScenarioConfig& c);

struct ScenarioSummary {
  std::size_t steps = 0;
  double settle_s = 0.0;
  double rmse_kw = 0.0;        // after the settle window
  double rmse_pct = 0.0;       // of mean demand over the same window
  double max_abs_error_kw = 0.0;
  double mean_demand_kw = 0.0;
  double soc_start = 0.0;
  double soc_end = 0.0;
  double energy_start_kwh = 0.0;
  double energy_end_kwh = 0.0;
  bool energy_monotone = true;  // in the direction of the mode
  double qp_optimal_pct = 0.0;  // of controller updates
  std::size_t battery_clamps = 0;
  bool thresholds_met = false;
};

ScenarioSummary summarize(const SimLog& log, const ScenarioConfig& c);
void write_summary(std::ostream& out, const ScenarioSummary& s, const ScenarioConfig& c);

/// One file per panel: total vs demand, per-channel powers, availability vs
/// delivered.
void write_plot_files(const std::filesystem::path& dir, const SimLog& log);

enum ExitCode : int {
  kExitOk = 0,
  kExitThresholds = 1,  // ran to the end, summary thresholds missed
  kExitSimulation = 2,  // a step raised an error
  kExitConfig = 3,
};

/// Runs the closed loop and writes log.csv, summary.txt and plot_*.csv into
/// `out_dir` (created if needed).
int run_scenario(const ScenarioConfig& c, const std::filesystem::path& out_dir, std::ostream& msg);

/// Writes profiles.csv (1 s grid) for the configured horizon.
void synth_profiles(const ScenarioConfig& c, const std::filesystem::path& out_dir);

}  // namespace hpfo
