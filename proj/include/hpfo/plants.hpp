#pragma once

#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hpfo/interpolation.hpp"
#include "hpfo/types.hpp"

namespace hpfo {

/// Setpoint limits, kW.
struct PlantLimits {
  double p_max_w = 50000.0;
  double p_max_s = 100000.0;
  double p_max_b = 20000.0;
  double p_min_b = -20000.0;
  double p_min_w = 0.0;
  double p_min_s = 0.0;

  /// Throws ValidationError naming the first violated condition.
  void validate() const;

  friend bool operator==(const PlantLimits&, const PlantLimits&) = default;
};

// ---------------------------------------------------------------- wind

/// Power coefficient as a function of wind speed, monotone cubic between knots.
class CpCurve {
 public:
  CpCurve(std::vector<double> speeds, std::vector<double> cp);

  /// Generic 5 MW reference table (126 m rotor), 3 to 25 m/s.
  static CpCurve reference_5mw();
  /// Two columns "speed cp", whitespace or comma separated. A non-numeric
  /// first line is taken as a header; '#' starts a comment.
  static CpCurve parse(std::istream& in);
  static CpCurve load(const std::string& path);

  double operator()(double speed) const { return interp_(speed); }
  std::span<const double> speeds() const { return interp_.x(); }
  std::span<const double> values() const { return interp_.y(); }

 private:
  MonotoneCubic interp_;
};

struct WindModel {
  int n_t = 10;
  double rho = 1.225;             // kg/m^3
  double rotor_area = std::numbers::pi * 63.0 * 63.0;  // m^2 per turbine, 126 m rotor
  CpCurve cp = CpCurve::reference_5mw();
  double rated_power = 5000.0;    // kW per turbine
  double cut_in = 3.0;            // m/s
  double cut_out = 25.0;          // m/s
  double wake_factor = 1.0;

  void validate() const;

  /// Available power of one turbine at local speed `speed`, kW.
  double turbine_power(double speed) const;
};

/// Farm availability. `speeds` holds one speed per turbine, or a single
/// ambient speed applied to every turbine. Throws NegativeSpeedError.
double available_wind_power(std::span<const double> speeds, const WindModel& m);
double available_wind_power(double ambient_speed, const WindModel& m);

double wind_output(double setpoint, std::span<const double> speeds, const WindModel& m);

// ---------------------------------------------------------------- solar

struct SolarModel {
  double a_pv = 500000.0;      // m^2
  double eta_ref = 0.2;
  double temp_coeff = 0.004;   // 1/degC
  double t_ref = 25.0;         // degC
  double r_b = 1.0;
  double r_d = 1.0;
  double r_r = 0.0;
  double rated_power = 100000.0;  // kW, caps availability

  void validate() const;
  double efficiency(double t_air) const;
};

/// Plane-of-array irradiance, W/m^2.
double total_irradiance(double i_b, double i_d, const SolarModel& m);
/// kW.
double available_solar_power(double i_t, double t_air, const SolarModel& m);
double solar_output(double setpoint, double i_t, double t_air, const SolarModel& m);

// ---------------------------------------------------------------- battery

struct BatteryState {
  double capacity_c = 80000.0;  // kWh
  double soc = 0.5;
  double energy_e = 40000.0;    // kWh
  double soc_min = 0.1;
  double soc_max = 0.9;
  double e_min = 8000.0;
  double e_max = 72000.0;
  double p_max_b = 20000.0;     // kW
  double p_min_b = -20000.0;    // kW
  double r_min = -2000.0;       // kW/s
  double r_max = 2000.0;        // kW/s

  /// Builds a consistent state (energy and energy bounds derived from soc).
  static BatteryState make(double capacity_kwh, double soc, double soc_min, double soc_max,
                           double p_max_kw, double p_min_kw, double r_min, double r_max);
  void validate() const;
};

struct BatteryLimitsOut {
  double lower = 0.0;  // kW
  double upper = 0.0;  // kW
};

/// Power bounds on the battery setpoint for one step of `dt_s` seconds.
/// `p_avail` only enters in Discharging. Throws InconsistentStateError when
/// lower > upper.
BatteryLimitsOut battery_limits(const BatteryState& s, double dt_s, Mode mode, double p_avail);

struct BatteryStep {
  BatteryState state;
  bool clamped = false;
};

/// Integrates energy for `dt_s` seconds at power `p_b` >= 0. The mode gives
/// the sign: charging adds, discharging removes.
BatteryStep battery_step(const BatteryState& s, double p_b, double dt_s, Mode mode);

// ---------------------------------------------------------------- outputs

struct Availability {
  double wind = 0.0;   // kW
  double solar = 0.0;  // kW
};

/// Plant response to held setpoints. Each source delivers min(setpoint,
/// availability) and splits a shortfall between its load and battery channels
/// in proportion to the setpoints. The battery delivers its load setpoint
/// clipped to `batt`, and while charging accepts at most batt.upper.
MeasurementVector plant_outputs(const ControlVector& u, const Availability& avail, Mode mode,
                                const BatteryLimitsOut& batt);

/// Battery power magnitude implied by a measurement (discharge to load, or
/// charge from the sources).
double battery_power(const MeasurementVector& y, Mode mode);

}  // namespace hpfo
