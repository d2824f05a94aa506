#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace hpfo {

using Vector5 = Eigen::Matrix<double, 5, 1>;
using Matrix5 = Eigen::Matrix<double, 5, 5>;

/// Battery operating regime. The two are mutually exclusive for a whole run.
enum class Mode { Charging, Discharging };

std::string_view to_string(Mode mode);

/// Position of each supervisory setpoint inside the control vector.
enum Channel : int {
  kWindToLoad = 0,
  kSolarToLoad = 1,
  kBatteryToLoad = 2,
  kWindToBattery = 3,
  kSolarToBattery = 4,
};

/// Supervisory setpoints, kW.
struct ControlVector {
  double p_w_dl = 0.0;  // wind -> load
  double p_s_dl = 0.0;  // solar -> load
  double p_b_dl = 0.0;  // battery -> load
  double p_w_db = 0.0;  // wind -> battery
  double p_s_db = 0.0;  // solar -> battery

  Vector5 to_vector() const { return {p_w_dl, p_s_dl, p_b_dl, p_w_db, p_s_db}; }
  static ControlVector from_vector(const Vector5& v) { return {v[0], v[1], v[2], v[3], v[4]}; }

  double wind_total() const { return p_w_dl + p_w_db; }
  double solar_total() const { return p_s_dl + p_s_db; }
  double to_load() const { return p_w_dl + p_s_dl + p_b_dl; }
  double to_battery() const { return p_w_db + p_s_db; }

  friend bool operator==(const ControlVector&, const ControlVector&) = default;
};

/// Plant outputs, kW, ordered (P_wl, P_wb, P_sl, P_sb, P_b).
///
/// `p_b` is the battery's contribution to the load. While charging it is
/// zero; the charging power itself shows up as p_wb + p_sb.
struct MeasurementVector {
  double p_wl = 0.0;
  double p_wb = 0.0;
  double p_sl = 0.0;
  double p_sb = 0.0;
  double p_b = 0.0;

  Vector5 to_vector() const { return {p_wl, p_wb, p_sl, p_sb, p_b}; }
  static MeasurementVector from_vector(const Vector5& v) { return {v[0], v[1], v[2], v[3], v[4]}; }

  double delivered() const { return p_wl + p_sl + p_b; }

  friend bool operator==(const MeasurementVector&, const MeasurementVector&) = default;
};

/// Reorders a measurement-ordered vector into control-channel order, pairing
/// each output with the setpoint it responds to.
inline Vector5 measurement_to_channel_order(const Vector5& y) {
  return {y[0], y[2], y[4], y[1], y[3]};
}

inline Vector5 channel_to_measurement_order(const Vector5& u) {
  return {u[0], u[3], u[1], u[4], u[2]};
}

}  // namespace hpfo
