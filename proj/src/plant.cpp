#include <algorithm>

#include "hpfo/error.hpp"
#include "hpfo/plants.hpp"

namespace hpfo {

void PlantLimits::validate() const {
  if (!(p_max_w > 0.0)) throw ValidationError("limits: p_max_w must be positive");
  if (!(p_max_s > 0.0)) throw ValidationError("limits: p_max_s must be positive");
  if (!(p_max_b > 0.0)) throw ValidationError("limits: p_max_b must be positive");
  if (!(p_min_b <= 0.0)) throw ValidationError("limits: p_min_b must be <= 0");
  if (p_min_w != 0.0) throw ValidationError("limits: p_min_w must be 0");
  if (p_min_s != 0.0) throw ValidationError("limits: p_min_s must be 0");
}

namespace {

// Delivers min(total setpoint, cap) and shares any shortfall pro rata.
void saturate_pair(double& a, double& b, double cap) {
  a = std::max(0.0, a);
  b = std::max(0.0, b);
  const double total = a + b;
  if (total <= cap || total <= 0.0) return;
  cap = std::max(0.0, cap);
  const double f = cap / total;
  a = std::min(a * f, cap);
  b = std::min(b * f, cap - a);
}

}  // namespace

MeasurementVector plant_outputs(const ControlVector& u, const Availability& avail, Mode mode,
                                const BatteryLimitsOut& batt) {
  MeasurementVector y;
  y.p_wl = u.p_w_dl;
  y.p_wb = u.p_w_db;
  saturate_pair(y.p_wl, y.p_wb, avail.wind);
  y.p_sl = u.p_s_dl;
  y.p_sb = u.p_s_db;
  saturate_pair(y.p_sl, y.p_sb, avail.solar);

  if (mode == Mode::Charging) {
    saturate_pair(y.p_wb, y.p_sb, std::max(0.0, batt.upper));
    y.p_b = 0.0;
  } else {
    // A discharging battery takes nothing from the sources.
    y.p_wb = 0.0;
    y.p_sb = 0.0;
    y.p_b = std::clamp(u.p_b_dl, std::max(0.0, batt.lower), std::max(0.0, batt.upper));
  }
  return y;
}

double battery_power(const MeasurementVector& y, Mode mode) {
  return mode == Mode::Charging ? y.p_wb + y.p_sb : y.p_b;
}

}  // namespace hpfo
