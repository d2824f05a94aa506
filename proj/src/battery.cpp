#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hpfo/error.hpp"
#include "hpfo/plants.hpp"
#include "hpfo/units.hpp"

namespace hpfo {

BatteryState BatteryState::make(double capacity_kwh, double soc, double soc_min, double soc_max,
                                double p_max_kw, double p_min_kw, double r_min, double r_max) {
  BatteryState s;
  s.capacity_c = capacity_kwh;
  s.soc = soc;
  s.energy_e = soc * capacity_kwh;
  s.soc_min = soc_min;
  s.soc_max = soc_max;
  s.e_min = soc_min * capacity_kwh;
  s.e_max = soc_max * capacity_kwh;
  s.p_max_b = p_max_kw;
  s.p_min_b = p_min_kw;
  s.r_min = r_min;
  s.r_max = r_max;
  s.validate();
  return s;
}

void BatteryState::validate() const {
  if (!(capacity_c > 0.0)) throw ValidationError("battery: capacity must be positive");
  if (!(0.0 <= soc_min && soc_min <= soc_max && soc_max <= 1.0))
    throw ValidationError("battery: need 0 <= soc_min <= soc_max <= 1");
  if (!(soc_min <= soc && soc <= soc_max)) throw ValidationError("battery: soc outside [soc_min, soc_max]");
  if (std::abs(energy_e - soc * capacity_c) > 1e-9 * std::max(1.0, capacity_c))
    throw ValidationError("battery: energy inconsistent with soc");
  if (!(p_min_b <= 0.0 && 0.0 <= p_max_b)) throw ValidationError("battery: need p_min_b <= 0 <= p_max_b");
  if (!(r_min < 0.0 && r_max > 0.0)) throw ValidationError("battery: need r_min < 0 < r_max");
}

BatteryLimitsOut battery_limits(const BatteryState& s, double dt_s, Mode mode, double p_avail) {
  if (!(dt_s > 0.0)) throw std::invalid_argument("battery_limits: dt must be positive");
  const double c_h1 = units::power_for_energy_kw(s.e_max - s.energy_e, dt_s);
  const double c_h2 = s.p_max_b;
  const double c_l1 = units::power_for_energy_kw(s.e_min - s.energy_e, dt_s);
  const double c_l2 = s.p_min_b;

  BatteryLimitsOut out;
  out.lower = std::max(c_l1, c_l2);
  out.upper = std::min(c_h1, c_h2);
  if (mode == Mode::Discharging) out.upper = std::min(out.upper, p_avail);
  if (out.lower > out.upper)
    throw InconsistentStateError("battery limits: lower " + std::to_string(out.lower) + " kW exceeds upper " +
                                 std::to_string(out.upper) + " kW");
  return out;
}

BatteryStep battery_step(const BatteryState& s, double p_b, double dt_s, Mode mode) {
  if (p_b < 0.0) throw std::invalid_argument("battery_step: power must be non-negative");
  const double signed_p = mode == Mode::Charging ? p_b : -p_b;
  BatteryStep out{s, false};
  double e = s.energy_e + units::energy_kwh(signed_p, dt_s);
  if (e > s.e_max) {
    e = s.e_max;
    out.clamped = true;
  } else if (e < s.e_min) {
    e = s.e_min;
    out.clamped = true;
  }
  out.state.energy_e = e;
  out.state.soc = e / s.capacity_c;
  return out;
}

}  // namespace hpfo
