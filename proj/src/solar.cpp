#include <algorithm>

#include "hpfo/error.hpp"
#include "hpfo/plants.hpp"
#include "hpfo/units.hpp"

namespace hpfo {

void SolarModel::validate() const {
  if (!(a_pv > 0.0)) throw ValidationError("solar: a_pv must be positive");
  if (!(eta_ref > 0.0 && eta_ref < 1.0)) throw ValidationError("solar: eta_ref must be in (0, 1)");
  if (!(r_b >= 0.0 && r_d >= 0.0 && r_r >= 0.0)) throw ValidationError("solar: tilt factors must be non-negative");
  if (!(rated_power > 0.0)) throw ValidationError("solar: rated_power must be positive");
}

double SolarModel::efficiency(double t_air) const {
  return std::max(0.0, eta_ref * (1.0 - temp_coeff * (t_air - t_ref)));
}

double total_irradiance(double i_b, double i_d, const SolarModel& m) {
  return i_b * m.r_b + i_d * m.r_d + (i_b + i_d) * m.r_r;
}

double available_solar_power(double i_t, double t_air, const SolarModel& m) {
  const double p = units::watts_to_kw(std::max(0.0, i_t) * m.efficiency(t_air) * m.a_pv);
  return std::min(p, m.rated_power);
}

double solar_output(double setpoint, double i_t, double t_air, const SolarModel& m) {
  return std::min(setpoint, available_solar_power(i_t, t_air, m));
}

}  // namespace hpfo
