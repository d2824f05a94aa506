#pragma once

// All powers are kW, energies kWh, durations seconds. Conversions between
// them happen only through these helpers.

namespace hpfo::units {

inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kWattsPerKilowatt = 1000.0;
inline constexpr double kKilowattsPerMegawatt = 1000.0;

constexpr double seconds_to_hours(double seconds) { return seconds / kSecondsPerHour; }

/// Energy (kWh) moved by a constant power (kW) held for `seconds`.
constexpr double energy_kwh(double power_kw, double seconds) {
  return power_kw * seconds_to_hours(seconds);
}

/// Constant power (kW) that moves `energy` (kWh) in `seconds`.
constexpr double power_for_energy_kw(double energy, double seconds) {
  return energy / seconds_to_hours(seconds);
}

constexpr double watts_to_kw(double watts) { return watts / kWattsPerKilowatt; }
constexpr double mw_to_kw(double mw) { return mw * kKilowattsPerMegawatt; }
constexpr double kw_to_mw(double kw) { return kw / kKilowattsPerMegawatt; }

}  // namespace hpfo::units
