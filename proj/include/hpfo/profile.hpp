#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>

#include "hpfo/interpolation.hpp"

namespace hpfo {

/// Seeded uniform draws. Each draw takes the top 53 bits of one mt19937_64
/// output, so a given seed yields the same sequence on any platform.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  /// In [0, 1).
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 engine_;
};

/// Disturbances and demand, each linearly interpolated on its own grid.
struct DisturbanceProfile {
  TimeSeries wind_ms;   // ambient speed, m/s
  TimeSeries dni_wm2;   // beam irradiance
  TimeSeries dhi_wm2;   // diffuse irradiance
  TimeSeries tair_c;
  TimeSeries demand_kw;

  struct Sample {
    double wind_ms, dni_wm2, dhi_wm2, tair_c, demand_kw;
  };
  Sample at(double t) const;
};

/// Columns found in a profile CSV. Absent columns are left empty.
struct ProfileColumns {
  std::optional<TimeSeries> wind_ms;
  std::optional<TimeSeries> dni_wm2;
  std::optional<TimeSeries> dhi_wm2;
  std::optional<TimeSeries> tair_c;
  std::optional<TimeSeries> demand_kw;
};

/// Reads a CSV whose header names `t_s` plus any of wind_ms, dni_wm2,
/// dhi_wm2, tair_c, demand_kw. Throws ParseError.
ProfileColumns read_profile_csv(std::istream& in);
ProfileColumns read_profile_csv(const std::string& path);

/// Samples every signal on a uniform grid [0, horizon] and writes the full
/// six-column CSV.
void write_profile_csv(std::ostream& out, const DisturbanceProfile& p, double horizon_s, double step_s);

/// Wind speed with 10-minute block means mean + U(-2, 2) and one sample per
/// minute at block mean * (1 + U(-0.05, 0.05)), joined by a shape-preserving
/// cubic and sampled every second. All block offsets are drawn first, then
/// the per-minute factors, in time order.
TimeSeries synth_wind_profile(double mean_ms, double horizon_s, std::uint64_t seed);

/// Regulation-like demand: knots every period/2 alternating above and below
/// `base` by variation * U(0.5, 1), first knot above; shape-preserving cubic
/// between knots, sampled every second. variation = 0 gives a constant.
TimeSeries synth_demand_profile(double base_kw, double variation_kw, double period_s, double horizon_s,
                                std::uint64_t seed);

/// Straight line from `start` at t = 0 to `end` at t = horizon.
TimeSeries ramp_profile(double start, double end, double horizon_s);

}  // namespace hpfo
