#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "hpfo/controller.hpp"
#include "hpfo/plants.hpp"
#include "hpfo/profile.hpp"
#include "hpfo/qp.hpp"

namespace hpfo {

/// Everything the closed loop needs, already in library units.
struct SimSetup {
  WindModel wind;
  SolarModel solar;
  PlantLimits limits;
  BatteryState battery;
  /// Power the battery may hand to the load, kW (upper bound while discharging).
  double battery_p_avail = 20000.0;
  ControllerConfig controller;
  CostConfig cost;  // gains and mode; demand comes from the profile
  DisturbanceProfile profile;
  double dt_plant = 0.01;       // s
  int controller_ratio = 3;     // controller step = ratio * dt_plant
  double horizon_s = 600.0;
  ControlVector u0;
};

struct SimRecord {
  double t = 0.0;  // start of the plant step
  ControlVector u;
  MeasurementVector y;
  Availability avail;
  double soc = 0.0;
  double energy_kwh = 0.0;  // after the step
  double demand_kw = 0.0;
  /// Set on steps where the controller updated u before the plants ran.
  std::optional<qp::QpStatus> qp_status;
  int active_set_size = 0;
  double tracking_error_kw = 0.0;  // delivered - demand
  bool battery_clamped = false;
};

struct SimLog {
  Mode mode = Mode::Discharging;
  double dt_plant = 0.01;
  double initial_energy_kwh = 0.0;
  std::vector<SimRecord> records;
};

/// Closed-loop co-simulation. The controller update at plant step k uses the
/// measurements, availability, battery bounds and demand of step k-1 and is
/// held until the next update. Errors are rethrown as SimulationError.
SimLog run(const SimSetup& setup);

/// One row per record, fixed columns, 6 significant digits.
void write_log_csv(std::ostream& out, const SimLog& log);

/// Signed energy moved by the plant over the log, kWh.
double logged_energy_throughput(const SimLog& log);

}  // namespace hpfo
