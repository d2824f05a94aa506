#include "hpfo/cosim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "hpfo/error.hpp"
#include "hpfo/units.hpp"

namespace hpfo {

SimLog run(const SimSetup& s) {
  if (!(s.dt_plant > 0.0)) throw ValidationError("sim: dt_plant must be positive");
  if (s.controller_ratio < 1) throw ValidationError("sim: controller ratio must be at least 1");
  if (!(s.horizon_s >= 0.0)) throw ValidationError("sim: horizon must be non-negative");

  const Mode mode = s.cost.mode;
  const double dt_ctrl = s.controller.dt;
  SimLog log;
  log.mode = mode;
  log.dt_plant = s.dt_plant;
  log.initial_energy_kwh = s.battery.energy_e;

  const auto steps = static_cast<long>(std::llround(s.horizon_s / s.dt_plant));
  log.records.reserve(static_cast<std::size_t>(steps));

  FeedbackController ctrl(s.controller, s.cost, s.u0);
  BatteryState battery = s.battery;

  MeasurementVector y_prev;
  Availability avail_prev;
  BatteryLimitsOut batt_prev;
  double demand_prev = 0.0;

  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * s.dt_plant;
    try {
      const auto d = s.profile.at(t);
      Availability avail;
      avail.wind = available_wind_power(d.wind_ms, s.wind);
      avail.solar = available_solar_power(total_irradiance(d.dni_wm2, d.dhi_wm2, s.solar), d.tair_c, s.solar);
      const BatteryLimitsOut batt = battery_limits(battery, dt_ctrl, mode, s.battery_p_avail);

      SimRecord rec;
      if (k > 0 && k % s.controller_ratio == 0) {
        const ConstraintSet cs = assemble_constraints(mode, s.limits, avail_prev.wind, avail_prev.solar, batt_prev);
        ctrl.set_demand(demand_prev);
        ctrl.step(y_prev, cs);
        rec.qp_status = ctrl.last_status();
        rec.active_set_size = ctrl.last_active_count();
      }

      rec.t = t;
      rec.u = ctrl.u();
      rec.y = plant_outputs(rec.u, avail, mode, batt);
      const BatteryStep next = battery_step(battery, battery_power(rec.y, mode), s.dt_plant, mode);
      battery = next.state;
      rec.avail = avail;
      rec.soc = battery.soc;
      rec.energy_kwh = battery.energy_e;
      rec.demand_kw = d.demand_kw;
      rec.tracking_error_kw = rec.y.delivered() - d.demand_kw;
      rec.battery_clamped = next.clamped;
      log.records.push_back(rec);

      y_prev = rec.y;
      avail_prev = avail;
      batt_prev = batt;
      demand_prev = d.demand_kw;
    } catch (const SimulationError&) {
      throw;
    } catch (const Error& e) {
      throw SimulationError(e.what(), t);
    }
  }
  return log;
}

void write_log_csv(std::ostream& out, const SimLog& log) {
  out << "t_s,u_w_dl_kw,u_s_dl_kw,u_b_dl_kw,u_w_db_kw,u_s_db_kw,"
         "y_wl_kw,y_wb_kw,y_sl_kw,y_sb_kw,y_b_kw,"
         "avail_w_kw,avail_s_kw,soc,energy_kwh,demand_kw,delivered_kw,tracking_error_kw,"
         "qp_status,active_set_size,battery_clamped\n";
  char buf[512];
  for (const SimRecord& r : log.records) {
    const char* status = r.qp_status ? qp::to_string(*r.qp_status) : "held";
    std::snprintf(buf, sizeof buf,
                  "%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%s,%d,%d\n",
                  r.t, r.u.p_w_dl, r.u.p_s_dl, r.u.p_b_dl, r.u.p_w_db, r.u.p_s_db, r.y.p_wl, r.y.p_wb, r.y.p_sl,
                  r.y.p_sb, r.y.p_b, r.avail.wind, r.avail.solar, r.soc, r.energy_kwh, r.demand_kw, r.y.delivered(),
                  r.tracking_error_kw, status, r.active_set_size, r.battery_clamped ? 1 : 0);
    out << buf;
  }
}

double logged_energy_throughput(const SimLog& log) {
  double total = 0.0;
  const double sign = log.mode == Mode::Charging ? 1.0 : -1.0;
  for (const SimRecord& r : log.records) total += units::energy_kwh(sign * battery_power(r.y, log.mode), log.dt_plant);
  return total;
}

}  // namespace hpfo
