#include "hpfo/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "hpfo/error.hpp"
#include "hpfo/units.hpp"

namespace hpfo {

namespace fs = std::filesystem;

ScenarioConfig ScenarioConfig::defaults(Mode mode) {
  ScenarioConfig c;
  c.controller.battery_mode = mode;
  const CostConfig preset = CostConfig::preset(mode);
  c.cost = {preset.q_r, preset.q_b};
  if (mode == Mode::Charging) {
    c.profiles.wind_mean_ms = 8.0;
    c.profiles.demand_base_kw = 50000.0;
    c.profiles.demand_variation_kw = 0.0;
    c.profiles.dni_start_wm2 = 600.0;
    c.profiles.dni_end_wm2 = 1000.0;
    c.profiles.dhi_wm2 = 100.0;
    c.summary.max_rmse_pct = 2.0;
  }
  return c;
}

void ScenarioConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("config: ") + what);
  };
  const Plant& p = plant;
  need(p.num_turbines >= 1, "plant.num_turbines must be >= 1");
  need(p.wind_capacity_mw > 0.0, "plant.wind_capacity_mw must be positive");
  need(p.solar_capacity_mw > 0.0, "plant.solar_capacity_mw must be positive");
  need(p.battery_capacity_mw > 0.0, "plant.battery_capacity_mw must be positive");
  need(p.battery_duration_h > 0.0, "plant.battery_duration_h must be positive");
  need(0.0 <= p.battery_soc_min && p.battery_soc_min < p.battery_soc_max && p.battery_soc_max <= 1.0,
       "need 0 <= plant.battery_soc_min < plant.battery_soc_max <= 1");
  need(p.battery_soc >= p.battery_soc_min && p.battery_soc <= p.battery_soc_max,
       "plant.battery_soc must lie within [soc_min, soc_max]");
  need(p.battery_ramp_kw_s > 0.0, "plant.battery_ramp_kw_s must be positive");
  need(p.battery_p_avail_kw >= 0.0, "plant.battery_p_avail_kw must be >= 0");
  need(p.rotor_diameter_m > 0.0, "plant.rotor_diameter_m must be positive");
  need(p.air_density > 0.0, "plant.air_density must be positive");
  need(0.0 <= p.cut_in_ms && p.cut_in_ms < p.cut_out_ms, "need 0 <= plant.cut_in_ms < plant.cut_out_ms");
  need(p.wake_factor > 0.0 && p.wake_factor <= 1.0, "plant.wake_factor must be in (0, 1]");
  need(p.solar_area_m2 > 0.0, "plant.solar_area_m2 must be positive");
  need(p.solar_eta_ref > 0.0 && p.solar_eta_ref <= 1.0, "plant.solar_eta_ref must be in (0, 1]");
  need(p.solar_r_b >= 0.0 && p.solar_r_d >= 0.0 && p.solar_r_r >= 0.0, "plant.solar_r_* must be >= 0");

  std::set<std::string> comps(controller.components.begin(), controller.components.end());
  need(comps.size() == controller.components.size() &&
           comps == std::set<std::string>{"wind", "solar", "battery"},
       "controller.components must be exactly wind, solar, battery");
  need(controller.dt > 0.0, "controller.dt must be positive");
  need(controller.eta > 0.0, "controller.eta must be positive");
  need(controller.beta > 0.0, "controller.beta must be positive");
  need(controller.rate_limit_wind_kw_s > 0.0, "controller.rate_limit_wind_kw_s must be positive");
  need(controller.rate_limit_solar_kw_s > 0.0, "controller.rate_limit_solar_kw_s must be positive");

  limits.validate();
  need(limits.p_max_w <= units::mw_to_kw(p.wind_capacity_mw), "limits.p_max_w exceeds the wind capacity");
  need(limits.p_max_s <= units::mw_to_kw(p.solar_capacity_mw), "limits.p_max_s exceeds the solar capacity");
  need(limits.p_max_b <= units::mw_to_kw(p.battery_capacity_mw),
       "limits.p_max_b exceeds the battery capacity");
  need(-limits.p_min_b <= units::mw_to_kw(p.battery_capacity_mw),
       "limits.p_min_b exceeds the battery capacity");

  need(cost.q_r > 0.0, "cost.q_r must be positive");
  need(cost.q_b >= 0.0, "cost.q_b must be >= 0");

  need(sim.dt_plant > 0.0, "sim.dt_plant must be positive");
  const double ratio = controller.dt / sim.dt_plant;
  need(ratio >= 1.0 - 1e-9 && std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio,
       "controller.dt must be a whole multiple of sim.dt_plant");
  need(sim.horizon_s >= 0.0 && std::isfinite(sim.horizon_s), "sim.horizon_s must be >= 0");

  need(profiles.wind_mean_ms > 0.0, "profiles.wind_mean_ms must be positive");
  need(profiles.demand_base_kw >= 0.0, "profiles.demand_base_kw must be >= 0");
  need(profiles.demand_variation_kw >= 0.0 && profiles.demand_variation_kw <= profiles.demand_base_kw,
       "profiles.demand_variation_kw must be in [0, demand_base_kw]");
  need(profiles.demand_period_s > 0.0, "profiles.demand_period_s must be positive");
  need(profiles.dni_start_wm2 >= 0.0 && profiles.dni_end_wm2 >= 0.0 && profiles.dhi_wm2 >= 0.0,
       "profiles irradiance must be >= 0");

  need(summary.settle_s >= 0.0, "summary.settle_s must be >= 0");
  need(summary.max_rmse_pct > 0.0, "summary.max_rmse_pct must be positive");
}

// ---------------------------------------------------------------- text format

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Mode parse_mode(const std::string& v) {
  if (v == "charge") return Mode::Charging;
  if (v == "discharge") return Mode::Discharging;
  throw ValidationError("config: controller.battery_mode must be charge or discharge, got '" + v + "'");
}

struct Field {
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

// `ref` maps a config to the member it names.
template <class Ref>
Field number(Ref ref) {
  return {[ref](ScenarioConfig& c, const std::string& v) {
            double x = 0.0;
            const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(x))
              throw std::invalid_argument("not a finite number: '" + v + "'");
            ref(c) = x;
          },
          [ref](const ScenarioConfig& c) { return fmt_double(ref(const_cast<ScenarioConfig&>(c))); }};
}

template <class T, class Ref>
Field integer(Ref ref) {
  return {[ref](ScenarioConfig& c, const std::string& v) {
            T x{};
            const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc() || end != v.data() + v.size())
              throw std::invalid_argument("not an integer: '" + v + "'");
            ref(c) = x;
          },
          [ref](const ScenarioConfig& c) { return std::to_string(ref(const_cast<ScenarioConfig&>(c))); }};
}

template <class Ref>
Field text(Ref ref) {
  return {[ref](ScenarioConfig& c, const std::string& v) { ref(c) = v; },
          [ref](const ScenarioConfig& c) { return ref(const_cast<ScenarioConfig&>(c)); }};
}

#define HPFO_REF(member) [](ScenarioConfig& c) -> auto& { return c.member; }

// Key order here is the order write_config emits.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"plant.num_turbines", integer<int>(HPFO_REF(plant.num_turbines))},
      {"plant.wind_capacity_mw", number(HPFO_REF(plant.wind_capacity_mw))},
      {"plant.solar_capacity_mw", number(HPFO_REF(plant.solar_capacity_mw))},
      {"plant.battery_capacity_mw", number(HPFO_REF(plant.battery_capacity_mw))},
      {"plant.battery_duration_h", number(HPFO_REF(plant.battery_duration_h))},
      {"plant.battery_soc", number(HPFO_REF(plant.battery_soc))},
      {"plant.battery_soc_min", number(HPFO_REF(plant.battery_soc_min))},
      {"plant.battery_soc_max", number(HPFO_REF(plant.battery_soc_max))},
      {"plant.battery_ramp_kw_s", number(HPFO_REF(plant.battery_ramp_kw_s))},
      {"plant.battery_p_avail_kw", number(HPFO_REF(plant.battery_p_avail_kw))},
      {"plant.rotor_diameter_m", number(HPFO_REF(plant.rotor_diameter_m))},
      {"plant.air_density", number(HPFO_REF(plant.air_density))},
      {"plant.cut_in_ms", number(HPFO_REF(plant.cut_in_ms))},
      {"plant.cut_out_ms", number(HPFO_REF(plant.cut_out_ms))},
      {"plant.wake_factor", number(HPFO_REF(plant.wake_factor))},
      {"plant.cp_table", text(HPFO_REF(plant.cp_table))},
      {"plant.solar_area_m2", number(HPFO_REF(plant.solar_area_m2))},
      {"plant.solar_eta_ref", number(HPFO_REF(plant.solar_eta_ref))},
      {"plant.solar_temp_coeff", number(HPFO_REF(plant.solar_temp_coeff))},
      {"plant.solar_t_ref_c", number(HPFO_REF(plant.solar_t_ref_c))},
      {"plant.solar_r_b", number(HPFO_REF(plant.solar_r_b))},
      {"plant.solar_r_d", number(HPFO_REF(plant.solar_r_d))},
      {"plant.solar_r_r", number(HPFO_REF(plant.solar_r_r))},
      {"controller.dt", number(HPFO_REF(controller.dt))},
      {"controller.components",
       {[](ScenarioConfig& c, const std::string& v) {
          c.controller.components.clear();
          std::stringstream ss(v);
          std::string item;
          while (std::getline(ss, item, ',')) c.controller.components.push_back(trim(item));
        },
        [](const ScenarioConfig& c) {
          std::string out;
          for (const auto& s : c.controller.components) out += (out.empty() ? "" : ", ") + s;
          return out;
        }}},
      {"controller.battery_mode",
       {[](ScenarioConfig& c, const std::string& v) { c.controller.battery_mode = parse_mode(v); },
        [](const ScenarioConfig& c) { return std::string(to_string(c.controller.battery_mode)); }}},
      {"controller.eta", number(HPFO_REF(controller.eta))},
      {"controller.beta", number(HPFO_REF(controller.beta))},
      {"controller.rate_limit_wind_kw_s", number(HPFO_REF(controller.rate_limit_wind_kw_s))},
      {"controller.rate_limit_solar_kw_s", number(HPFO_REF(controller.rate_limit_solar_kw_s))},
      {"limits.p_max_w", number(HPFO_REF(limits.p_max_w))},
      {"limits.p_max_s", number(HPFO_REF(limits.p_max_s))},
      {"limits.p_max_b", number(HPFO_REF(limits.p_max_b))},
      {"limits.p_min_w", number(HPFO_REF(limits.p_min_w))},
      {"limits.p_min_s", number(HPFO_REF(limits.p_min_s))},
      {"limits.p_min_b", number(HPFO_REF(limits.p_min_b))},
      {"cost.q_r", number(HPFO_REF(cost.q_r))},
      {"cost.q_b", number(HPFO_REF(cost.q_b))},
      {"sim.dt_plant", number(HPFO_REF(sim.dt_plant))},
      {"sim.horizon_s", number(HPFO_REF(sim.horizon_s))},
      {"sim.seed", integer<std::uint64_t>(HPFO_REF(sim.seed))},
      {"profiles.file", text(HPFO_REF(profiles.file))},
      {"profiles.wind_mean_ms", number(HPFO_REF(profiles.wind_mean_ms))},
      {"profiles.demand_base_kw", number(HPFO_REF(profiles.demand_base_kw))},
      {"profiles.demand_variation_kw", number(HPFO_REF(profiles.demand_variation_kw))},
      {"profiles.demand_period_s", number(HPFO_REF(profiles.demand_period_s))},
      {"profiles.dni_start_wm2", number(HPFO_REF(profiles.dni_start_wm2))},
      {"profiles.dni_end_wm2", number(HPFO_REF(profiles.dni_end_wm2))},
      {"profiles.dhi_wm2", number(HPFO_REF(profiles.dhi_wm2))},
      {"profiles.tair_c", number(HPFO_REF(profiles.tair_c))},
      {"summary.settle_s", number(HPFO_REF(summary.settle_s))},
      {"summary.max_rmse_pct", number(HPFO_REF(summary.max_rmse_pct))},
  };
  return table;
}

#undef HPFO_REF

const Field* find_field(const std::string& key) {
  for (const auto& [name, f] : fields())
    if (name == key) return &f;
  return nullptr;
}

std::string resolve(const std::string& path, const fs::path& base_dir) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (base_dir / path).lexically_normal().string();
}

}  // namespace

ScenarioConfig parse_config(std::istream& in, const fs::path& base_dir) {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> entries;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineno) + ": expected key = value", lineno);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (!find_field(key))
      throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'", lineno);
    if (entries.count(key))
      throw ParseError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'", lineno);
    entries[key] = {trim(std::string_view(line).substr(eq + 1)), lineno};
  }

  Mode mode = Mode::Discharging;
  if (auto it = entries.find("controller.battery_mode"); it != entries.end()) mode = parse_mode(it->second.value);
  ScenarioConfig c = ScenarioConfig::defaults(mode);

  for (const auto& [key, e] : entries) {
    try {
      find_field(key)->set(c, e.value);
    } catch (const std::invalid_argument& ex) {
      throw ParseError("config line " + std::to_string(e.line) + ": " + key + ": " + ex.what(), e.line);
    }
  }

  // Limits and the battery's deliverable power follow the capacities unless given.
  auto unset = [&](const char* key) { return entries.count(key) == 0; };
  if (unset("limits.p_max_w")) c.limits.p_max_w = units::mw_to_kw(c.plant.wind_capacity_mw);
  if (unset("limits.p_max_s")) c.limits.p_max_s = units::mw_to_kw(c.plant.solar_capacity_mw);
  if (unset("limits.p_max_b")) c.limits.p_max_b = units::mw_to_kw(c.plant.battery_capacity_mw);
  if (unset("limits.p_min_b")) c.limits.p_min_b = -units::mw_to_kw(c.plant.battery_capacity_mw);
  if (unset("plant.battery_p_avail_kw")) c.plant.battery_p_avail_kw = c.limits.p_max_b;

  c.plant.cp_table = resolve(c.plant.cp_table, base_dir);
  c.profiles.file = resolve(c.profiles.file, base_dir);
  c.validate();
  return c;
}

ScenarioConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path.string(), 0);
  return parse_config(in, path.parent_path());
}

void write_config(std::ostream& out, const ScenarioConfig& c) {
  std::string section;
  for (const auto& [key, f] : fields()) {
    const std::string sec = key.substr(0, key.find('.'));
    if (sec != section) {
      if (!section.empty()) out << '\n';
      section = sec;
    }
    const std::string v = f.get(c);
    out << key << " =" << (v.empty() ? "" : " ") << v << '\n';
  }
}

// ---------------------------------------------------------------- setup

DisturbanceProfile build_profile(const ScenarioConfig& c) {
  ProfileColumns cols;
  if (!c.profiles.file.empty()) cols = read_profile_csv(c.profiles.file);
  const auto& pr = c.profiles;
  // Synthesis needs a nonzero span even for empty runs.
  const double h = std::max(c.sim.horizon_s, 1.0);
  DisturbanceProfile p;
  p.wind_ms = cols.wind_ms ? *cols.wind_ms : synth_wind_profile(pr.wind_mean_ms, h, c.sim.seed);
  p.dni_wm2 = cols.dni_wm2 ? *cols.dni_wm2 : ramp_profile(pr.dni_start_wm2, pr.dni_end_wm2, h);
  p.dhi_wm2 = cols.dhi_wm2 ? *cols.dhi_wm2 : TimeSeries::constant(pr.dhi_wm2);
  p.tair_c = cols.tair_c ? *cols.tair_c : TimeSeries::constant(pr.tair_c);
  p.demand_kw = cols.demand_kw ? *cols.demand_kw
                               : synth_demand_profile(pr.demand_base_kw, pr.demand_variation_kw,
                                                      pr.demand_period_s, h, c.sim.seed + 1);
  return p;
}

SimSetup make_setup(const ScenarioConfig& c) {
  c.validate();
  const auto& pl = c.plant;
  SimSetup s;
  s.wind.n_t = pl.num_turbines;
  s.wind.rho = pl.air_density;
  s.wind.rotor_area = std::numbers::pi * 0.25 * pl.rotor_diameter_m * pl.rotor_diameter_m;
  if (!pl.cp_table.empty()) s.wind.cp = CpCurve::load(pl.cp_table);
  s.wind.rated_power = units::mw_to_kw(pl.wind_capacity_mw) / pl.num_turbines;
  s.wind.cut_in = pl.cut_in_ms;
  s.wind.cut_out = pl.cut_out_ms;
  s.wind.wake_factor = pl.wake_factor;
  s.wind.validate();

  s.solar.a_pv = pl.solar_area_m2;
  s.solar.eta_ref = pl.solar_eta_ref;
  s.solar.temp_coeff = pl.solar_temp_coeff;
  s.solar.t_ref = pl.solar_t_ref_c;
  s.solar.r_b = pl.solar_r_b;
  s.solar.r_d = pl.solar_r_d;
  s.solar.r_r = pl.solar_r_r;
  s.solar.rated_power = units::mw_to_kw(pl.solar_capacity_mw);
  s.solar.validate();

  s.limits = c.limits;
  s.battery = BatteryState::make(units::mw_to_kw(pl.battery_capacity_mw) * pl.battery_duration_h, pl.battery_soc,
                                 pl.battery_soc_min, pl.battery_soc_max, c.limits.p_max_b, c.limits.p_min_b,
                                 -pl.battery_ramp_kw_s, pl.battery_ramp_kw_s);
  s.battery_p_avail = pl.battery_p_avail_kw;

  s.controller.dt = c.controller.dt;
  s.controller.eta = c.controller.eta;
  s.controller.beta = c.controller.beta;
  const double rw = c.controller.rate_limit_wind_kw_s;
  const double rs = c.controller.rate_limit_solar_kw_s;
  s.controller.rate_limit = Vector5(rw, rs, pl.battery_ramp_kw_s, rw, rs);

  s.cost = {c.cost.q_r, c.cost.q_b, 0.0, c.controller.battery_mode};
  s.profile = build_profile(c);
  s.dt_plant = c.sim.dt_plant;
  s.controller_ratio = static_cast<int>(std::lround(c.controller.dt / c.sim.dt_plant));
  s.horizon_s = c.sim.horizon_s;
  return s;
}

// ---------------------------------------------------------------- outputs

ScenarioSummary summarize(const SimLog& log, const ScenarioConfig& c) {
  ScenarioSummary s;
  s.steps = log.records.size();
  s.settle_s = c.summary.settle_s;
  const double capacity = units::mw_to_kw(c.plant.battery_capacity_mw) * c.plant.battery_duration_h;
  s.energy_start_kwh = log.initial_energy_kwh;
  s.soc_start = log.initial_energy_kwh / capacity;
  s.energy_end_kwh = log.records.empty() ? log.initial_energy_kwh : log.records.back().energy_kwh;
  s.soc_end = s.energy_end_kwh / capacity;

  // Fall back to the whole run when it is shorter than the settle window.
  const bool any_settled = std::any_of(log.records.begin(), log.records.end(),
                                       [&](const SimRecord& r) { return r.t >= c.summary.settle_s; });
  double sq = 0.0;
  double demand = 0.0;
  std::size_t n = 0;
  std::size_t updates = 0;
  std::size_t optimal = 0;
  double prev = log.initial_energy_kwh;
  for (const auto& r : log.records) {
    if (!any_settled || r.t >= c.summary.settle_s) {
      sq += r.tracking_error_kw * r.tracking_error_kw;
      demand += r.demand_kw;
      s.max_abs_error_kw = std::max(s.max_abs_error_kw, std::abs(r.tracking_error_kw));
      ++n;
    }
    if (r.qp_status) {
      ++updates;
      if (*r.qp_status == qp::QpStatus::Optimal) ++optimal;
    }
    if (log.mode == Mode::Charging ? r.energy_kwh < prev : r.energy_kwh > prev) s.energy_monotone = false;
    prev = r.energy_kwh;
    if (r.battery_clamped) ++s.battery_clamps;
  }
  if (!any_settled) s.settle_s = 0.0;
  if (n > 0) {
    s.rmse_kw = std::sqrt(sq / static_cast<double>(n));
    s.mean_demand_kw = demand / static_cast<double>(n);
  }
  s.rmse_pct = s.mean_demand_kw > 0.0 ? 100.0 * s.rmse_kw / s.mean_demand_kw : (s.rmse_kw > 0.0 ? INFINITY : 0.0);
  s.qp_optimal_pct = updates > 0 ? 100.0 * static_cast<double>(optimal) / static_cast<double>(updates) : 100.0;
  s.thresholds_met = s.rmse_pct <= c.summary.max_rmse_pct;
  return s;
}

void write_summary(std::ostream& out, const ScenarioSummary& s, const ScenarioConfig& c) {
  char buf[512];
  auto line = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out << buf << '\n';
  };
  line("mode: %s", std::string(to_string(c.controller.battery_mode)).c_str());
  line("seed: %llu", static_cast<unsigned long long>(c.sim.seed));
  line("horizon_s: %.6g", c.sim.horizon_s);
  line("plant_steps: %zu", s.steps);
  line("settle_s: %.6g", s.settle_s);
  line("mean_demand_kw: %.6g", s.mean_demand_kw);
  line("tracking_rmse_kw: %.6g", s.rmse_kw);
  line("tracking_rmse_pct: %.6g", s.rmse_pct);
  line("max_abs_error_kw: %.6g", s.max_abs_error_kw);
  line("soc_start: %.6g", s.soc_start);
  line("soc_end: %.6g", s.soc_end);
  line("energy_start_kwh: %.10g", s.energy_start_kwh);
  line("energy_end_kwh: %.10g", s.energy_end_kwh);
  line("energy_monotone: %s", s.energy_monotone ? "yes" : "no");
  line("battery_clamps: %zu", s.battery_clamps);
  line("qp_optimal_pct: %.6g", s.qp_optimal_pct);
  line("max_rmse_pct: %.6g", c.summary.max_rmse_pct);
  line("thresholds_met: %s", s.thresholds_met ? "yes" : "no");
}

void write_plot_files(const fs::path& dir, const SimLog& log) {
  std::ofstream total(dir / "plot_total_vs_demand.csv");
  std::ofstream comp(dir / "plot_components.csv");
  std::ofstream avail(dir / "plot_availability.csv");
  if (!total || !comp || !avail) throw Error("cannot write plot files in " + dir.string());
  total << "t_s,demand_kw,delivered_kw,tracking_error_kw\n";
  comp << "t_s,wind_to_load_kw,solar_to_load_kw,battery_to_load_kw,wind_to_battery_kw,solar_to_battery_kw,soc\n";
  avail << "t_s,avail_w_kw,avail_s_kw,wind_delivered_kw,solar_delivered_kw\n";
  char buf[256];
  for (const auto& r : log.records) {
    const auto& y = r.y;
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%.6g\n", r.t, r.demand_kw, y.delivered(), r.tracking_error_kw);
    total << buf;
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n", r.t, y.p_wl, y.p_sl, y.p_b, y.p_wb, y.p_sb,
                  r.soc);
    comp << buf;
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%.6g,%.6g\n", r.t, r.avail.wind, r.avail.solar, y.p_wl + y.p_wb,
                  y.p_sl + y.p_sb);
    avail << buf;
  }
}

int run_scenario(const ScenarioConfig& c, const fs::path& out_dir, std::ostream& msg) {
  SimSetup setup;
  try {
    setup = make_setup(c);
  } catch (const Error& e) {
    msg << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  fs::create_directories(out_dir);
  SimLog log;
  try {
    log = run(setup);
  } catch (const SimulationError& e) {
    std::ofstream(out_dir / "summary.txt") << "status: error\nerror: " << e.what() << '\n';
    msg << "simulation error: " << e.what() << '\n';
    return kExitSimulation;
  }
  {
    std::ofstream out(out_dir / "log.csv");
    write_log_csv(out, log);
    if (!out) throw Error("cannot write " + (out_dir / "log.csv").string());
  }
  const ScenarioSummary s = summarize(log, c);
  {
    std::ofstream out(out_dir / "summary.txt");
    out << "status: ok\n";
    write_summary(out, s, c);
  }
  write_plot_files(out_dir, log);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: rmse %.4g kW (%.3g%% of demand, limit %.3g%%), soc %.4f -> %.4f, %s\n",
                std::string(to_string(c.controller.battery_mode)).c_str(), s.rmse_kw, s.rmse_pct,
                c.summary.max_rmse_pct, s.soc_start, s.soc_end, s.thresholds_met ? "ok" : "THRESHOLD MISSED");
  msg << buf;
  return s.thresholds_met ? kExitOk : kExitThresholds;
}

void synth_profiles(const ScenarioConfig& c, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream out(out_dir / "profiles.csv");
  if (!out) throw Error("cannot write " + (out_dir / "profiles.csv").string());
  write_profile_csv(out, build_profile(c), c.sim.horizon_s, 1.0);
}

}  // namespace hpfo
