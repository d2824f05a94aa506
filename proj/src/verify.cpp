#include "hpfo/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace hpfo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

ConstraintSet frozen_constraints(const FrozenProblem& p) {
  return assemble_constraints(p.cost.mode, p.limits, p.avail.wind, p.avail.solar, p.battery);
}

}  // namespace

void print_check(std::ostream& out, const CheckResult& r) {
  out << format("%s %-22s worst=%.3e tol=%.1e margin=%.3g %.2fs", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.worst,
                r.tolerance, r.worst > 0.0 ? r.tolerance / r.worst : INFINITY, r.seconds);
  if (!r.detail.empty()) out << "  " << r.detail;
  out << '\n';
}

FrozenProblem random_frozen_problem(std::mt19937_64& rng, Mode mode, const PlantLimits& limits) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  FrozenProblem p;
  p.limits = limits;
  p.avail.wind = limits.p_max_w * u01(rng);
  p.avail.solar = limits.p_max_s * u01(rng);
  const double pick = u01(rng);
  if (pick < 0.2) p.avail.wind = 0.0;
  else if (pick < 0.4) p.avail.solar = 0.0;
  p.battery = {limits.p_min_b, limits.p_max_b * u01(rng)};
  p.cost = CostConfig::preset(mode, (limits.p_max_w + limits.p_max_s) * u01(rng));
  return p;
}

ControllerConfig settling_gains(const CostConfig& cost) {
  // Charging pins the battery-to-load channel, leaving two load channels.
  const double k = cost.mode == Mode::Charging ? 2.0 : 3.0;
  ControllerConfig cfg;
  cfg.dt = 1.0;
  cfg.eta = 1.9 / (k * cost.q_r);
  cfg.beta = 1.0 / (cfg.eta * cfg.dt);
  cfg.rate_limit = Vector5::Constant(std::numeric_limits<double>::infinity());
  return cfg;
}

SettleResult settle(const FrozenProblem& p, const ControlVector& u0, const ControllerConfig& cfg, double theta_tol,
                    long max_steps) {
  const ConstraintSet cs = frozen_constraints(p);
  SettleResult out;
  out.u = clip_initial(u0, p.cost.mode);
  for (; out.steps < max_steps; ++out.steps) {
    const MeasurementVector y = plant_outputs(out.u, p.avail, p.cost.mode, p.battery);
    const FoStep s = fo_step_detailed(out.u, y, cs, cfg, p.cost);
    if (s.qp.status == qp::QpStatus::Infeasible) return out;
    out.theta_norm = s.qp.theta.norm();
    if (out.theta_norm <= theta_tol) {
      out.converged = true;
      return out;
    }
    out.u = s.u_next;
  }
  return out;
}

CheckResult check_oracle_equivalence(const EquivalenceOptions& opt, const PlantLimits& limits) {
  const auto t0 = Clock::now();
  CheckResult r;
  r.name = "oracle-equivalence";
  r.tolerance = opt.rel_tol;
  std::mt19937_64 rng(opt.seed);
  int compared = 0;
  int faces = 0;
  long steps = 0;
  std::string failures;
  for (Mode mode : {Mode::Charging, Mode::Discharging}) {
    for (int i = 0; i < opt.instances_per_mode; ++i) {
      const FrozenProblem p = random_frozen_problem(rng, mode, limits);
      const OracleResult o = solve_frozen_detailed(p);
      const SettleResult s = settle(p, {}, settling_gains(p.cost), opt.theta_tol, opt.max_steps);
      steps += s.steps;
      if (!s.converged) {
        r.worst = INFINITY;
        failures += format(" [%s #%d: no equilibrium after %ld steps, |theta|=%.3g]",
                           std::string(to_string(mode)).c_str(), i, s.steps, s.theta_norm);
        continue;
      }
      const Vector5 fo = s.u.to_vector();
      const Vector5 ref = o.u.to_vector();
      double err = 0.0;
      if (o.unique) {
        // Oracle coordinates within rounding of zero are zeros; those compare
        // absolutely on a 1 kW scale.
        const double zero = 1e-9 * (1.0 + ref.cwiseAbs().maxCoeff());
        for (int j = 0; j < 5; ++j) {
          const double d = std::abs(fo[j] - ref[j]);
          err = std::max(err, std::abs(ref[j]) > zero ? d / std::abs(ref[j]) : d);
        }
      } else {
        ++faces;
        err = std::abs(frozen_cost(p, s.u) - o.cost) / std::max(1.0, std::abs(o.cost));
        if (!frozen_feasible(p, s.u, 1e-6)) err = INFINITY;
        for (int j = 0; j < 5; ++j) {
          const double scale = std::max({1.0, std::abs(o.face_min[j]), std::abs(o.face_max[j])});
          const double outside = std::max({0.0, o.face_min[j] - fo[j], fo[j] - o.face_max[j]});
          err = std::max(err, outside / scale);
        }
      }
      if (!(err <= opt.rel_tol))
        failures += format(" [%s #%d: err %.3g]", std::string(to_string(mode)).c_str(), i, err);
      r.worst = std::max(r.worst, err);
      ++compared;
    }
  }
  r.passed = failures.empty() && compared == 2 * opt.instances_per_mode;
  r.detail = format("%d instances (%d on non-unique faces), %ld loop steps", compared, faces, steps) + failures;
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult check_forward_invariance(const InvarianceOptions& opt, const PlantLimits& limits) {
  const auto t0 = Clock::now();
  CheckResult r;
  r.name = "forward-invariance";
  r.tolerance = opt.tol_kw;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  long infeasible = 0;
  for (int start = 0; start < opt.starts; ++start) {
    const Mode mode = start % 2 ? Mode::Charging : Mode::Discharging;
    const FrozenProblem p = random_frozen_problem(rng, mode, limits);
    ControllerConfig cfg;
    cfg.eta = 0.5 + u01(rng);
    cfg.dt = 0.01 + 0.02 * u01(rng);
    cfg.beta = (0.01 + 0.99 * u01(rng)) / (cfg.eta * cfg.dt);
    cfg.rate_limit = Vector5::Constant(1000.0 + 9000.0 * u01(rng));
    const ConstraintSet cs = frozen_constraints(p);

    Vector5 v(u01(rng), u01(rng), u01(rng), u01(rng), u01(rng));
    v = clip_initial(ControlVector::from_vector(v * 40000.0), mode).to_vector();
    for (int row : {kRowWind, kRowSolar, kRowBatteryUpper}) {
      const double lhs = cs.a_ineq.row(row).dot(v);
      if (lhs > cs.b_ineq[row]) v *= cs.b_ineq[row] / lhs;
    }
    ControlVector u = ControlVector::from_vector(v);
    r.worst = std::max({r.worst, cs.max_violation(v), cs.max_equality_error(v)});
    for (long k = 0; k < opt.steps; ++k) {
      const MeasurementVector y = plant_outputs(u, p.avail, mode, p.battery);
      const FoStep s = fo_step_detailed(u, y, cs, cfg, p.cost);
      if (s.qp.status == qp::QpStatus::Infeasible) {
        ++infeasible;
        break;
      }
      u = s.u_next;
      const Vector5 uv = u.to_vector();
      r.worst = std::max({r.worst, cs.max_violation(uv), cs.max_equality_error(uv)});
    }
  }
  r.passed = r.worst <= opt.tol_kw && infeasible == 0;
  r.detail = format("%d starts x %ld steps", opt.starts, opt.steps);
  if (infeasible > 0) r.detail += format(", %ld infeasible QPs", infeasible);
  r.seconds = seconds_since(t0);
  return r;
}

CheckResult check_gradients(const GradientOptions& opt) {
  const auto t0 = Clock::now();
  CheckResult r;
  r.name = "gradient-check";
  r.tolerance = opt.rel_tol;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> power(0.0, 60000.0);
  std::uniform_real_distribution<double> gain(0.1, 100.0);
  struct Family {
    const char* name;
    bool random_gains;
    Mode mode;
  };
  // The generic tracking cost has the discharging form with free gains.
  const Family families[] = {{"generic", true, Mode::Discharging},
                             {"charging", false, Mode::Charging},
                             {"discharging", false, Mode::Discharging}};
  int evaluated = 0;
  for (const Family& f : families) {
    for (int i = 0; i < opt.points; ++i) {
      CostConfig c = CostConfig::preset(f.mode, power(rng) + 20000.0);
      if (f.random_gains) {
        c.q_r = gain(rng);
        c.q_b = gain(rng);
      }
      const Vector5 y(power(rng), power(rng), power(rng), power(rng), power(rng));
      const Vector5 g = cost_gradient(MeasurementVector::from_vector(y), c);
      for (int j = 0; j < 5; ++j) {
        // Central differences are exact on a quadratic, so a wide step only
        // trades truncation error (none) for less cancellation.
        const double h = 1e-2 * std::max(std::abs(y[j]), 1000.0);
        Vector5 plus = y;
        Vector5 minus = y;
        plus[j] += h;
        minus[j] -= h;
        const double fd = (cost_value(MeasurementVector::from_vector(plus), c) -
                           cost_value(MeasurementVector::from_vector(minus), c)) /
                          (2.0 * h);
        r.worst = std::max(r.worst, std::abs(fd - g[j]) / std::max(std::abs(g[j]), 1.0));
      }
      ++evaluated;
    }
  }
  r.passed = r.worst <= opt.rel_tol;
  r.detail = format("%d points over 3 cost functions", evaluated);
  r.seconds = seconds_since(t0);
  return r;
}

}  // namespace hpfo
