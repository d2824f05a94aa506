#include "hpfo/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hpfo/error.hpp"

namespace hpfo {

std::string_view to_string(Mode mode) { return mode == Mode::Charging ? "charge" : "discharge"; }

CostConfig CostConfig::preset(Mode mode, double p_r) {
  if (mode == Mode::Charging) return {45.0, 2.0, p_r, mode};
  return {10.0, 80.0, p_r, mode};
}

void CostConfig::validate() const {
  if (!(q_r > 0.0)) throw ValidationError("cost: q_r must be positive");
  if (!(q_b >= 0.0)) throw ValidationError("cost: q_b must be non-negative");
  if (!(p_r >= 0.0)) throw ValidationError("cost: p_r must be non-negative");
}

void ControllerConfig::validate() const {
  if (!(eta > 0.0)) throw ValidationError("controller: eta must be positive");
  if (!(beta > 0.0)) throw ValidationError("controller: beta must be positive");
  if (!(dt > 0.0)) throw ValidationError("controller: dt must be positive");
  if (!(rate_limit.array() > 0.0).all()) throw ValidationError("controller: rate limits must be positive");
}

double ConstraintSet::max_violation(const Vector5& u) const {
  if (a_ineq.rows() == 0) return 0.0;
  return std::max(0.0, (a_ineq * u - b_ineq).maxCoeff());
}

double ConstraintSet::max_equality_error(const Vector5& u) const {
  if (a_eq.rows() == 0) return 0.0;
  return (a_eq * u - b_eq).cwiseAbs().maxCoeff();
}

double cost_value(const MeasurementVector& y, const CostConfig& cfg) {
  const double err = y.p_wl + y.p_sl + y.p_b - cfg.p_r;
  const double tracking = 0.5 * cfg.q_r * err * err;
  if (cfg.mode == Mode::Charging) return tracking - cfg.q_b * (y.p_wb + y.p_sb);
  return tracking + cfg.q_b * y.p_b;
}

Vector5 cost_gradient(const MeasurementVector& y, const CostConfig& cfg) {
  const double e = cfg.q_r * (y.p_wl + y.p_sl + y.p_b - cfg.p_r);
  if (cfg.mode == Mode::Charging) return {e, -cfg.q_b, e, -cfg.q_b, e};
  return {e, 0.0, e, 0.0, e + cfg.q_b};
}

Matrix5 sensitivity() { return Matrix5::Identity(); }

ConstraintSet assemble_constraints(Mode mode, const PlantLimits& limits, double p_bar_w, double p_bar_s,
                                   const BatteryLimitsOut& batt) {
  if (!(p_bar_w >= 0.0) || !(p_bar_s >= 0.0))
    throw std::invalid_argument("assemble_constraints: availability must be non-negative");
  if (batt.lower > batt.upper)
    throw InfeasibleBoxError("battery bounds: lower " + std::to_string(batt.lower) + " kW exceeds upper " +
                             std::to_string(batt.upper) + " kW");

  using Row = Eigen::Matrix<double, 1, 5>;
  const Row battery = mode == Mode::Discharging ? Row(0, 0, 1, 0, 0) : Row(0, 0, 0, 1, 1);
  const Row pinned = mode == Mode::Discharging ? Row(0, 0, 0, 1, 1) : Row(0, 0, 1, 0, 0);

  ConstraintSet cs;
  cs.a_ineq.setZero(kNumInequalityRows, 5);
  cs.b_ineq.setZero(kNumInequalityRows);
  cs.a_ineq.row(kRowWind) << 1, 0, 0, 1, 0;
  cs.b_ineq[kRowWind] = std::min(limits.p_max_w, p_bar_w);
  cs.a_ineq.row(kRowSolar) << 0, 1, 0, 0, 1;
  cs.b_ineq[kRowSolar] = std::min(limits.p_max_s, p_bar_s);
  cs.a_ineq.row(kRowBatteryUpper) = battery;
  cs.b_ineq[kRowBatteryUpper] = batt.upper;
  cs.a_ineq.row(kRowBatteryLower) = -battery;
  cs.b_ineq[kRowBatteryLower] = -batt.lower;
  for (int i = 0; i < 5; ++i) cs.a_ineq(kRowNonnegFirst + i, i) = -1.0;

  cs.a_eq = pinned;
  cs.b_eq = Eigen::VectorXd::Zero(1);
  return cs;
}

FoStep fo_step_detailed(const ControlVector& u, const MeasurementVector& y, const ConstraintSet& cs,
                        const ControllerConfig& cfg, const CostConfig& cost,
                        const std::optional<Vector5>& grad_u) {
  const Vector5 uv = u.to_vector();
  FoStep out;
  out.gamma = sensitivity().transpose() * measurement_to_channel_order(cost_gradient(y, cost));
  if (grad_u) out.gamma += *grad_u;

  qp::QpProblem p;
  p.gamma = out.gamma;
  p.a_ineq = cs.a_ineq;
  p.b_ineq = -cfg.beta * (cs.a_ineq * uv - cs.b_ineq);
  p.a_eq = cs.a_eq;
  p.b_eq = -cfg.beta * (cs.a_eq * uv - cs.b_eq);
  p.lower = -cfg.rate_limit;
  p.upper = cfg.rate_limit;

  out.qp = qp::solve(p);
  if (out.qp.status == qp::QpStatus::Infeasible) {
    out.u_next = u;
    return out;
  }
  out.u_next = ControlVector::from_vector(uv + cfg.eta * cfg.dt * Vector5(out.qp.theta));
  return out;
}

ControlVector fo_step(const ControlVector& u, const MeasurementVector& y, const ConstraintSet& cs,
                      const ControllerConfig& cfg, const CostConfig& cost) {
  const FoStep s = fo_step_detailed(u, y, cs, cfg, cost);
  if (s.qp.status == qp::QpStatus::Infeasible) throw QpInfeasibleError("projection QP is infeasible");
  return s.u_next;
}

ControlVector clip_initial(const ControlVector& u0, Mode mode) {
  Vector5 v = u0.to_vector().cwiseMax(0.0);
  if (mode == Mode::Discharging) {
    v[kWindToBattery] = 0.0;
    v[kSolarToBattery] = 0.0;
  } else {
    v[kBatteryToLoad] = 0.0;
  }
  return ControlVector::from_vector(v);
}

FeedbackController::FeedbackController(ControllerConfig cfg, CostConfig cost, const ControlVector& u0)
    : cfg_(cfg), cost_(cost), u_(clip_initial(u0, cost.mode)) {
  cfg_.validate();
  cost_.validate();
}

const ControlVector& FeedbackController::step(const MeasurementVector& y, const ConstraintSet& cs) {
  const FoStep s = fo_step_detailed(u_, y, cs, cfg_, cost_);
  last_status_ = s.qp.status;
  last_active_ = static_cast<int>(s.qp.active_set.size());
  if (s.qp.status == qp::QpStatus::Infeasible) throw QpInfeasibleError("projection QP is infeasible");
  if (s.qp.status == qp::QpStatus::MaxIterations) {
    if (++stalled_ >= 2) throw StalledStepError("projection QP hit its iteration cap twice in a row");
  } else {
    stalled_ = 0;
  }
  last_theta_norm_ = s.qp.theta.norm();
  u_ = s.u_next;
  return u_;
}

}  // namespace hpfo
