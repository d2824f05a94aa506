#pragma once

#include <Eigen/Dense>
#include <optional>

#include "hpfo/plants.hpp"
#include "hpfo/qp.hpp"
#include "hpfo/types.hpp"

namespace hpfo {

struct CostConfig {
  double q_r = 10.0;
  double q_b = 80.0;
  double p_r = 0.0;  // kW
  Mode mode = Mode::Discharging;

  /// Tuned gains for each mode: charging 45 / 2, discharging 10 / 80.
  static CostConfig preset(Mode mode, double p_r = 0.0);
  void validate() const;

  friend bool operator==(const CostConfig&, const CostConfig&) = default;
};

struct ControllerConfig {
  double eta = 0.95;  // 1/s
  double beta = 1.0;  // 1/s
  double dt = 0.03;   // s
  /// |theta_i| bound per control channel, kW/s.
  Vector5 rate_limit = Vector5::Constant(5000.0);

  void validate() const;
};

/// a_ineq * u <= b_ineq, a_eq * u = b_eq over the five control channels.
struct ConstraintSet {
  Eigen::Matrix<double, Eigen::Dynamic, 5> a_ineq;
  Eigen::VectorXd b_ineq;
  Eigen::Matrix<double, Eigen::Dynamic, 5> a_eq;
  Eigen::VectorXd b_eq;

  /// Largest inequality excess, or 0 if none is violated.
  double max_violation(const Vector5& u) const;
  /// Largest |a_eq u - b_eq|.
  double max_equality_error(const Vector5& u) const;
};

/// Row layout produced by assemble_constraints.
enum ConstraintRow : int {
  kRowWind = 0,
  kRowSolar = 1,
  kRowBatteryUpper = 2,
  kRowBatteryLower = 3,
  kRowNonnegFirst = 4,  // five rows, one per channel
  kNumInequalityRows = 9,
};

/// Tracking and battery cost evaluated on a measurement.
double cost_value(const MeasurementVector& y, const CostConfig& cfg);

/// Gradient of cost_value with respect to y, in measurement order.
Vector5 cost_gradient(const MeasurementVector& y, const CostConfig& cfg);

/// Input-output sensitivity in channel-aligned coordinates: entry (i, j) is
/// the response of the output paired with channel i to setpoint j. Every
/// output follows its own setpoint, so this is the identity.
Matrix5 sensitivity();

/// Mode-dependent constraint rows. Throws InfeasibleBoxError if
/// batt.lower > batt.upper.
ConstraintSet assemble_constraints(Mode mode, const PlantLimits& limits, double p_bar_w, double p_bar_s,
                                   const BatteryLimitsOut& batt);

/// QP step direction with all intermediate data.
struct FoStep {
  ControlVector u_next;
  qp::QpSolution qp;
  Vector5 gamma;
};

/// One explicit-Euler step of the feedback law. `grad_u` adds a direct cost
/// gradient in channel order. Returns the QP outcome as-is, including
/// Infeasible; u_next is then u.
FoStep fo_step_detailed(const ControlVector& u, const MeasurementVector& y, const ConstraintSet& cs,
                        const ControllerConfig& cfg, const CostConfig& cost,
                        const std::optional<Vector5>& grad_u = std::nullopt);

/// Same step, throwing QpInfeasibleError when the projection has no solution.
ControlVector fo_step(const ControlVector& u, const MeasurementVector& y, const ConstraintSet& cs,
                      const ControllerConfig& cfg, const CostConfig& cost);

/// Nonnegativity and the mode's pinned channels applied to an initial guess.
ControlVector clip_initial(const ControlVector& u0, Mode mode);

/// Stateful wrapper owning u. Raises StalledStepError when the QP stops at
/// its iteration cap on two consecutive steps.
class FeedbackController {
 public:
  FeedbackController(ControllerConfig cfg, CostConfig cost, const ControlVector& u0 = {});

  const ControlVector& step(const MeasurementVector& y, const ConstraintSet& cs);

  const ControlVector& u() const { return u_; }
  const ControllerConfig& config() const { return cfg_; }
  const CostConfig& cost() const { return cost_; }
  void set_demand(double p_r) { cost_.p_r = p_r; }

  qp::QpStatus last_status() const { return last_status_; }
  int last_active_count() const { return last_active_; }
  double last_theta_norm() const { return last_theta_norm_; }

 private:
  ControllerConfig cfg_;
  CostConfig cost_;
  ControlVector u_;
  qp::QpStatus last_status_ = qp::QpStatus::Optimal;
  int last_active_ = 0;
  double last_theta_norm_ = 0.0;
  int stalled_ = 0;
};

}  // namespace hpfo
