#pragma once

#include "hpfo/controller.hpp"
#include "hpfo/plants.hpp"
#include "hpfo/types.hpp"

namespace hpfo {

/// Steady-state supervisory problem with disturbances and demand held fixed.
struct FrozenProblem {
  Availability avail;        // kW
  BatteryLimitsOut battery;  // kW, on the mode's battery channel(s)
  CostConfig cost;           // carries mode and demand
  PlantLimits limits;
};

struct OracleResult {
  /// Lexicographically smallest minimizer.
  ControlVector u;
  double cost = 0.0;
  /// Per-channel range of the minimizers found (the optimal face).
  Vector5 face_min = Vector5::Zero();
  Vector5 face_max = Vector5::Zero();
  bool unique = true;
  /// Scaled KKT residual of `u` with nonnegative multipliers.
  double kkt_residual = 0.0;
  /// Multipliers of the inequality rows, in the oracle's own row order.
  Eigen::VectorXd multipliers;
  int candidates = 0;
};

/// Cost of a setpoint vector when every output follows its setpoint.
double frozen_cost(const FrozenProblem& p, const ControlVector& u);

/// True if u satisfies every constraint to within `tol` kW.
bool frozen_feasible(const FrozenProblem& p, const ControlVector& u, double tol = 1e-9);

/// Global minimizer by exhaustive enumeration of active sets. Throws
/// OracleInfeasibleError when no candidate is feasible.
OracleResult solve_frozen_detailed(const FrozenProblem& p);
ControlVector solve_frozen(const FrozenProblem& p);

}  // namespace hpfo
