#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "hpfo/controller.hpp"
#include "hpfo/oracle.hpp"

namespace hpfo {

/// One pass/fail line: worst observed value against its tolerance.
struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
};

void print_check(std::ostream& out, const CheckResult& r);

/// Random frozen instance inside `limits`: availabilities up to the setpoint
/// limits (a fifth of them zero), battery upper bound in [0, p_max_b], the
/// mode's preset gains and demand in [0, p_max_w + p_max_s].
FrozenProblem random_frozen_problem(std::mt19937_64& rng, Mode mode, const PlantLimits& limits);

struct SettleResult {
  ControlVector u;
  long steps = 0;
  double theta_norm = 0.0;
  bool converged = false;
};

/// Closed loop against frozen plants: availability, battery bounds and
/// demand held fixed, plant outputs from plant_outputs. Stops once
/// ||theta*|| <= theta_tol.
SettleResult settle(const FrozenProblem& p, const ControlVector& u0, const ControllerConfig& cfg,
                    double theta_tol, long max_steps);

/// Step size for settle(): eta*dt just under the stability bound 2 / (k*q_r)
/// of the Euler step, k = number of free load channels; beta*eta*dt = 1 and
/// rate limits lifted. None of this moves the fixed points.
ControllerConfig settling_gains(const CostConfig& cost);

struct EquivalenceOptions {
  int instances_per_mode = 20;
  std::uint64_t seed = 20240611;
  double theta_tol = 1e-6;
  double rel_tol = 1e-3;
  long max_steps = 20'000'000;
};

/// FO equilibrium from the origin vs the enumeration oracle. A unique oracle
/// optimum is compared coordinate-wise (relative where nonzero, absolute
/// 1e-3 kW otherwise). When the optimal face is not a point, the FO point
/// must be feasible, match the optimal cost to rel_tol and sit inside the
/// face ranges.
CheckResult check_oracle_equivalence(const EquivalenceOptions& opt, const PlantLimits& limits = {});

struct InvarianceOptions {
  int starts = 1000;
  long steps = 10'000;
  std::uint64_t seed = 4242;
  double tol_kw = 1e-6;
};

/// Random constant constraints, random feasible start, eta*dt*beta <= 1:
/// worst inequality excess and equality error along every trajectory.
CheckResult check_forward_invariance(const InvarianceOptions& opt, const PlantLimits& limits = {});

struct GradientOptions {
  int points = 100;
  std::uint64_t seed = 99;
  double rel_tol = 1e-6;
};

/// cost_gradient against central differences for the generic tracking cost
/// (random gains) and both mode presets. Worst coordinate-wise relative error.
CheckResult check_gradients(const GradientOptions& opt);

}  // namespace hpfo
