#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hpfo::qp {

/// Projection problem
///
///   minimize    ||theta + gamma||^2
///   subject to  a_ineq * theta <= b_ineq
///               a_eq   * theta  = b_eq
///               lower <= theta <= upper
///
/// The Hessian is 2*I, so the problem is strictly convex whenever it is
/// feasible. Infinite entries in `lower`/`upper` drop that bound. Empty
/// matrices must still carry the right column count (n).
struct QpProblem {
  Eigen::VectorXd gamma;
  Eigen::MatrixXd a_ineq;
  Eigen::VectorXd b_ineq;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  /// Unconstrained problem of dimension n (no rows, infinite bounds).
  static QpProblem unconstrained(const Eigen::VectorXd& gamma);
  int dimension() const { return static_cast<int>(gamma.size()); }
};

enum class QpStatus { Optimal, Infeasible, MaxIterations };

const char* to_string(QpStatus status);

struct ActiveConstraint {
  enum class Kind { Inequality, Equality, Lower, Upper };
  Kind kind;
  int index;

  friend bool operator==(const ActiveConstraint&, const ActiveConstraint&) = default;
};

struct QpSolution {
  Eigen::VectorXd theta;
  std::vector<ActiveConstraint> active_set;
  /// Max of scaled stationarity, primal, dual and complementarity residuals.
  double kkt_residual = 0.0;
  QpStatus status = QpStatus::Optimal;
  int iterations = 0;

  // Multipliers for the original (unscaled) problem:
  // 2(theta + gamma) + a_ineq^T lambda + a_eq^T mu - sigma_lower + sigma_upper = 0.
  Eigen::VectorXd lambda_ineq;
  Eigen::VectorXd mu_eq;
  Eigen::VectorXd sigma_lower;
  Eigen::VectorXd sigma_upper;
};

enum class PivotOrder { Forward, Reverse };

struct QpOptions {
  /// Absolute feasibility tolerance on unit-norm rows of the scaled problem.
  double feasibility_tol = 1e-14;
  /// Status is Optimal only if the final KKT residual is at most this.
  double kkt_tol = 1e-8;
  /// Scan order used to break ties when picking the next violated row.
  PivotOrder pivot_order = PivotOrder::Forward;
};

/// Dual active-set solve (Goldfarb-Idnani with an identity Hessian).
///
/// Throws std::invalid_argument on malformed input: mismatched sizes,
/// lower > upper, NaNs, or linearly dependent equality rows.
QpSolution solve(const QpProblem& problem, const QpOptions& options = {});

/// Largest supported problem sizes.
inline constexpr int kMaxVariables = 16;
inline constexpr int kMaxRows = 96;

}  // namespace hpfo::qp
