#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "hpfo/qp.hpp"
#include "support/kkt.hpp"
#include "support/qp_enumeration.hpp"
#include "support/random_qp.hpp"

using hpfo::qp::QpProblem;
using hpfo::qp::QpStatus;
using hpfo::qp::solve;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

QpProblem box_problem(const Eigen::VectorXd& gamma, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi) {
  QpProblem p = QpProblem::unconstrained(gamma);
  p.lower = lo;
  p.upper = hi;
  return p;
}
}  // namespace

TEST_CASE("unconstrained minimizer is -gamma") {
  const auto sol = solve(QpProblem::unconstrained(Eigen::Vector2d(1.0, 2.0)));
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK(sol.theta[0] == doctest::Approx(-1.0));
  CHECK(sol.theta[1] == doctest::Approx(-2.0));
  CHECK(sol.active_set.empty());
}

TEST_CASE("single variable clamps to the nearest bound") {
  const auto sol = solve(box_problem(Eigen::VectorXd::Constant(1, 3.0),
                                     Eigen::VectorXd::Constant(1, -2.0),
                                     Eigen::VectorXd::Constant(1, 1.0)));
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK(sol.theta[0] == doctest::Approx(-2.0));
  REQUIRE(sol.active_set.size() == 1);
  CHECK(sol.active_set[0].kind == hpfo::qp::ActiveConstraint::Kind::Lower);
  // 2(theta + gamma) - sigma_lower = 0  ->  sigma_lower = 2
  CHECK(sol.sigma_lower[0] == doctest::Approx(2.0));
}

TEST_CASE("equality projection matches closed form and dense KKT solve") {
  QpProblem p = QpProblem::unconstrained(Eigen::Vector2d(1.0, 1.0));
  p.a_eq = Eigen::RowVector2d(1.0, 1.0);
  p.b_eq = Eigen::VectorXd::Zero(1);

  // Closed form: theta = -gamma + ((b + 1'gamma) / n) 1.
  const double shift = (p.b_eq[0] + p.gamma.sum()) / 2.0;
  const Eigen::Vector2d closed = -p.gamma + Eigen::Vector2d::Constant(shift);

  // Dense KKT system [2I A'; A 0][theta; mu] = [-2 gamma; b].
  Eigen::Matrix3d kkt = Eigen::Matrix3d::Zero();
  kkt.topLeftCorner<2, 2>() = 2.0 * Eigen::Matrix2d::Identity();
  kkt.block<2, 1>(0, 2) = p.a_eq.transpose();
  kkt.block<1, 2>(2, 0) = p.a_eq;
  Eigen::Vector3d rhs(-2.0 * p.gamma[0], -2.0 * p.gamma[1], p.b_eq[0]);
  const Eigen::Vector3d dense = kkt.fullPivLu().solve(rhs);
  CHECK((closed - dense.head<2>()).norm() < 1e-14);
  CHECK(closed.norm() < 1e-14);

  const auto sol = solve(p);
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK((sol.theta - closed).norm() < 1e-12);
  CHECK(sol.mu_eq[0] == doctest::Approx(dense[2]));
}

TEST_CASE("contradictory rows are reported infeasible") {
  QpProblem p = QpProblem::unconstrained(Eigen::VectorXd::Zero(1));
  p.a_ineq.resize(2, 1);
  p.a_ineq << 1.0, -1.0;
  p.b_ineq = Eigen::Vector2d(-1.0, -1.0);  // theta <= -1 and theta >= 1
  CHECK(solve(p).status == QpStatus::Infeasible);

  QpProblem q = QpProblem::unconstrained(Eigen::Vector2d(0.0, 0.0));
  q.a_eq = Eigen::RowVector2d(1.0, 1.0);
  q.b_eq = Eigen::VectorXd::Constant(1, 10.0);
  q.upper = Eigen::Vector2d(1.0, 1.0);
  CHECK(solve(q).status == QpStatus::Infeasible);

  // 0 * theta <= -1
  QpProblem z = QpProblem::unconstrained(Eigen::VectorXd::Zero(1));
  z.a_ineq = Eigen::MatrixXd::Zero(1, 1);
  z.b_ineq = Eigen::VectorXd::Constant(1, -1.0);
  CHECK(solve(z).status == QpStatus::Infeasible);
}

TEST_CASE("malformed problems are rejected") {
  QpProblem p = box_problem(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 1.0),
                            Eigen::VectorXd::Constant(1, 0.0));
  CHECK_THROWS_AS(solve(p), std::invalid_argument);

  QpProblem dep = QpProblem::unconstrained(Eigen::Vector2d(1.0, 0.0));
  dep.a_eq.resize(2, 2);
  dep.a_eq << 1.0, 1.0, 2.0, 2.0;
  dep.b_eq = Eigen::Vector2d(0.0, 0.0);
  CHECK_THROWS_AS(solve(dep), std::invalid_argument);

  QpProblem mismatch = QpProblem::unconstrained(Eigen::Vector2d(1.0, 0.0));
  mismatch.a_ineq = Eigen::MatrixXd::Ones(1, 3);
  mismatch.b_ineq = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(solve(mismatch), std::invalid_argument);
}

TEST_CASE("duplicate rows keep the tighter bound") {
  QpProblem p = QpProblem::unconstrained(Eigen::Vector2d(-5.0, 0.0));
  p.a_ineq.resize(3, 2);
  p.a_ineq << 1.0, 0.0, 1.0, 0.0, 2.0, 0.0;
  p.b_ineq = Eigen::Vector3d(3.0, 2.0, 8.0);
  const auto sol = solve(p);
  REQUIRE(sol.status == QpStatus::Optimal);
  CHECK(sol.theta[0] == doctest::Approx(2.0));
  CHECK(sol.theta[1] == doctest::Approx(0.0));
  const auto kkt = hpfo::testing::check_kkt(p, sol);
  CHECK(kkt.stationarity < 1e-10);
  CHECK(sol.lambda_ineq[1] > 0.0);
  CHECK(sol.lambda_ineq[0] == 0.0);
}

TEST_CASE("kW-scale data is handled through row and problem scaling") {
  QpProblem p = QpProblem::unconstrained(Eigen::Vector2d(-2.25e5, -2.0));
  p.a_ineq = Eigen::RowVector2d(1.0, 1.0);
  p.b_ineq = Eigen::VectorXd::Constant(1, 1500.0);
  p.lower = Eigen::Vector2d(-2000.0, -2000.0);
  p.upper = Eigen::Vector2d(2000.0, 2000.0);
  const auto sol = solve(p);
  REQUIRE(sol.status == QpStatus::Optimal);
  const auto ref = hpfo::testing::enumerate_qp(p);
  REQUIRE(ref);
  CHECK((sol.theta - ref->theta).norm() <= 1e-8 * (1.0 + ref->theta.norm()));
}

TEST_CASE("random problems: enumeration, KKT, pivot order and scaling") {
  std::mt19937_64 rng(20240611);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const QpProblem p = hpfo::testing::random_feasible_qp(rng);
    const auto sol = solve(p);
    REQUIRE(sol.status == QpStatus::Optimal);
    CHECK(sol.kkt_residual <= 1e-8);

    const auto ref = hpfo::testing::enumerate_qp(p);
    REQUIRE(ref);
    CHECK((sol.theta - ref->theta).norm() <= 1e-8 * (1.0 + ref->theta.norm()));

    const auto kkt = hpfo::testing::check_kkt(p, sol);
    CHECK(kkt.stationarity <= 1e-8 * (1.0 + p.gamma.norm()));
    CHECK(kkt.dual <= 1e-8);
    CHECK(kkt.complementarity <= 1e-8);
    CHECK(kkt.primal <= 1e-8);

    hpfo::qp::QpOptions reverse;
    reverse.pivot_order = hpfo::qp::PivotOrder::Reverse;
    const auto other = solve(p, reverse);
    REQUIRE(other.status == QpStatus::Optimal);
    CHECK((other.theta - sol.theta).norm() <= 1e-8 * (1.0 + sol.theta.norm()));

    for (double s : {4.0, 3.7, 1234.5}) {
      QpProblem scaled = p;
      scaled.gamma *= s;
      scaled.b_ineq *= s;
      scaled.b_eq *= s;
      scaled.lower *= s;
      scaled.upper *= s;
      const auto ss = solve(scaled);
      REQUIRE(ss.status == QpStatus::Optimal);
      CHECK((ss.theta - s * sol.theta).norm() <= 1e-10 * s * (1.0 + sol.theta.norm()));
    }
    ++checked;
  }
  CHECK(checked == 300);
}

TEST_CASE("power-of-two scaling is exact") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const QpProblem p = hpfo::testing::random_feasible_qp(rng);
    QpProblem scaled = p;
    const double s = 1024.0;
    scaled.gamma *= s;
    scaled.b_ineq *= s;
    scaled.b_eq *= s;
    scaled.lower *= s;
    scaled.upper *= s;
    CHECK(solve(scaled).theta == s * solve(p).theta);
  }
}
