#include <doctest.h>

#include <cmath>
#include <random>

#include "hpfo/controller.hpp"
#include "hpfo/error.hpp"
#include "support/fd.hpp"

using namespace hpfo;

namespace {

BatteryLimitsOut wide_battery() { return {-20000.0, 20000.0}; }

// Identity plant: every output equals its setpoint.
MeasurementVector follow(const ControlVector& u) {
  return MeasurementVector::from_vector(channel_to_measurement_order(u.to_vector()));
}

}  // namespace

TEST_CASE("cost gradient examples") {
  const CostConfig charge{45.0, 2.0, 50000.0, Mode::Charging};
  const Vector5 g = cost_gradient({30000.0, 0.0, 15000.0, 0.0, 0.0}, charge);
  CHECK(g == Vector5(-225000.0, -2.0, -225000.0, -2.0, -225000.0));

  const CostConfig discharge{10.0, 80.0, 0.0, Mode::Discharging};
  CHECK(cost_gradient({}, discharge) == Vector5(0.0, 0.0, 0.0, 0.0, 80.0));

  for (Mode mode : {Mode::Charging, Mode::Discharging}) {
    const CostConfig c{12.0, 0.0, 30000.0, mode};
    const Vector5 z = cost_gradient({10000.0, 500.0, 15000.0, 700.0, 5000.0}, c);
    CHECK(z[0] == 0.0);
    CHECK(z[2] == 0.0);
    CHECK(z[4] == 0.0);
  }
}

TEST_CASE("cost gradient matches central differences") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> power(0.0, 60000.0);
  std::uniform_real_distribution<double> gain(0.1, 100.0);
  for (Mode mode : {Mode::Charging, Mode::Discharging}) {
    for (int i = 0; i < 100; ++i) {
      const CostConfig c{gain(rng), gain(rng), power(rng) + 20000.0, mode};
      const MeasurementVector y{power(rng), power(rng), power(rng), power(rng), power(rng)};
      const Vector5 fd = testing::central_difference(
          [&](const Vector5& v) { return cost_value(MeasurementVector::from_vector(v), c); }, y.to_vector());
      const Vector5 g = cost_gradient(y, c);
      CHECK((fd - g).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, g.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("sensitivity is the identity") {
  CHECK(sensitivity() == Matrix5::Identity());
  CHECK(sensitivity().transpose() == sensitivity());
  const Vector5 g(1.0, 2.0, 3.0, 4.0, 5.0);
  CHECK(sensitivity().transpose() * g == g);
}

TEST_CASE("constraint assembly") {
  const PlantLimits lim;
  const auto cs = assemble_constraints(Mode::Charging, lim, 40000.0, 70000.0, wide_battery());
  CHECK(cs.b_ineq[kRowWind] == 40000.0);
  CHECK(cs.b_ineq[kRowSolar] == 70000.0);
  CHECK(cs.a_ineq.row(kRowBatteryUpper) == Eigen::RowVector<double, 5>(0, 0, 0, 1, 1));
  CHECK(cs.a_eq.row(0) == Eigen::RowVector<double, 5>(0, 0, 1, 0, 0));

  const auto capped = assemble_constraints(Mode::Charging, lim, 80000.0, 200000.0, wide_battery());
  CHECK(capped.b_ineq[kRowWind] == 50000.0);
  CHECK(capped.b_ineq[kRowSolar] == 100000.0);

  const auto dis = assemble_constraints(Mode::Discharging, lim, 0.0, 1000.0, {-5.0, 7.0});
  CHECK(dis.a_eq.row(0) == Eigen::RowVector<double, 5>(0, 0, 0, 1, 1));
  CHECK(dis.b_eq[0] == 0.0);
  CHECK(dis.b_ineq[kRowWind] == 0.0);
  CHECK(dis.a_ineq.row(kRowBatteryUpper) == Eigen::RowVector<double, 5>(0, 0, 1, 0, 0));
  CHECK(dis.b_ineq[kRowBatteryUpper] == 7.0);
  CHECK(dis.b_ineq[kRowBatteryLower] == 5.0);
  for (int i = 0; i < 5; ++i) CHECK(dis.a_ineq(kRowNonnegFirst + i, i) == -1.0);

  CHECK_THROWS_AS(assemble_constraints(Mode::Discharging, lim, 1.0, 1.0, {10.0, 5.0}), InfeasibleBoxError);
}

TEST_CASE("fo_step leaves a stationary feasible point alone") {
  const CostConfig cost{45.0, 0.0, 30000.0, Mode::Charging};
  const ControllerConfig cfg;
  const auto cs = assemble_constraints(Mode::Charging, PlantLimits{}, 40000.0, 40000.0, wide_battery());
  const ControlVector u{10000.0, 20000.0, 0.0, 500.0, 600.0};
  CHECK(fo_step(u, follow(u), cs, cfg, cost) == u);
}

TEST_CASE("fo_step contracts a violated row") {
  const CostConfig cost{45.0, 0.0, 30000.0, Mode::Charging};
  ControllerConfig cfg;
  cfg.rate_limit = Vector5::Constant(1e6);
  const auto cs = assemble_constraints(Mode::Charging, PlantLimits{}, 25000.0, 40000.0, wide_battery());
  // Load total meets demand (gamma = 0), wind row over by 2000 kW.
  const ControlVector u{27000.0, 3000.0, 0.0, 0.0, 0.0};
  REQUIRE(cost_gradient(follow(u), cost).isZero());
  const double v0 = cs.a_ineq.row(kRowWind).dot(u.to_vector()) - cs.b_ineq[kRowWind];
  REQUIRE(v0 == doctest::Approx(2000.0));
  const ControlVector next = fo_step(u, follow(u), cs, cfg, cost);
  const double v1 = cs.a_ineq.row(kRowWind).dot(next.to_vector()) - cs.b_ineq[kRowWind];
  CHECK(v1 <= v0 * (1.0 - cfg.eta * cfg.dt * cfg.beta) + 1e-9);
}

TEST_CASE("over-tight rate limits make the step infeasible") {
  const CostConfig cost{45.0, 0.0, 30000.0, Mode::Charging};
  ControllerConfig cfg;
  cfg.rate_limit = Vector5::Constant(1.0);
  const auto cs = assemble_constraints(Mode::Charging, PlantLimits{}, 1000.0, 40000.0, wide_battery());
  const ControlVector u{27000.0, 3000.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(fo_step(u, follow(u), cs, cfg, cost), QpInfeasibleError);
  FeedbackController ctrl(cfg, cost, u);
  CHECK_THROWS_AS(ctrl.step(follow(u), cs), QpInfeasibleError);
}

TEST_CASE("forward invariance, attraction and mode equalities on random instances") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const Mode mode = trial % 2 ? Mode::Charging : Mode::Discharging;
    CostConfig cost = CostConfig::preset(mode, 80000.0 * u01(rng));
    ControllerConfig cfg;
    cfg.eta = 0.5 + u01(rng);
    cfg.dt = 0.01 + 0.02 * u01(rng);
    cfg.beta = u01(rng) / (cfg.eta * cfg.dt);
    cfg.rate_limit = Vector5::Constant(1e3 + 1e5 * u01(rng));
    const BatteryLimitsOut batt{-20000.0, 20000.0 * u01(rng)};
    const auto cs = assemble_constraints(mode, PlantLimits{}, 50000.0 * u01(rng), 100000.0 * u01(rng), batt);

    // Feasible start: scale a random point into the source and battery rows.
    Vector5 v(u01(rng), u01(rng), u01(rng), u01(rng), u01(rng));
    v = clip_initial(ControlVector::from_vector(v * 40000.0), mode).to_vector();
    for (int r = 0; r < 3; ++r) {
      const double lhs = cs.a_ineq.row(r).dot(v);
      if (lhs > cs.b_ineq[r]) v *= cs.b_ineq[r] / lhs;
    }
    REQUIRE(cs.max_violation(v) <= 1e-9);

    ControlVector u = ControlVector::from_vector(v);
    for (int k = 0; k < 300; ++k) {
      u = fo_step(u, follow(u), cs, cfg, cost);
      CHECK(cs.max_violation(u.to_vector()) <= 1e-6);
      CHECK(cs.max_equality_error(u.to_vector()) <= 1e-6);
    }

    // Infeasible start: each violated row may only shrink. Rate limits are
    // lifted so the decay demanded by beta stays reachable.
    cfg.rate_limit = Vector5::Constant(1e12);
    ControlVector w = clip_initial({60000.0 * u01(rng), 120000.0 * u01(rng), 30000.0 * u01(rng),
                                    30000.0 * u01(rng), 30000.0 * u01(rng)},
                                   mode);
    Eigen::VectorXd excess = (cs.a_ineq * w.to_vector() - cs.b_ineq).cwiseMax(0.0);
    for (int k = 0; k < 300; ++k) {
      w = fo_step(w, follow(w), cs, cfg, cost);
      const Eigen::VectorXd now = (cs.a_ineq * w.to_vector() - cs.b_ineq).cwiseMax(0.0);
      for (Eigen::Index r = 0; r < now.size(); ++r)
        if (excess[r] > 0.0) CHECK(now[r] <= excess[r] + 1e-6);
      excess = now;
      CHECK(cs.max_equality_error(w.to_vector()) <= 1e-6);
    }
  }
}

TEST_CASE("initial clipping enforces signs and pinned channels") {
  const ControlVector raw{-5.0, 10.0, 20.0, 30.0, -1.0};
  CHECK(clip_initial(raw, Mode::Charging) == ControlVector{0.0, 10.0, 0.0, 30.0, 0.0});
  CHECK(clip_initial(raw, Mode::Discharging) == ControlVector{0.0, 10.0, 20.0, 0.0, 0.0});
}

TEST_CASE("configuration validation") {
  CostConfig c;
  c.q_r = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  ControllerConfig k;
  k.rate_limit[2] = 0.0;
  CHECK_THROWS_AS(k.validate(), ValidationError);
  CHECK(CostConfig::preset(Mode::Charging) == CostConfig{45.0, 2.0, 0.0, Mode::Charging});
  CHECK(CostConfig::preset(Mode::Discharging) == CostConfig{10.0, 80.0, 0.0, Mode::Discharging});
}
