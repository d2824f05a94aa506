#include "hpfo/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hpfo/error.hpp"

namespace hpfo {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, 5>;

// Constraint rows rebuilt from the problem data (not shared with the controller).
struct Rows {
  RowMat g;  // g u <= h
  Eigen::VectorXd h;
  RowMat e;  // e u = f
  Eigen::VectorXd f;
};

Rows build_rows(const FrozenProblem& p) {
  const bool charging = p.cost.mode == Mode::Charging;
  std::vector<std::pair<Vector5, double>> le;
  auto unit = [](std::initializer_list<int> idx) {
    Vector5 v = Vector5::Zero();
    for (int i : idx) v[i] = 1.0;
    return v;
  };
  // sources
  le.push_back({unit({0, 3}), std::min(p.avail.wind, p.limits.p_max_w)});
  le.push_back({unit({1, 4}), std::min(p.avail.solar, p.limits.p_max_s)});
  // storage
  const Vector5 b = charging ? unit({3, 4}) : unit({2});
  le.push_back({b, p.battery.upper});
  le.push_back({-b, -p.battery.lower});
  // signs
  for (int i = 0; i < 5; ++i) le.push_back({-unit({i}), 0.0});

  Rows r;
  r.g.resize(static_cast<Eigen::Index>(le.size()), 5);
  r.h.resize(static_cast<Eigen::Index>(le.size()));
  for (std::size_t i = 0; i < le.size(); ++i) {
    r.g.row(static_cast<Eigen::Index>(i)) = le[i].first.transpose();
    r.h[static_cast<Eigen::Index>(i)] = le[i].second;
  }
  r.e.resize(1, 5);
  r.e.row(0) = (charging ? unit({2}) : unit({3, 4})).transpose();
  r.f = Eigen::VectorXd::Zero(1);
  return r;
}

const Vector5 kLoad(1.0, 1.0, 1.0, 0.0, 0.0);

Vector5 linear_term(const FrozenProblem& p) {
  if (p.cost.mode == Mode::Charging) return {0.0, 0.0, 0.0, -p.cost.q_b, -p.cost.q_b};
  return {0.0, 0.0, p.cost.q_b, 0.0, 0.0};
}

struct Candidate {
  Vector5 u;
  Eigen::VectorXd lambda;  // all inequality rows
  double mu = 0.0;
  double cost = 0.0;
  bool dual_ok = false;
};

bool lex_less(const Vector5& a, const Vector5& b, double tol) {
  for (int i = 0; i < 5; ++i) {
    if (a[i] < b[i] - tol) return true;
    if (a[i] > b[i] + tol) return false;
  }
  return false;
}

}  // namespace

double frozen_cost(const FrozenProblem& p, const ControlVector& u) {
  const Vector5 v = u.to_vector();
  const double err = kLoad.dot(v) - p.cost.p_r;
  return 0.5 * p.cost.q_r * err * err + linear_term(p).dot(v);
}

bool frozen_feasible(const FrozenProblem& p, const ControlVector& u, double tol) {
  const Rows r = build_rows(p);
  const Vector5 v = u.to_vector();
  return ((r.g * v - r.h).array() <= tol).all() && ((r.e * v - r.f).cwiseAbs().array() <= tol).all();
}

OracleResult solve_frozen_detailed(const FrozenProblem& p) {
  const Rows r = build_rows(p);
  const int m = static_cast<int>(r.g.rows());
  const int n_eq = static_cast<int>(r.e.rows());
  const double q_r = p.cost.q_r;
  const Vector5 c = linear_term(p);
  const Vector5 rhs_u = q_r * p.cost.p_r * kLoad - c;

  const double h_scale = 1.0 + r.h.cwiseAbs().maxCoeff();
  const double feas_tol = 1e-10 * h_scale;
  const double grad_scale = 1.0 + c.cwiseAbs().maxCoeff() + q_r * (p.cost.p_r + 3.0 * h_scale);
  const double dual_tol = 1e-10 * grad_scale;

  std::vector<Candidate> optimal;
  double best_feasible_cost = INFINITY;
  int n_candidates = 0;

  // Every subset of inequality rows with at most 5 - n_eq members.
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    const int k = std::popcount(mask);
    if (k > 5 - n_eq) continue;
    std::vector<int> rows;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) rows.push_back(i);

    const int dim = 5 + k + n_eq;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    kkt.topLeftCorner<5, 5>() = q_r * kLoad * kLoad.transpose();
    rhs.head<5>() = rhs_u;
    for (int j = 0; j < k; ++j) {
      kkt.block<5, 1>(0, 5 + j) = r.g.row(rows[j]).transpose();
      kkt.block<1, 5>(5 + j, 0) = r.g.row(rows[j]);
      rhs[5 + j] = r.h[rows[j]];
    }
    for (int j = 0; j < n_eq; ++j) {
      kkt.block<5, 1>(0, 5 + k + j) = r.e.row(j).transpose();
      kkt.block<1, 5>(5 + k + j, 0) = r.e.row(j);
      rhs[5 + k + j] = r.f[j];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    ++n_candidates;

    Candidate cand;
    cand.u = sol.head<5>();
    if (((r.g * cand.u - r.h).array() > feas_tol).any()) continue;
    if ((r.e * cand.u - r.f).cwiseAbs().maxCoeff() > feas_tol) continue;
    cand.lambda = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < k; ++j) cand.lambda[rows[j]] = sol[5 + j];
    cand.mu = n_eq > 0 ? sol[5 + k] : 0.0;
    cand.cost = frozen_cost(p, ControlVector::from_vector(cand.u));
    cand.dual_ok = cand.lambda.minCoeff() >= -dual_tol;
    best_feasible_cost = std::min(best_feasible_cost, cand.cost);
    if (cand.dual_ok) optimal.push_back(std::move(cand));
  }
  if (optimal.empty()) throw OracleInfeasibleError("frozen problem has no feasible KKT point");

  OracleResult out;
  out.candidates = n_candidates;
  const double u_tol = 1e-9 * h_scale;
  const Candidate* pick = &optimal.front();
  out.face_min = out.face_max = pick->u;
  for (const Candidate& cand : optimal) {
    out.face_min = out.face_min.cwiseMin(cand.u);
    out.face_max = out.face_max.cwiseMax(cand.u);
    if (lex_less(cand.u, pick->u, u_tol)) pick = &cand;
  }
  out.unique = ((out.face_max - out.face_min).array() <= 1e-6 * h_scale).all();
  out.u = ControlVector::from_vector(pick->u);
  out.cost = pick->cost;
  out.multipliers = pick->lambda;

  // Certificate, scaled to the problem's magnitudes.
  const Vector5 stat = q_r * kLoad * (kLoad.dot(pick->u) - p.cost.p_r) + c + r.g.transpose() * pick->lambda +
                       r.e.transpose() * Eigen::VectorXd::Constant(n_eq, pick->mu);
  const Eigen::VectorXd slack = r.h - r.g * pick->u;
  double res = stat.cwiseAbs().maxCoeff() / grad_scale;
  res = std::max(res, std::max(0.0, -slack.minCoeff()) / h_scale);
  res = std::max(res, (r.e * pick->u - r.f).cwiseAbs().maxCoeff() / h_scale);
  res = std::max(res, std::max(0.0, -pick->lambda.minCoeff()) / grad_scale);
  res = std::max(res, (pick->lambda.cwiseProduct(slack)).cwiseAbs().maxCoeff() / (grad_scale * h_scale));
  out.kkt_residual = res;

  // A KKT point of a convex problem is a global minimizer; the cheapest
  // feasible candidate must agree.
  if (best_feasible_cost < out.cost - 1e-9 * (1.0 + std::abs(out.cost)))
    throw std::logic_error("oracle: KKT point is not the cheapest feasible candidate");
  return out;
}

ControlVector solve_frozen(const FrozenProblem& p) { return solve_frozen_detailed(p).u; }

}  // namespace hpfo
