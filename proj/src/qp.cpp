#include "hpfo/qp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hpfo::qp {

namespace {

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxVariables, 1>;
using ActiveMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxVariables, kMaxVariables>;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, kMaxRows,
                             kMaxVariables>;
using RowRhs = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxRows, 1>;

constexpr double kInf = std::numeric_limits<double>::infinity();
// Squared norm below which the projected row direction counts as zero,
// i.e. the row is linearly dependent on the active set.
constexpr double kDependentSq = 1e-18;

struct RowInfo {
  ActiveConstraint origin;
  double norm = 1.0;
  bool equality = false;
  int alias = -1;     // survivor index when this row duplicates another
  double sign = 1.0;  // -1 when an equality row was flipped
};

void validate(const QpProblem& p) {
  const auto n = p.gamma.size();
  auto bad = [](const std::string& what) { throw std::invalid_argument("qp: " + what); };
  if (n > kMaxVariables) bad("dimension exceeds " + std::to_string(kMaxVariables));
  if (p.a_ineq.rows() > 0 && p.a_ineq.cols() != n) bad("a_ineq has wrong column count");
  if (p.a_ineq.rows() != p.b_ineq.size()) bad("a_ineq/b_ineq row mismatch");
  if (p.a_eq.rows() > 0 && p.a_eq.cols() != n) bad("a_eq has wrong column count");
  if (p.a_eq.rows() != p.b_eq.size()) bad("a_eq/b_eq row mismatch");
  if (p.lower.size() != 0 && p.lower.size() != n) bad("lower has wrong size");
  if (p.upper.size() != 0 && p.upper.size() != n) bad("upper has wrong size");
  if (p.a_eq.rows() > n) bad("more equality rows than variables");
  if (p.a_ineq.rows() + p.a_eq.rows() + 2 * n > kMaxRows) bad("too many constraint rows");
  if (p.gamma.hasNaN() || p.a_ineq.hasNaN() || p.b_ineq.hasNaN() || p.a_eq.hasNaN() ||
      p.b_eq.hasNaN() || p.lower.hasNaN() || p.upper.hasNaN())
    bad("NaN in problem data");
  if (p.lower.size() == n && p.upper.size() == n) {
    for (Eigen::Index i = 0; i < n; ++i)
      if (p.lower[i] > p.upper[i]) bad("lower > upper at index " + std::to_string(i));
  }
  if (p.a_eq.rows() > 0) {
    Eigen::MatrixXd normalized = p.a_eq;
    for (Eigen::Index i = 0; i < normalized.rows(); ++i) {
      const double nrm = normalized.row(i).norm();
      if (nrm == 0.0) bad("zero equality row " + std::to_string(i));
      normalized.row(i) /= nrm;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normalized);
    lu.setThreshold(1e-10);
    if (lu.rank() < normalized.rows()) bad("equality rows are linearly dependent");
  }
}

// Working copy of the problem with unit-norm rows and a power-of-two scale,
// so scaling all data by a power of two scales the answer exactly.
class ActiveSetSolver {
 public:
  ActiveSetSolver(const QpProblem& p, const QpOptions& opt) : problem_(p), opt_(opt) {
    n_ = p.dimension();
    n_ineq_ = static_cast<int>(p.a_ineq.rows());
    n_eq_ = static_cast<int>(p.a_eq.rows());
    scale_ = choose_scale();
    build_rows();
    merge_duplicates();
    g_ = p.gamma / scale_;
  }

  QpSolution run() {
    x_ = -g_;
    q_ = 0;
    if (trivially_infeasible_) {
      return finish(QpStatus::Infeasible);
    }
    for (int i = 0; i < m_; ++i)
      if (info_[i].equality) add_equality(i);

    const int cap = 50 * (n_ + n_ineq_ + n_eq_ + live_bound_rows_);
    const int first = opt_.pivot_order == PivotOrder::Forward ? 0 : m_ - 1;
    const int stride = opt_.pivot_order == PivotOrder::Forward ? 1 : -1;

    for (;;) {
      int pick = -1;
      double worst = opt_.feasibility_tol;
      for (int k = 0, i = first; k < m_; ++k, i += stride) {
        if (info_[i].equality || info_[i].alias >= 0 || in_active_[i]) continue;
        const double v = a_.row(i).dot(x_) - b_[i];
        if (v > worst) {
          worst = v;
          pick = i;
        }
      }
      if (pick < 0) break;

      double lambda_pick = 0.0;
      for (;;) {
        if (iterations_ >= cap) return finish(QpStatus::MaxIterations);
        ++iterations_;
        const Vec ap = a_.row(pick).transpose();
        directions(ap);

        int drop = -1;
        double t_partial = kInf;
        for (int k = 0; k < q_; ++k) {
          if (info_[active_[k]].equality || r_[k] <= 1e-14) continue;
          const double ratio = lambda_[k] / r_[k];
          if (ratio < t_partial) {
            t_partial = ratio;
            drop = k;
          }
        }
        const double zz = z_.dot(ap);
        if (zz <= kDependentSq) {
          if (drop < 0) return finish(QpStatus::Infeasible);
          for (int k = 0; k < q_; ++k) lambda_[k] -= t_partial * r_[k];
          lambda_pick += t_partial;
          remove_active(drop);
          continue;
        }
        const double t_full = (ap.dot(x_) - b_[pick]) / zz;
        const double t = std::min(t_full, t_partial);
        x_ -= t * z_;
        for (int k = 0; k < q_; ++k) lambda_[k] -= t * r_[k];
        lambda_pick += t;
        if (t_full <= t_partial) {
          add_active(pick, lambda_pick);
          break;
        }
        remove_active(drop);
      }
    }
    polish();
    return finish(QpStatus::Optimal);
  }

 private:
  // Magnitude of the data that can push the solution away from the origin:
  // gamma, equality targets, and only those rows and bounds the origin
  // violates. Loose rows and far-away bounds would otherwise inflate the
  // scale and with it the absolute tolerances.
  double choose_scale() const {
    double mag = problem_.gamma.size() > 0 ? problem_.gamma.cwiseAbs().maxCoeff() : 0.0;
    for (int i = 0; i < n_ineq_; ++i) {
      const double nrm = problem_.a_ineq.row(i).norm();
      if (nrm > 0.0 && problem_.b_ineq[i] < 0.0) mag = std::max(mag, -problem_.b_ineq[i] / nrm);
    }
    for (int i = 0; i < n_eq_; ++i)
      mag = std::max(mag, std::abs(problem_.b_eq[i]) / problem_.a_eq.row(i).norm());
    for (Eigen::Index i = 0; i < problem_.lower.size(); ++i)
      if (std::isfinite(problem_.lower[i]) && problem_.lower[i] > 0.0) mag = std::max(mag, problem_.lower[i]);
    for (Eigen::Index i = 0; i < problem_.upper.size(); ++i)
      if (std::isfinite(problem_.upper[i]) && problem_.upper[i] < 0.0) mag = std::max(mag, -problem_.upper[i]);
    if (!(mag > 0.0) || !std::isfinite(mag)) return 1.0;
    int exponent = 0;
    std::frexp(mag, &exponent);
    return std::ldexp(1.0, exponent);
  }

  void push_row(const Eigen::Ref<const Eigen::RowVectorXd>& coeffs, double rhs,
                ActiveConstraint origin, bool equality) {
    const double nrm = coeffs.norm();
    if (nrm == 0.0) {
      if (rhs / scale_ < -opt_.feasibility_tol) trivially_infeasible_ = true;
      return;
    }
    a_.row(m_) = coeffs / nrm;
    b_[m_] = rhs / nrm / scale_;
    info_[m_] = RowInfo{origin, nrm, equality, -1, 1.0};
    ++m_;
  }

  void build_rows() {
    const int capacity = n_ineq_ + n_eq_ + 2 * n_;
    a_.resize(capacity, n_);
    b_.resize(capacity);
    m_ = 0;
    using Kind = ActiveConstraint::Kind;
    for (int i = 0; i < n_eq_; ++i)
      push_row(problem_.a_eq.row(i), problem_.b_eq[i], {Kind::Equality, i}, true);
    for (int i = 0; i < n_ineq_; ++i)
      push_row(problem_.a_ineq.row(i), problem_.b_ineq[i], {Kind::Inequality, i}, false);
    Eigen::RowVectorXd unit = Eigen::RowVectorXd::Zero(n_);
    for (int i = 0; i < n_; ++i) {
      unit.setZero();
      if (problem_.upper.size() == n_ && std::isfinite(problem_.upper[i])) {
        unit[i] = 1.0;
        push_row(unit, problem_.upper[i], {Kind::Upper, i}, false);
        ++live_bound_rows_;
      }
      if (problem_.lower.size() == n_ && std::isfinite(problem_.lower[i])) {
        unit[i] = -1.0;
        push_row(unit, -problem_.lower[i], {Kind::Lower, i}, false);
        ++live_bound_rows_;
      }
    }
    a_.conservativeResize(m_, n_);
    b_.conservativeResize(m_);
  }

  // Exact coefficient matches (after normalization) keep only the tightest row.
  void merge_duplicates() {
    for (int j = 0; j < m_; ++j) {
      if (info_[j].equality) continue;
      for (int i = 0; i < j; ++i) {
        if (info_[i].equality || info_[i].alias >= 0) continue;
        if (a_.row(i) != a_.row(j)) continue;
        int survivor = i;
        int loser = j;
        if (b_[j] < b_[i]) std::swap(survivor, loser);
        info_[loser].alias = survivor;
        for (int k = 0; k < m_; ++k)
          if (info_[k].alias == loser) info_[k].alias = survivor;
        break;
      }
    }
  }

  // z: component of `ap` orthogonal to the active normals; r: coefficients of
  // `ap` in the active basis (least squares).
  void directions(const Vec& ap) {
    if (q_ == 0) {
      z_ = ap;
      r_.resize(0);
      return;
    }
    ActiveMat normals(n_, q_);
    for (int k = 0; k < q_; ++k) normals.col(k) = a_.row(active_[k]).transpose();
    Eigen::HouseholderQR<ActiveMat> qr(normals);
    Vec qt_ap = qr.householderQ().transpose() * ap;
    r_ = qr.matrixQR().topLeftCorner(q_, q_).template triangularView<Eigen::Upper>().solve(
        qt_ap.head(q_));
    qt_ap.head(q_).setZero();
    z_ = qr.householderQ() * qt_ap;
  }

  void add_equality(int row) {
    double viol = a_.row(row).dot(x_) - b_[row];
    if (viol < 0.0) {
      a_.row(row) *= -1.0;
      b_[row] = -b_[row];
      info_[row].sign = -1.0;
      viol = -viol;
    }
    const Vec ap = a_.row(row).transpose();
    directions(ap);
    const double zz = z_.dot(ap);
    if (zz <= kDependentSq) throw std::invalid_argument("qp: equality rows are linearly dependent");
    const double t = viol / zz;
    x_ -= t * z_;
    for (int k = 0; k < q_; ++k) lambda_[k] -= t * r_[k];
    add_active(row, t);
    ++iterations_;
  }

  void add_active(int row, double lambda) {
    active_[q_] = row;
    lambda_[q_] = lambda;
    in_active_[row] = true;
    ++q_;
  }

  void remove_active(int k) {
    in_active_[active_[k]] = false;
    for (int j = k; j + 1 < q_; ++j) {
      active_[j] = active_[j + 1];
      lambda_[j] = lambda_[j + 1];
    }
    --q_;
  }

  // Re-project -g onto the final active affine set so x and the multipliers
  // are consistent to rounding.
  void polish() {
    if (q_ == 0) {
      x_ = -g_;
      return;
    }
    ActiveMat normals(n_, q_);
    Vec rhs(q_);
    for (int k = 0; k < q_; ++k) {
      normals.col(k) = a_.row(active_[k]).transpose();
      rhs[k] = b_[active_[k]];
    }
    rhs += normals.transpose() * g_;
    Eigen::HouseholderQR<ActiveMat> qr(normals);
    const auto r = qr.matrixQR().topLeftCorner(q_, q_).template triangularView<Eigen::Upper>();
    Vec y = r.transpose().solve(rhs);
    Vec lambda = -r.solve(y);
    for (int k = 0; k < q_; ++k) lambda_[k] = lambda[k];
    x_ = -g_ - normals * lambda;
  }

  double residual() const {
    Vec stationarity = x_ + g_;
    double dual = 0.0;
    double complementarity = 0.0;
    for (int k = 0; k < q_; ++k) {
      const int row = active_[k];
      stationarity += lambda_[k] * a_.row(row).transpose();
      if (!info_[row].equality) {
        dual = std::max(dual, -lambda_[k]);
        complementarity =
            std::max(complementarity, std::abs(lambda_[k] * (a_.row(row).dot(x_) - b_[row])));
      }
    }
    double primal = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double v = a_.row(i).dot(x_) - b_[i];
      primal = std::max(primal, info_[i].equality ? std::abs(v) : v);
    }
    const double g_norm = n_ > 0 ? g_.cwiseAbs().maxCoeff() : 0.0;
    const double stat = n_ > 0 ? stationarity.cwiseAbs().maxCoeff() / (1.0 + g_norm) : 0.0;
    return std::max({stat, primal, dual, complementarity});
  }

  QpSolution finish(QpStatus status) const {
    QpSolution out;
    out.theta = scale_ * Eigen::VectorXd(x_);
    out.iterations = iterations_;
    out.lambda_ineq = Eigen::VectorXd::Zero(n_ineq_);
    out.mu_eq = Eigen::VectorXd::Zero(n_eq_);
    out.sigma_lower = Eigen::VectorXd::Zero(n_);
    out.sigma_upper = Eigen::VectorXd::Zero(n_);
    if (status == QpStatus::Infeasible) {
      out.status = status;
      out.kkt_residual = kInf;
      return out;
    }
    using Kind = ActiveConstraint::Kind;
    for (int k = 0; k < q_; ++k) {
      const RowInfo& info = info_[active_[k]];
      const double value = 2.0 * scale_ * lambda_[k] / info.norm * info.sign;
      switch (info.origin.kind) {
        case Kind::Inequality: out.lambda_ineq[info.origin.index] += value; break;
        case Kind::Equality: out.mu_eq[info.origin.index] += value; break;
        case Kind::Lower: out.sigma_lower[info.origin.index] += value; break;
        case Kind::Upper: out.sigma_upper[info.origin.index] += value; break;
      }
      out.active_set.push_back(info.origin);
    }
    std::sort(out.active_set.begin(), out.active_set.end(),
              [](const ActiveConstraint& l, const ActiveConstraint& r) {
                return l.kind != r.kind ? l.kind < r.kind : l.index < r.index;
              });
    out.kkt_residual = residual();
    out.status = status;
    if (status == QpStatus::Optimal && !(out.kkt_residual <= opt_.kkt_tol))
      out.status = QpStatus::MaxIterations;
    return out;
  }

  const QpProblem& problem_;
  const QpOptions& opt_;
  int n_ = 0;
  int n_ineq_ = 0;
  int n_eq_ = 0;
  int m_ = 0;
  int live_bound_rows_ = 0;
  double scale_ = 1.0;
  bool trivially_infeasible_ = false;
  RowMat a_;
  RowRhs b_;
  std::array<RowInfo, kMaxRows> info_{};
  Vec g_;
  Vec x_;
  Vec z_;
  Vec r_;
  std::array<int, kMaxVariables> active_{};
  std::array<double, kMaxVariables> lambda_{};
  std::array<bool, kMaxRows> in_active_{};
  int q_ = 0;
  int iterations_ = 0;
};

}  // namespace

QpProblem QpProblem::unconstrained(const Eigen::VectorXd& gamma) {
  const auto n = gamma.size();
  QpProblem p;
  p.gamma = gamma;
  p.a_ineq.resize(0, n);
  p.a_eq.resize(0, n);
  p.lower = Eigen::VectorXd::Constant(n, -kInf);
  p.upper = Eigen::VectorXd::Constant(n, kInf);
  return p;
}

const char* to_string(QpStatus status) {
  switch (status) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

QpSolution solve(const QpProblem& problem, const QpOptions& options) {
  validate(problem);
  ActiveSetSolver solver(problem, options);
  return solver.run();
}

}  // namespace hpfo::qp
