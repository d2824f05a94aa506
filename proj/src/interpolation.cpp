#include "hpfo/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hpfo {

namespace {

void require_increasing(const std::vector<double>& x, const char* who) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw std::invalid_argument(std::string(who) + ": abscissae must be strictly increasing");
}

// Index k with x[k] <= t < x[k+1], clamped to [0, n-2].
std::size_t bracket(const std::vector<double>& x, double t) {
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - x.begin() - 1, 0));
  return std::min(k, x.size() - 2);
}

double sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) throw std::invalid_argument("MonotoneCubic: size mismatch");
  if (x_.size() < 2) throw std::invalid_argument("MonotoneCubic: need at least two knots");
  require_increasing(x_, "MonotoneCubic");

  const std::size_t n = x_.size();
  std::vector<double> h(n - 1);
  std::vector<double> delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x_[k + 1] - x_[k];
    delta[k] = (y_[k + 1] - y_[k]) / h[k];
  }
  slope_.assign(n, 0.0);
  if (n == 2) {
    slope_[0] = slope_[1] = delta[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    slope_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  // One-sided three-point end slopes, limited to keep the end intervals monotone.
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (sign(d) != sign(d0)) return 0.0;
    if (sign(d0) != sign(d1) && std::abs(d) > 3.0 * std::abs(d0)) d = 3.0 * d0;
    return d;
  };
  slope_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  slope_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double MonotoneCubic::operator()(double t) const {
  if (t <= x_.front()) return y_.front();
  if (t >= x_.back()) return y_.back();
  const std::size_t k = bracket(x_, t);
  const double h = x_[k + 1] - x_[k];
  const double s = (t - x_[k]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * y_[k] + h10 * h * slope_[k] + h01 * y_[k + 1] + h11 * h * slope_[k + 1];
}

TimeSeries::TimeSeries(std::vector<double> t, std::vector<double> v)
    : t_(std::move(t)), v_(std::move(v)) {
  if (t_.size() != v_.size()) throw std::invalid_argument("TimeSeries: size mismatch");
  if (t_.empty()) throw std::invalid_argument("TimeSeries: empty");
  require_increasing(t_, "TimeSeries");
}

TimeSeries TimeSeries::constant(double value) { return TimeSeries({0.0}, {value}); }

double TimeSeries::at(double t) const {
  if (t_.size() == 1 || t <= t_.front()) return v_.front();
  if (t >= t_.back()) return v_.back();
  const std::size_t k = bracket(t_, t);
  const double w = (t - t_[k]) / (t_[k + 1] - t_[k]);
  return v_[k] + w * (v_[k + 1] - v_[k]);
}

}  // namespace hpfo
