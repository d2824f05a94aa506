#pragma once

#include <span>
#include <vector>

namespace hpfo {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson
/// slopes). Between two knots the curve stays within the knot values, so it
/// never overshoots the data. Outside the knot range it holds the end values.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  /// Requires at least two knots with strictly increasing x.
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;

  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }
  bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slope_;
};

/// Piecewise-linear series on a strictly increasing time grid, held constant
/// beyond either end.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(std::vector<double> t, std::vector<double> v);
  static TimeSeries constant(double value);

  double at(double t) const;

  std::span<const double> times() const { return t_; }
  std::span<const double> values() const { return v_; }
  bool empty() const { return t_.empty(); }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> t_;
  std::vector<double> v_;
};

}  // namespace hpfo
