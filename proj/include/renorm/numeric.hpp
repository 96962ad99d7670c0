#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace renorm {

/// Neumaier (improved Kahan) compensated accumulator.
template <typename Real = double>
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(Real init) : sum_(init) {}

  CompensatedSum& operator+=(Real x) {
    const Real t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
    return *this;
  }
  CompensatedSum& operator-=(Real x) { return *this += -x; }

  Real value() const { return sum_ + comp_; }

 private:
  Real sum_{0};
  Real comp_{0};
};

/// Closed interval [lo, hi] used for rigorous tail brackets.
struct Interval {
  double lo{0.0};
  double hi{0.0};

  double mid() const { return 0.5 * (lo + hi); }
  double radius() const { return 0.5 * (hi - lo); }
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }

  static Interval point(double x) { return {x, x}; }

  friend Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
  friend Interval operator*(double k, Interval a) {
    return k >= 0 ? Interval{k * a.lo, k * a.hi} : Interval{k * a.hi, k * a.lo};
  }
};

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kEulerGamma = 0.577215664901532860606512090082402431;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace renorm
