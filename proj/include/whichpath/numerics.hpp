#ifndef WHICHPATH_NUMERICS_HPP
#define WHICHPATH_NUMERICS_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

namespace whichpath {

/// Bisection on a bracket [lo, hi] with f(lo), f(hi) of opposite sign.
/// Runs until the bracket stops shrinking in floating point or `x_tol` is met.
template <typename F>
double bisect(F&& f, double lo, double hi, double x_tol = 0.0) {
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0) return lo;
  if (f_hi == 0) return hi;
  if ((f_lo > 0) == (f_hi > 0)) throw std::invalid_argument("bisect: root is not bracketed");
  for (int i = 0; i < 400; ++i) {
    const double mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi || hi - lo <= x_tol) break;
    const double f_mid = f(mid);
    if (f_mid == 0) return mid;
    if ((f_mid > 0) == (f_lo > 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return lo + (hi - lo) / 2;
}

/// Trapezoid rule on a (not necessarily uniform) sorted grid.
template <typename Derived>
double trapezoid(const Eigen::ArrayXd& x, const Eigen::ArrayBase<Derived>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("trapezoid: size mismatch");
  double sum = 0;
  for (Eigen::Index i = 1; i < x.size(); ++i) sum += 0.5 * (x(i) - x(i - 1)) * (y(i) + y(i - 1));
  return sum;
}

inline bool is_sorted(const Eigen::ArrayXd& x) {
  for (Eigen::Index i = 1; i < x.size(); ++i)
    if (!(x(i) >= x(i - 1))) return false;
  return true;
}

}  // namespace whichpath

#endif  // WHICHPATH_NUMERICS_HPP
