#ifndef SEASON_COMMON_HPP
#define SEASON_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace season {

using Point = std::vector<double>;
using Batch = std::vector<Point>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = std::numbers::ln2;

/// Argument outside the domain of a generator, link or distribution.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// NaN, divergence, or a bracket that could not be found.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: mismatched dimensions, weights not summing to one, bad config.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double log_sum_exp(std::span<const double> v) {
  double m = -kInf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Standard error of the mean (sample standard deviation / sqrt(n)).
inline double standard_error(std::span<const double> v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  return n > 1.0 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
}

/// Golden-section search for the maximiser of a unimodal function on [lo, hi].
inline double golden_section_max(const std::function<double(double)>& fn, double lo,
                                 double hi, double tol = 1e-12, int max_iter = 400) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int it = 0; it < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
    }
  }
  return fc >= fd ? c : d;
}

/// Bisection on a monotone decreasing function for its root; runs until the
/// bracket stops shrinking in floating point.
inline double bisect_decreasing(const std::function<double(double)>& fn, double lo,
                                double hi) {
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (fn(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                               double tol = 1e-10, int depth = 50) {
  struct Rec {
    static double run(const std::function<double(double)>& g, double a, double b, double fa,
                      double fm, double fb, double whole, double tol, int depth) {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = g(lm), frm = g(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double delta = left + right - whole;
      if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
      return run(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             run(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  };
  if (a == b) return 0.0;
  const double fa = fn(a), fb = fn(b), fm = fn(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Rec::run(fn, a, b, fa, fm, fb, whole, tol, depth);
}

inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace detail
}  // namespace season

#endif  // SEASON_COMMON_HPP
