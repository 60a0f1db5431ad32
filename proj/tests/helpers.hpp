// helpers.hpp
//
// Test-only oracles kept independent of the library code paths they
// check: Kolmogorov-Smirnov tests, the standard normal CDF, adaptive
// Simpson quadrature and the empirical characteristic function.

#ifndef SPLITSTABLE_TESTS_HELPERS_HPP
#define SPLITSTABLE_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace test_support {

// Asymptotic Kolmogorov critical value at level 0.01.
inline constexpr double kKsCrit01 = 1.6276236115189502;

inline double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

// One-sample KS statistic sqrt(n) D_n against a fully specified CDF.
inline double ks_one_sample(std::vector<double> sample,
                            const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, std::abs(f - lo), std::abs(hi - f)});
  }
  return std::sqrt(n) * d;
}

// Two-sample KS statistic sqrt(nm/(n+m)) D_{n,m}.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto n = static_cast<double>(a.size());
  const auto m = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n -
                             static_cast<double>(j) / m));
  }
  return std::sqrt(n * m / (n + m)) * d;
}

inline double simpson(const std::function<double(double)>& f, double a,
                      double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_impl(const std::function<double(double)>& f,
                                    double a, double b, double fa, double fm,
                                    double fb, double whole, double eps,
                                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_impl(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
         adaptive_simpson_impl(f, m, b, fm, frm, fb, right, eps / 2,
                               depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double eps = 1e-9) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson(f, a, b, fa, fm, fb);
  return adaptive_simpson_impl(f, a, b, fa, fm, fb, whole, eps, 40);
}

inline std::complex<double> empirical_cf(const std::vector<double>& sample,
                                         double t) {
  std::complex<double> acc{0.0, 0.0};
  for (double x : sample) acc += std::complex<double>(std::cos(t * x),
                                                      std::sin(t * x));
  return acc / static_cast<double>(sample.size());
}

}  // namespace test_support

#endif  // SPLITSTABLE_TESTS_HELPERS_HPP
