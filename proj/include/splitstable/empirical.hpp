// empirical.hpp
//
// Order statistics with linearly interpolated empirical distribution and
// quantile functions (knots at (j-1)/(n-1)), plus Gaussian kernel density
// estimation with a robust Silverman bandwidth rule.

#ifndef SPLITSTABLE_EMPIRICAL_HPP
#define SPLITSTABLE_EMPIRICAL_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace splitstable {

class DegenerateSampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An ascending sample of length >= 2, strictly sorted after tie
/// resolution. Duplicate values are separated by deterministic steps of
/// 1e-9 x IQR (range when the IQR is zero) so that the interpolated
/// quantile function has strictly increasing knots.
class SortedSample {
 public:
  explicit SortedSample(std::vector<double> values);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double min() const noexcept { return values_.front(); }
  double max() const noexcept { return values_.back(); }

  /// Interpolated EDF: 0 below the sample, 1 above, knot value
  /// (j-1)/(n-1) at the j-th order statistic.
  double edf(double x) const;

  /// Inverse of edf on (0,1).
  double quantile(double t) const;

  double iqr() const { return quantile(0.75) - quantile(0.25); }

 private:
  std::vector<double> values_;
};

double edf(const SortedSample& sample, double x);
double equantile(const SortedSample& sample, double t);

/// Gaussian kernel with a caller-chosen bandwidth in data units.
struct KdeSpec {
  double bandwidth;
};

/// (1/(n h)) sum_j K((x - X_j)/h) with standard normal K.
double kde_density(const SortedSample& sample, const KdeSpec& spec, double x);

/// Robust Silverman rule h = 0.9 min(sd, IQR/1.34) n^{-1/5}. Falls back
/// to the IQR term alone when the sample standard deviation is not
/// finite. Throws DegenerateSampleError on zero spread.
double default_bandwidth(const SortedSample& sample);

}  // namespace splitstable

#endif  // SPLITSTABLE_EMPIRICAL_HPP
