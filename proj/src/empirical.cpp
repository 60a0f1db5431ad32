#include "splitstable/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace splitstable {

namespace {

double raw_quantile(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  const double h = p * static_cast<double>(n - 1);
  auto j = static_cast<std::size_t>(h);
  if (j >= n - 1) return sorted.back();
  const double w = h - static_cast<double>(j);
  return sorted[j] * (1.0 - w) + sorted[j + 1] * w;
}

}  // namespace

SortedSample::SortedSample(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.size() < 2)
    throw std::invalid_argument("sample needs at least 2 values");
  for (double v : values_)
    if (!std::isfinite(v))
      throw std::invalid_argument("sample values must be finite");
  std::sort(values_.begin(), values_.end());

  // Stable laws are continuous, so ties are floating-point artifacts;
  // separate them by a step far below any statistical resolution.
  double scale = raw_quantile(values_, 0.75) - raw_quantile(values_, 0.25);
  if (scale <= 0.0) scale = values_.back() - values_.front();
  if (scale <= 0.0)
    throw DegenerateSampleError("all sample values are equal");
  const double step = 1e-9 * scale;
  for (std::size_t i = 1; i < values_.size(); ++i)
    if (values_[i] <= values_[i - 1]) values_[i] = values_[i - 1] + step;
}

double SortedSample::edf(double x) const {
  if (x < values_.front()) return 0.0;
  if (x > values_.back()) return 1.0;
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  const auto j = static_cast<std::size_t>(it - values_.begin());
  const auto n = static_cast<double>(values_.size());
  if (j == values_.size()) return 1.0;
  // x lies in [X_(j), X_(j+1)) with knot values (j-1)/(n-1), j/(n-1).
  const double lo = values_[j - 1];
  const double hi = values_[j];
  const double w = (x - lo) / (hi - lo);
  return (static_cast<double>(j - 1) + w) / (n - 1.0);
}

double SortedSample::quantile(double t) const {
  if (!(t > 0.0 && t < 1.0))
    throw std::domain_error("quantile level must lie in (0, 1)");
  return raw_quantile(values_, t);
}

double edf(const SortedSample& sample, double x) { return sample.edf(x); }

double equantile(const SortedSample& sample, double t) {
  return sample.quantile(t);
}

double kde_density(const SortedSample& sample, const KdeSpec& spec,
                   double x) {
  if (!(spec.bandwidth > 0.0))
    throw std::domain_error("bandwidth must be positive");
  const double h = spec.bandwidth;
  double acc = 0.0;
  for (double v : sample.values()) {
    const double z = (x - v) / h;
    acc += std::exp(-0.5 * z * z);
  }
  const auto n = static_cast<double>(sample.size());
  return acc / (n * h * std::sqrt(2.0 * std::numbers::pi));
}

double default_bandwidth(const SortedSample& sample) {
  const auto n = static_cast<double>(sample.size());
  const double mean =
      std::accumulate(sample.values().begin(), sample.values().end(), 0.0) /
      n;
  double ss = 0.0;
  for (double v : sample.values()) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  const double iqr_term = sample.iqr() / 1.34;
  const double spread =
      std::isfinite(sd) ? std::min(sd, iqr_term) : iqr_term;
  const double h = 0.9 * spread * std::pow(n, -0.2);
  if (!(h > 0.0) || !std::isfinite(h))
    throw DegenerateSampleError("sample spread too small for a bandwidth");
  return h;
}

}  // namespace splitstable
