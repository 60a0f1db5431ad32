#include "splitstable/split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "splitstable/parallel.hpp"

namespace splitstable {

std::pair<std::vector<double>, std::vector<double>> split_once(
    std::span<const double> data, std::span<const std::size_t> permutation,
    std::size_t n, std::size_t m) {
  if (data.size() != n + 2 * m)
    throw std::invalid_argument("data length must equal n + 2m");
  if (permutation.size() != data.size())
    throw std::invalid_argument("permutation length must match data");

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = data[permutation[i]];
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i)
    y[i] = data[permutation[n + 2 * i]] + data[permutation[n + 2 * i + 1]];
  return {std::move(x), std::move(y)};
}

SplitEstimate sse_estimate(std::span<const double> data,
                           const SplitConfig& config) {
  if (config.n < 2 || config.m < 2)
    throw std::invalid_argument("split sizes must be >= 2");
  if (data.size() != config.n + 2 * config.m)
    throw std::invalid_argument("data length must equal n + 2m");
  if (config.b_splits < 1)
    throw std::invalid_argument("B must be >= 1");

  const auto b_total = static_cast<std::size_t>(config.b_splits);
  std::vector<double> sigma_slots(b_total,
                                  std::numeric_limits<double>::quiet_NaN());
  const Rng master(config.seed);

  parallel_for(b_total, config.threads, [&](std::size_t b) {
    Rng stream = master.substream(b);
    std::vector<std::size_t> perm(data.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    stream.shuffle(perm);
    auto [x_raw, y_raw] = split_once(data, perm, config.n, config.m);
    try {
      SortedSample x(std::move(x_raw));
      SortedSample y(std::move(y_raw));
      sigma_slots[b] =
          al_fit(x, y, config.grid, config.fit_options).sigma;
    } catch (const FitError&) {
      // dropped from the combiners, counted below
    } catch (const DegenerateSampleError&) {
    }
  });

  int failures = 0;
  std::vector<double> sigmas;
  sigmas.reserve(b_total);
  for (double s : sigma_slots) {
    if (std::isnan(s))
      ++failures;
    else
      sigmas.push_back(s);
  }
  return combine_split_sigmas(std::move(sigmas), failures);
}

SplitEstimate combine_split_sigmas(std::vector<double> sigma_hats,
                                   int failures) {
  if (sigma_hats.empty())
    throw EstimationError("all " + std::to_string(failures) +
                          " split fits failed");
  SplitEstimate est;
  est.failures = failures;
  est.reliable = 2 * failures <=
                 failures + static_cast<int>(sigma_hats.size());
  est.sigma_hats = std::move(sigma_hats);
  est.alpha_hats.reserve(est.sigma_hats.size());
  for (double s : est.sigma_hats)
    est.alpha_hats.push_back(alpha_from_sigma(s));

  const double sigma_bar =
      std::accumulate(est.sigma_hats.begin(), est.sigma_hats.end(), 0.0) /
      static_cast<double>(est.sigma_hats.size());
  est.alpha1 = alpha_from_sigma(sigma_bar);
  est.alpha2 =
      std::accumulate(est.alpha_hats.begin(), est.alpha_hats.end(), 0.0) /
      static_cast<double>(est.alpha_hats.size());

  std::vector<double> sorted_alphas = est.alpha_hats;
  std::sort(sorted_alphas.begin(), sorted_alphas.end());
  const std::size_t h = sorted_alphas.size() / 2;
  est.alpha3 = sorted_alphas.size() % 2 == 1
                   ? sorted_alphas[h]
                   : 0.5 * (sorted_alphas[h - 1] + sorted_alphas[h]);
  return est;
}

std::pair<double, double> boundary_rate(const SplitEstimate& estimate) {
  if (estimate.alpha_hats.empty())
    throw std::invalid_argument("no successful split estimates");
  const auto count = static_cast<double>(estimate.alpha_hats.size());
  double at0 = 0.0, at2 = 0.0;
  for (double a : estimate.alpha_hats) {
    if (a == 0.0) at0 += 1.0;
    if (a == 2.0) at2 += 1.0;
  }
  return {at0 / count, at2 / count};
}

boost::multiprecision::cpp_int permutation_count(std::size_t n,
                                                 std::size_t m) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  using boost::multiprecision::cpp_int;

  auto binomial = [](std::size_t top, std::size_t bottom) {
    cpp_int result = 1;
    bottom = std::min(bottom, top - bottom);
    for (std::size_t i = 1; i <= bottom; ++i) {
      result *= static_cast<std::uint64_t>(top - bottom + i);
      result /= static_cast<std::uint64_t>(i);  // exact at every step
    }
    return result;
  };

  cpp_int count = binomial(n + 2 * m, n);
  for (std::size_t i = 0; i < m; ++i)
    count *= binomial(2 * m - 2 * i, 2);
  return count;
}

}  // namespace splitstable
