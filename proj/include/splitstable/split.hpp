// split.hpp
//
// The split-sample procedure: random partition of one sample into an
// X-sample and a pair-sum Y-sample, B-fold repetition of the AL fit, the
// three estimate combiners, and the exact count of distinct partitions.

#ifndef SPLITSTABLE_SPLIT_HPP
#define SPLITSTABLE_SPLIT_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "splitstable/al.hpp"

namespace splitstable {

class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SplitConfig {
  std::size_t n;              // X-sample size, >= 2
  std::size_t m;              // Y pair count, >= 2
  int b_splits = 250;
  TGrid grid = TGrid::equispaced(9);
  std::uint64_t seed = 0;
  int threads = 1;            // results are independent of this value
  AlFitOptions fit_options{};
};

struct SplitEstimate {
  std::vector<double> sigma_hats;  // successful fits, in split order
  std::vector<double> alpha_hats;  // truncated per-split estimates
  int failures = 0;                // fits dropped for FitError
  bool reliable = true;            // false when failures exceed 50%
  double alpha1 = 0.0;             // mean on the sigma scale, then mapped
  double alpha2 = 0.0;             // mean of the mapped estimates
  double alpha3 = 0.0;             // median of the mapped estimates
};

/// One deterministic split: the first n permuted values form the
/// X-sample; the remaining 2m are summed in consecutive pairs.
std::pair<std::vector<double>, std::vector<double>> split_once(
    std::span<const double> data, std::span<const std::size_t> permutation,
    std::size_t n, std::size_t m);

/// Combines per-split scale estimates: alpha1 maps the mean sigma,
/// alpha2 averages the mapped estimates, alpha3 takes their median.
/// Throws EstimationError when sigma_hats is empty.
SplitEstimate combine_split_sigmas(std::vector<double> sigma_hats,
                                   int failures);

/// B independent random splits, one AL fit each. Split b draws its
/// permutation from substream b of config.seed, so results do not depend
/// on scheduling. Failed fits are dropped from all three combiners and
/// counted. Throws EstimationError when every split fails.
SplitEstimate sse_estimate(std::span<const double> data,
                           const SplitConfig& config);

/// Fractions of the per-split estimates pinned at 0 and at 2.
std::pair<double, double> boundary_rate(const SplitEstimate& estimate);

/// Exact number of distinct X/Y-sample constructions:
/// C(n+2m, n) * prod_{i=0}^{m-1} C(2m-2i, 2).
boost::multiprecision::cpp_int permutation_count(std::size_t n,
                                                 std::size_t m);

}  // namespace splitstable

#endif  // SPLITSTABLE_SPLIT_HPP
