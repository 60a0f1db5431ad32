// stable.hpp
//
// Stable-distribution core: the S(alpha, beta, gamma, delta)
// parameterization in its continuous form, the characteristic function,
// the alpha <-> scale-ratio maps, pair-sum parameter arithmetic,
// Chambers-Mallows-Stuck variate generation and a brute-force numeric
// quantile used to build lookup tables and test fixtures.

#ifndef SPLITSTABLE_STABLE_HPP
#define SPLITSTABLE_STABLE_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "splitstable/rng.hpp"

namespace splitstable {

/// Parameters of a stable law. alpha in (0,2], beta in [-1,1], gamma > 0.
struct StableParams {
  double alpha;
  double beta;
  double gamma;
  double delta;

  /// Throws std::domain_error when any field is outside its domain.
  void validate() const;
};

// |alpha - 1| below this routes to the alpha == 1 branch of the
// characteristic function, of delta_prime and of the sampler's
// parameterization shift. Keeps tan(pi alpha / 2) out of blow-up range.
inline constexpr double kAlphaBranchTol = 1e-8;

/// Characteristic function psi(t) = E exp(itX).
std::complex<double> char_function(const StableParams& params, double t);

/// Scale ratio sigma = 2^{1/alpha} relating X + X' to X.
double sigma_from_alpha(double alpha);

/// Inverse map truncated to the parameter space:
/// (0,1) -> 0, [1, sqrt2) -> 2, [sqrt2, inf) -> log 2 / log sigma.
double alpha_from_sigma(double sigma);

/// A scale ratio together with its truncated index estimate.
struct ScaleAlphaPair {
  double sigma;
  double alpha_hat;
};

ScaleAlphaPair make_scale_alpha(double sigma);

/// Location parameter of X + X' for X ~ params.
double delta_prime(const StableParams& params);

/// Distribution of X + X': scale 2^{1/alpha} gamma, location delta_prime.
StableParams pair_sum_params(const StableParams& params);

// Chambers-Mallows-Stuck variates matching char_function. CMS natively
// generates the classical parameterization; for alpha != 1 the output is
// shifted by -beta gamma tan(pi alpha / 2) to land in the continuous one
// (the two parameterizations coincide at alpha == 1).
double sample_stable_one(const StableParams& params, Rng& rng);
std::vector<double> sample_stable(const StableParams& params,
                                  std::size_t count, Rng& rng);

struct QuantileEstimate {
  double value;
  double std_error;
};

/// Order-statistic estimate of F^{-1}(p) from mc_size fresh variates.
/// The standard error comes from a distribution-free order-statistic
/// bracket at p +- 1.96 sqrt(p(1-p)/N). Requires mc_size >= 10^4.
QuantileEstimate numeric_quantile(const StableParams& params, double p,
                                  std::size_t mc_size, Rng& rng);

/// Several quantiles from one shared Monte-Carlo sample.
std::vector<QuantileEstimate> numeric_quantiles(const StableParams& params,
                                                std::span<const double> probs,
                                                std::size_t mc_size, Rng& rng);

}  // namespace splitstable

#endif  // SPLITSTABLE_STABLE_HPP
