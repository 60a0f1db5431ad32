#include "splitstable/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace splitstable {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

bool near_one(double alpha) { return std::abs(alpha - 1.0) < kAlphaBranchTol; }

// Type-7 interpolated order statistic on an ascending vector.
double sorted_quantile(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  const double h = p * static_cast<double>(n - 1);
  auto j = static_cast<std::size_t>(h);
  if (j >= n - 1) return sorted.back();
  const double w = h - static_cast<double>(j);
  return sorted[j] * (1.0 - w) + sorted[j + 1] * w;
}

}  // namespace

void StableParams::validate() const {
  if (!(std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(gamma) &&
        std::isfinite(delta)))
    throw std::domain_error("stable parameters must be finite");
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::domain_error("alpha must lie in (0, 2], got " +
                            std::to_string(alpha));
  if (!(beta >= -1.0 && beta <= 1.0))
    throw std::domain_error("beta must lie in [-1, 1], got " +
                            std::to_string(beta));
  if (!(gamma > 0.0))
    throw std::domain_error("gamma must be positive, got " +
                            std::to_string(gamma));
}

std::complex<double> char_function(const StableParams& params, double t) {
  params.validate();
  if (!std::isfinite(t)) throw std::domain_error("t must be finite");
  if (t == 0.0) return {1.0, 0.0};

  const double at = std::abs(t);
  const double sgn = t > 0.0 ? 1.0 : -1.0;
  std::complex<double> exponent;
  if (near_one(params.alpha)) {
    const double re = -params.gamma * at;
    const double im = params.delta * t - params.beta * (2.0 / kPi) * sgn *
                                             params.gamma * at *
                                             std::log(params.gamma * at);
    exponent = {re, im};
  } else {
    const double ga = std::pow(params.gamma * at, params.alpha);
    const double ta = std::tan(kPi * params.alpha / 2.0);
    const double re = -ga;
    const double im =
        params.delta * t -
        params.beta * ta * sgn * ga *
            (std::pow(params.gamma * at, 1.0 - params.alpha) - 1.0);
    exponent = {re, im};
  }
  return std::exp(exponent);
}

double sigma_from_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::domain_error("alpha must lie in (0, 2]");
  return std::pow(2.0, 1.0 / alpha);
}

double alpha_from_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::domain_error("sigma must be positive and finite");
  if (sigma < 1.0) return 0.0;
  if (sigma < kSqrt2) return 2.0;
  return std::log(2.0) / std::log(sigma);
}

ScaleAlphaPair make_scale_alpha(double sigma) {
  return {sigma, alpha_from_sigma(sigma)};
}

double delta_prime(const StableParams& params) {
  params.validate();
  const double bg = params.beta * params.gamma;
  if (near_one(params.alpha)) {
    return 2.0 * params.delta +
           (2.0 / kPi) * bg *
               (2.0 * std::log(2.0 * params.gamma) -
                2.0 * std::log(params.gamma));
  }
  const double ta = std::tan(kPi * params.alpha / 2.0);
  return 2.0 * params.delta +
         ta * bg * (std::pow(2.0, 1.0 / params.alpha) - 2.0);
}

StableParams pair_sum_params(const StableParams& params) {
  return {params.alpha, params.beta,
          std::pow(2.0, 1.0 / params.alpha) * params.gamma,
          delta_prime(params)};
}

double sample_stable_one(const StableParams& params, Rng& rng) {
  const double v = (rng.uniform01() - 0.5) * kPi;  // uniform(-pi/2, pi/2)
  const double w = rng.exponential();

  if (near_one(params.alpha)) {
    const double half_pi = kPi / 2.0;
    const double a = half_pi + params.beta * v;
    const double z =
        (2.0 / kPi) *
        (a * std::tan(v) -
         params.beta * std::log((half_pi * w * std::cos(v)) / a));
    return params.gamma * z + params.delta;
  }

  const double alpha = params.alpha;
  const double ta = std::tan(kPi * alpha / 2.0);
  const double bt = params.beta * ta;
  const double b0 = std::atan(bt) / alpha;
  const double s0 = std::pow(1.0 + bt * bt, 1.0 / (2.0 * alpha));
  const double cos_v = std::cos(v);
  // cos(v - alpha(v + b0)) > 0 almost surely; clamp guards rounding.
  const double c = std::max(std::cos(v - alpha * (v + b0)), 1e-300);
  const double z = s0 * std::sin(alpha * (v + b0)) /
                   std::pow(cos_v, 1.0 / alpha) *
                   std::pow(c / w, (1.0 - alpha) / alpha);
  return params.gamma * z + params.delta - params.beta * params.gamma * ta;
}

std::vector<double> sample_stable(const StableParams& params,
                                  std::size_t count, Rng& rng) {
  params.validate();
  if (count < 1) throw std::domain_error("count must be >= 1");
  std::vector<double> out(count);
  for (auto& x : out) x = sample_stable_one(params, rng);
  return out;
}

std::vector<QuantileEstimate> numeric_quantiles(const StableParams& params,
                                                std::span<const double> probs,
                                                std::size_t mc_size,
                                                Rng& rng) {
  params.validate();
  if (mc_size < 10000)
    throw std::domain_error("numeric_quantile requires mc_size >= 10^4");
  for (double p : probs)
    if (!(p > 0.0 && p < 1.0))
      throw std::domain_error("quantile probability must lie in (0, 1)");

  std::vector<double> sample = sample_stable(params, mc_size, rng);
  std::sort(sample.begin(), sample.end());

  constexpr double z = 1.959963984540054;  // normal 0.975 quantile
  const auto n = static_cast<double>(mc_size);
  std::vector<QuantileEstimate> out;
  out.reserve(probs.size());
  for (double p : probs) {
    const double value = sorted_quantile(sample, p);
    const double d = z * std::sqrt(p * (1.0 - p) / n);
    const double lo = std::max(p - d, 0.5 / n);
    const double hi = std::min(p + d, 1.0 - 0.5 / n);
    const double se =
        (sorted_quantile(sample, hi) - sorted_quantile(sample, lo)) /
        (2.0 * z);
    out.push_back({value, se});
  }
  return out;
}

QuantileEstimate numeric_quantile(const StableParams& params, double p,
                                  std::size_t mc_size, Rng& rng) {
  const double probs[] = {p};
  return numeric_quantiles(params, probs, mc_size, rng)[0];
}

}  // namespace splitstable
