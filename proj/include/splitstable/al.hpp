// al.hpp
//
// Two-sample asymptotic-likelihood estimation of location and scale from
// interpolated sample quantiles: the Brownian-bridge covariance Sigma,
// the density-weighted residual vector V(theta), the quadratic objective
// Q(theta) = V' Omega^{-1} V, its minimizer, and the delta-method
// variance transform for the index estimate.

#ifndef SPLITSTABLE_AL_HPP
#define SPLITSTABLE_AL_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <optional>
#include <stdexcept>
#include <vector>

#include "splitstable/empirical.hpp"
#include "splitstable/rng.hpp"
#include "splitstable/stable.hpp"

namespace splitstable {

/// Strictly increasing quantile levels 0 < t_1 < ... < t_k < 1.
class TGrid {
 public:
  explicit TGrid(std::vector<double> t_values);

  /// Equally spaced levels t_j = j/(k+1).
  static TGrid equispaced(int k);

  int k() const noexcept { return static_cast<int>(t_values_.size()); }
  const std::vector<double>& values() const noexcept { return t_values_; }

 private:
  std::vector<double> t_values_;
};

/// Covariance of the limiting quantile process: Sigma_ij = min(t_i, t_j)
/// - t_i t_j. Symmetric positive definite for any valid grid.
Eigen::MatrixXd sigma_matrix(const TGrid& grid);

/// Everything the objective needs from the two samples: the plug-in
/// quantiles, the kernel density weights at those quantiles, the sample
/// balance lambda = n/(n+m) and the (Cholesky-factored) Sigma.
struct AlWeights {
  double lambda_tilde = 0.5;
  Eigen::MatrixXd sigma;
  Eigen::LLT<Eigen::MatrixXd> sigma_llt;
  Eigen::VectorXd quantile_x, quantile_y;  // F^{-1}(t_j), G^{-1}(t_j)
  Eigen::VectorXd density_x, density_y;    // f(F^{-1}(t_j)), g(G^{-1}(t_j))
};

struct AlFit {
  Eigen::VectorXd phi;  // fitted X-quantiles, length k
  double mu = 0.0;
  double sigma = 1.0;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Fit failure: density weights below the floor, or the 1-D search
/// exhausting its iteration budget (best-so-far attached in that case).
class FitError : public std::runtime_error {
 public:
  explicit FitError(const std::string& what,
                    std::optional<AlFit> best = std::nullopt)
      : std::runtime_error(what), best_so_far(std::move(best)) {}

  std::optional<AlFit> best_so_far;
};

// Plug-in density weights smaller than this abort the fit: quantiles of
// heavy-tailed splits can land in regions where the KDE underflows, and
// dividing by such weights is meaningless.
inline constexpr double kDensityFloor = 1e-30;

/// Builds the plug-in quantities from two samples. Bandwidths follow
/// default_bandwidth per sample. Throws FitError on degenerate weights.
AlWeights make_al_weights(const SortedSample& x, const SortedSample& y,
                          const TGrid& grid);

/// Q(theta) for theta = (phi_1..phi_k, mu, sigma): assembles
/// W1_j = g(G^{-1}(t_j)) (G^{-1}(t_j) - mu - sigma phi_j),
/// W2_j = f(F^{-1}(t_j)) (F^{-1}(t_j) - phi_j)
/// and returns V' Omega^{-1} V with Omega = blockdiag(lambda Sigma,
/// (1-lambda) Sigma). Nonnegative; zero exactly when V = 0.
double al_objective(const Eigen::VectorXd& theta, const AlWeights& weights);

struct AlFitOptions {
  double sigma_lo = 1.05;
  double sigma_hi = 64.0;
  double tol = 1e-6;   // absolute, on log sigma
  int max_iters = 200;
};

/// Minimizes Q. For fixed sigma the objective is a positive-definite
/// quadratic in (phi, mu), solved exactly; the remaining one-dimensional
/// problem in log sigma is bracketed by golden-section search. Hitting a
/// bracket end returns that bound with converged = false (the truncated
/// alpha map then applies downstream).
AlFit al_fit(const SortedSample& x, const SortedSample& y, const TGrid& grid,
             const AlFitOptions& options = {});

/// Delta-method asymptotic variance of the index estimate:
/// alpha^4 Gamma22 / (log 2)^2.
double alpha_asymptotic_variance(double alpha, double gamma22);

struct Gamma22Estimate {
  double value;
  double std_error;
  int excluded;  // fits dropped for FitError
};

/// Monte-Carlo estimate of Gamma22: the empirical variance of
/// sqrt(nm/(n+m)) (sigma_hat - sigma)/sigma over independent two-sample
/// fits, X ~ params (size n) against Y ~ pair_sum_params (size m).
Gamma22Estimate estimate_gamma22(const StableParams& params,
                                 const TGrid& grid, std::size_t n,
                                 std::size_t m, int reps, Rng& rng);

}  // namespace splitstable

#endif  // SPLITSTABLE_AL_HPP
