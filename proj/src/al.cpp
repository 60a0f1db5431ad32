#include "splitstable/al.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace splitstable {

namespace {

// Shared state of the profiled one-dimensional problem. A and B are the
// density-scaled precision blocks of the quadratic form,
//   Q(phi, mu; sigma) = (q - mu 1 - sigma phi)' A (q - mu 1 - sigma phi)
//                     + (p - phi)' B (p - phi),
// so for fixed sigma the inner minimizer solves a PD linear system.
struct ProfiledObjective {
  Eigen::MatrixXd a, b;
  Eigen::VectorXd p, q;     // quantile_x, quantile_y
  Eigen::VectorXd a_one;    // A 1
  Eigen::VectorXd a_q, b_p;
  double one_a_one, one_a_q;

  explicit ProfiledObjective(const AlWeights& w) {
    const Eigen::MatrixXd sigma_inv =
        w.sigma_llt.solve(Eigen::MatrixXd::Identity(w.sigma.rows(),
                                                    w.sigma.cols()));
    a = (w.density_y * w.density_y.transpose()).cwiseProduct(sigma_inv) /
        w.lambda_tilde;
    b = (w.density_x * w.density_x.transpose()).cwiseProduct(sigma_inv) /
        (1.0 - w.lambda_tilde);
    p = w.quantile_x;
    q = w.quantile_y;
    a_one = a.rowwise().sum();
    a_q = a * q;
    b_p = b * p;
    one_a_one = a_one.sum();
    one_a_q = a_one.dot(q);
  }

  // Inner solution (phi, mu) for fixed sigma and the objective there.
  double eval(double sigma, Eigen::VectorXd* phi_out = nullptr,
              double* mu_out = nullptr) const {
    const auto k = a.rows();
    Eigen::MatrixXd m(k + 1, k + 1);
    m.topLeftCorner(k, k) = sigma * sigma * a + b;
    m.topRightCorner(k, 1) = sigma * a_one;
    m.bottomLeftCorner(1, k) = sigma * a_one.transpose();
    m(k, k) = one_a_one;
    Eigen::VectorXd rhs(k + 1);
    rhs.head(k) = sigma * a_q + b_p;
    rhs(k) = one_a_q;

    const Eigen::VectorXd z = m.ldlt().solve(rhs);
    const Eigen::VectorXd phi = z.head(k);
    const double mu = z(k);
    const Eigen::VectorXd r1 = q.array() - mu - sigma * phi.array();
    const Eigen::VectorXd r2 = p - phi;
    if (phi_out) *phi_out = phi;
    if (mu_out) *mu_out = mu;
    return r1.dot(a * r1) + r2.dot(b * r2);
  }
};

}  // namespace

TGrid::TGrid(std::vector<double> t_values) : t_values_(std::move(t_values)) {
  if (t_values_.empty()) throw std::invalid_argument("t-grid is empty");
  double prev = 0.0;
  for (double t : t_values_) {
    if (!(t > prev && t < 1.0))
      throw std::invalid_argument(
          "t-values must be strictly increasing within (0, 1)");
    prev = t;
  }
}

TGrid TGrid::equispaced(int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<double> ts(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j)
    ts[static_cast<std::size_t>(j - 1)] =
        static_cast<double>(j) / static_cast<double>(k + 1);
  return TGrid(std::move(ts));
}

Eigen::MatrixXd sigma_matrix(const TGrid& grid) {
  const int k = grid.k();
  const auto& t = grid.values();
  Eigen::MatrixXd s(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      s(i, j) = std::min(t[static_cast<std::size_t>(i)],
                         t[static_cast<std::size_t>(j)]) -
                t[static_cast<std::size_t>(i)] * t[static_cast<std::size_t>(j)];
  return s;
}

AlWeights make_al_weights(const SortedSample& x, const SortedSample& y,
                          const TGrid& grid) {
  const int k = grid.k();
  AlWeights w;
  w.lambda_tilde = static_cast<double>(x.size()) /
                   static_cast<double>(x.size() + y.size());
  w.sigma = sigma_matrix(grid);
  w.sigma_llt.compute(w.sigma);
  if (w.sigma_llt.info() != Eigen::Success)
    throw std::runtime_error("Sigma factorization failed");

  w.quantile_x.resize(k);
  w.quantile_y.resize(k);
  w.density_x.resize(k);
  w.density_y.resize(k);
  const KdeSpec kde_x{default_bandwidth(x)};
  const KdeSpec kde_y{default_bandwidth(y)};
  for (int j = 0; j < k; ++j) {
    const double t = grid.values()[static_cast<std::size_t>(j)];
    w.quantile_x(j) = x.quantile(t);
    w.quantile_y(j) = y.quantile(t);
    w.density_x(j) = kde_density(x, kde_x, w.quantile_x(j));
    w.density_y(j) = kde_density(y, kde_y, w.quantile_y(j));
    if (w.density_x(j) <= kDensityFloor || w.density_y(j) <= kDensityFloor)
      throw FitError("density weight below floor at t = " +
                     std::to_string(t));
  }
  return w;
}

double al_objective(const Eigen::VectorXd& theta, const AlWeights& weights) {
  const auto k = weights.sigma.rows();
  if (theta.size() != k + 2)
    throw std::invalid_argument("theta must have length k + 2");
  const Eigen::VectorXd phi = theta.head(k);
  const double mu = theta(k);
  const double sigma = theta(k + 1);

  const Eigen::VectorXd w1 = weights.density_y.array() *
                             (weights.quantile_y.array() - mu -
                              sigma * phi.array());
  const Eigen::VectorXd w2 =
      weights.density_x.array() *
      (weights.quantile_x.array() - phi.array());
  // Omega is block diagonal, so the quadratic form splits per block.
  const double q1 = w1.dot(weights.sigma_llt.solve(w1)) / weights.lambda_tilde;
  const double q2 =
      w2.dot(weights.sigma_llt.solve(w2)) / (1.0 - weights.lambda_tilde);
  return q1 + q2;
}

AlFit al_fit(const SortedSample& x, const SortedSample& y, const TGrid& grid,
             const AlFitOptions& options) {
  const AlWeights weights = make_al_weights(x, y, grid);
  const ProfiledObjective prof(weights);

  constexpr double golden = 0.6180339887498949;  // (sqrt 5 - 1) / 2
  double lo = std::log(options.sigma_lo);
  double hi = std::log(options.sigma_hi);
  double c = hi - golden * (hi - lo);
  double d = lo + golden * (hi - lo);
  double fc = prof.eval(std::exp(c));
  double fd = prof.eval(std::exp(d));
  int iterations = 2;
  while (hi - lo > options.tol && iterations < options.max_iters) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - golden * (hi - lo);
      fc = prof.eval(std::exp(c));
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + golden * (hi - lo);
      fd = prof.eval(std::exp(d));
    }
    ++iterations;
  }

  AlFit fit;
  fit.iterations = iterations;
  double log_sigma = 0.5 * (lo + hi);
  fit.converged = (hi - lo) <= options.tol;

  // A minimizer pinned to a bracket end is reported as that bound.
  if (log_sigma - std::log(options.sigma_lo) < 2.0 * options.tol) {
    log_sigma = std::log(options.sigma_lo);
    fit.converged = false;
  } else if (std::log(options.sigma_hi) - log_sigma < 2.0 * options.tol) {
    log_sigma = std::log(options.sigma_hi);
    fit.converged = false;
  }

  fit.sigma = std::exp(log_sigma);
  fit.objective = prof.eval(fit.sigma, &fit.phi, &fit.mu);

  if ((hi - lo) > options.tol)
    throw FitError("sigma search exhausted " +
                       std::to_string(options.max_iters) + " iterations",
                   fit);
  return fit;
}

double alpha_asymptotic_variance(double alpha, double gamma22) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::domain_error("alpha must lie in (0, 2]");
  if (!(gamma22 > 0.0))
    throw std::domain_error("gamma22 must be positive");
  const double l2 = std::log(2.0);
  return alpha * alpha * alpha * alpha * gamma22 / (l2 * l2);
}

Gamma22Estimate estimate_gamma22(const StableParams& params,
                                 const TGrid& grid, std::size_t n,
                                 std::size_t m, int reps, Rng& rng) {
  params.validate();
  if (reps < 100) throw std::domain_error("estimate_gamma22 needs reps >= 100");
  const double sigma_true = sigma_from_alpha(params.alpha);
  const StableParams y_params = pair_sum_params(params);
  const double rate =
      std::sqrt(static_cast<double>(n) * static_cast<double>(m) /
                static_cast<double>(n + m));

  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(reps));
  int excluded = 0;
  for (int r = 0; r < reps; ++r) {
    Rng stream = rng.substream(static_cast<std::uint64_t>(r));
    try {
      SortedSample x(sample_stable(params, n, stream));
      SortedSample y(sample_stable(y_params, m, stream));
      const AlFit fit = al_fit(x, y, grid);
      stats.push_back(rate * (fit.sigma - sigma_true) / sigma_true);
    } catch (const FitError&) {
      ++excluded;
    }
  }
  if (stats.size() < 2)
    throw FitError("too few successful fits to estimate Gamma22");

  const auto count = static_cast<double>(stats.size());
  double mean = 0.0;
  for (double s : stats) mean += s;
  mean /= count;
  double var = 0.0;
  for (double s : stats) var += (s - mean) * (s - mean);
  var /= count - 1.0;
  // Large-sample standard error of a sample variance, treating the
  // normalized statistic as approximately normal.
  const double se = var * std::sqrt(2.0 / (count - 1.0));
  return {var, se, excluded};
}

}  // namespace splitstable
