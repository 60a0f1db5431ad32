// mqe.hpp
//
// McCulloch-style quantile estimator of the stability index: a lookup
// table of the quantile-ratio statistics nu_alpha and nu_beta built by
// brute-force simulation, inverted by interpolation at estimation time.

#ifndef SPLITSTABLE_MQE_HPP
#define SPLITSTABLE_MQE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "splitstable/rng.hpp"

namespace splitstable {

class TableBuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// nu_alpha = (q95 - q05)/(q75 - q25) and
/// nu_beta  = (q95 + q05 - 2 q50)/(q95 - q05)
/// tabulated over an (alpha, beta) grid, row-major in alpha. nu_alpha is
/// strictly decreasing in alpha down each beta column; the build fails
/// otherwise.
struct MqeTable {
  std::vector<double> alpha_grid;  // ascending, within [0.5, 2]
  std::vector<double> beta_grid;   // ascending, symmetric about 0
  std::vector<double> nu_alpha;    // alpha_grid.size() x beta_grid.size()
  std::vector<double> nu_beta;
  std::uint64_t mc_size = 0;
  std::uint64_t seed = 0;
  int version = 1;

  double nu_alpha_at(std::size_t i, std::size_t j) const {
    return nu_alpha[i * beta_grid.size() + j];
  }
  double nu_beta_at(std::size_t i, std::size_t j) const {
    return nu_beta[i * beta_grid.size() + j];
  }
};

/// Default grid of the shipped table: alpha 0.5(0.1)2.0,
/// beta 0(0.25)1 mirrored to negative values.
std::vector<double> mqe_default_alpha_grid();
std::vector<double> mqe_default_beta_grid();

/// Brute-force table build: mc_size variates per (alpha, |beta|) cell,
/// negative-beta columns derived by symmetry. Cells parallelize over
/// `threads`; cell (i, j) draws from substream i*cols+j of rng's seed, so
/// the table is reproducible for a given seed regardless of scheduling.
/// Requires mc_size >= 10^6; throws TableBuildError when the sampled
/// nu_alpha is not strictly decreasing in alpha.
MqeTable build_mqe_table(std::span<const double> alpha_grid,
                         std::span<const double> beta_grid,
                         std::size_t mc_size, Rng& rng, int threads = 1);

/// Joint inverse interpolation of a (nu_alpha, nu_beta) pair: nu_beta
/// selects the beta slice in which nu_alpha is inverted, iterated to a
/// fixed point. Returns alpha clamped to [0.5, 2].
double mqe_invert(double nu_a, double nu_b, const MqeTable& table);

/// Quantile-ratio estimate of alpha from data (length >= 20): sample
/// nu statistics at the (.05,.25,.5,.75,.95) levels fed through
/// mqe_invert.
double mqe_estimate(std::span<const double> data, const MqeTable& table);

void save_mqe_table(const MqeTable& table, const std::filesystem::path& path);
std::optional<MqeTable> load_mqe_table(const std::filesystem::path& path);

/// Loads `path` when its header matches (grids, mc_size, seed, version);
/// otherwise rebuilds and rewrites the file.
MqeTable load_or_build_mqe_table(const std::filesystem::path& path,
                                 std::span<const double> alpha_grid,
                                 std::span<const double> beta_grid,
                                 std::size_t mc_size, std::uint64_t seed,
                                 int threads = 1);

}  // namespace splitstable

#endif  // SPLITSTABLE_MQE_HPP
