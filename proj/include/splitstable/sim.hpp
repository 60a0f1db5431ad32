// sim.hpp
//
// Monte-Carlo experiment runner: draws replicated samples, applies the
// requested estimators, aggregates bias/RMSE/boundary statistics and
// persists per-replication records and aggregates as CSV.

#ifndef SPLITSTABLE_SIM_HPP
#define SPLITSTABLE_SIM_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "splitstable/mqe.hpp"
#include "splitstable/split.hpp"
#include "splitstable/stable.hpp"

namespace splitstable {

struct ExperimentSpec {
  StableParams params{1.0, 0.0, 1.0, 0.0};
  std::size_t total_size = 300;  // n + 2m
  std::size_t n = 100;
  std::size_t m = 100;
  int b_splits = 250;
  TGrid grid = TGrid::equispaced(9);
  bool run_sse = true;
  bool run_mqe = false;
  const MqeTable* mqe_table = nullptr;  // required when run_mqe
  int replications = 300;
  std::uint64_t seed = 1;
  int threads = 1;
  std::vector<double> alpha_sweep;  // curve mode only
  AlFitOptions fit_options{};

  void validate() const;
};

struct EstimateRecord {
  int replication = 0;
  std::string estimator;      // "sse<k>_a1" / "_a2" / "_a3", "mqe"
  double alpha_hat = 0.0;     // NaN when failed
  double sigma_bar = 0.0;     // mean per-split sigma; NaN for mqe
  int failures = 0;           // dropped split fits within the replication
  double boundary0 = 0.0;     // per-split boundary fractions; NaN for mqe
  double boundary2 = 0.0;
  double elapsed_ms = 0.0;
  bool failed = false;
};

struct AggregateRow {
  std::string estimator;
  double bias = 0.0;
  double rmse = 0.0;
  double boundary0 = 0.0;  // mean of per-replication boundary fractions
  double boundary2 = 0.0;
  int n_success = 0;
};

struct ExperimentResult {
  std::vector<EstimateRecord> records;
  std::vector<AggregateRow> aggregates;
  double elapsed_ms = 0.0;
};

/// Runs spec.replications independent replications. Replication i is a
/// pure function of (spec.seed, i): the data draw uses substream 0 of the
/// replication stream and the split procedure substream 1, so results do
/// not depend on the parallel schedule. Replications where every
/// requested estimator fails are redrawn once (substreams 2 and 3) and
/// then recorded as failures.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// bias = mean(alpha_hat) - alpha, rmse = sqrt(mean((alpha_hat-alpha)^2))
/// over successful records, per estimator; boundary columns average the
/// per-replication boundary fractions. Throws when an estimator has no
/// successful record.
std::vector<AggregateRow> aggregate(std::span<const EstimateRecord> records,
                                    double true_alpha);

struct CurveRow {
  double alpha;
  std::string estimator;
  double rmse;
  double rmse_smoothed;
};

/// Centered moving average, window 3, ends truncated to available points.
std::vector<double> moving_average3(std::span<const double> values);

/// One experiment per alpha in spec.alpha_sweep (alpha i uses substream i
/// of spec.seed). The smoothed column is a centered moving average of
/// window 3 over the sweep, truncated at the ends.
std::vector<CurveRow> rmse_curve(const ExperimentSpec& spec);

// CSV persistence. Records:
//   replication,estimator,alpha_hat,sigma_bar,failures,elapsed_ms
// Aggregates:
//   config_id,estimator,bias,rmse,boundary0,boundary2,n_success
void write_records_csv(const std::filesystem::path& path,
                       std::span<const EstimateRecord> records);
std::vector<EstimateRecord> read_records_csv(
    const std::filesystem::path& path);
void write_aggregate_csv(const std::filesystem::path& path,
                         const std::string& config_id,
                         std::span<const AggregateRow> rows);

}  // namespace splitstable

#endif  // SPLITSTABLE_SIM_HPP
