#include "splitstable/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "splitstable/parallel.hpp"

namespace splitstable {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

std::string sse_id(int k, const char* combiner) {
  return "sse" + std::to_string(k) + "_" + combiner;
}

// One replication: all estimator records, in a fixed order.
std::vector<EstimateRecord> run_replication(const ExperimentSpec& spec,
                                            int rep) {
  const std::uint64_t rep_seed =
      substream_seed(spec.seed, static_cast<std::uint64_t>(rep));

  for (int attempt = 0; attempt < 2; ++attempt) {
    std::vector<EstimateRecord> records;
    Rng draw(substream_seed(rep_seed, static_cast<std::uint64_t>(2 * attempt)));
    const std::vector<double> data =
        sample_stable(spec.params, spec.total_size, draw);
    bool any_success = false;

    if (spec.run_sse) {
      const int k = spec.grid.k();
      const double t0 = now_ms();
      SplitConfig cfg{spec.n,
                      spec.m,
                      spec.b_splits,
                      spec.grid,
                      substream_seed(rep_seed,
                                     static_cast<std::uint64_t>(2 * attempt + 1)),
                      /*threads=*/1,
                      spec.fit_options};
      try {
        const SplitEstimate est = sse_estimate(data, cfg);
        const auto [b0, b2] = boundary_rate(est);
        const double sigma_bar =
            std::accumulate(est.sigma_hats.begin(), est.sigma_hats.end(),
                            0.0) /
            static_cast<double>(est.sigma_hats.size());
        const double elapsed = now_ms() - t0;
        const double alphas[3] = {est.alpha1, est.alpha2, est.alpha3};
        const char* names[3] = {"a1", "a2", "a3"};
        for (int c = 0; c < 3; ++c)
          records.push_back({rep, sse_id(k, names[c]), alphas[c], sigma_bar,
                             est.failures, b0, b2, elapsed, false});
        any_success = true;
      } catch (const EstimationError&) {
        const double elapsed = now_ms() - t0;
        const char* names[3] = {"a1", "a2", "a3"};
        for (int c = 0; c < 3; ++c)
          records.push_back({rep, sse_id(k, names[c]), kNaN, kNaN,
                             spec.b_splits, kNaN, kNaN, elapsed, true});
      }
    }

    if (spec.run_mqe) {
      const double t0 = now_ms();
      try {
        const double a = mqe_estimate(data, *spec.mqe_table);
        records.push_back(
            {rep, "mqe", a, kNaN, 0, kNaN, kNaN, now_ms() - t0, false});
        any_success = true;
      } catch (const DegenerateSampleError&) {
        records.push_back(
            {rep, "mqe", kNaN, kNaN, 1, kNaN, kNaN, now_ms() - t0, true});
      }
    }

    if (any_success || attempt == 1) return records;
    // Every estimator failed on this draw: redraw once on fresh substreams.
  }
  return {};
}

void write_csv_double(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void ExperimentSpec::validate() const {
  params.validate();
  if (total_size != n + 2 * m)
    throw std::invalid_argument("total_size must equal n + 2m");
  if (replications < 1)
    throw std::invalid_argument("replications must be >= 1");
  if (run_mqe && mqe_table == nullptr)
    throw std::invalid_argument("run_mqe requires an MqeTable");
  if (!run_sse && !run_mqe)
    throw std::invalid_argument("no estimator selected");
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const double t0 = now_ms();
  const auto reps = static_cast<std::size_t>(spec.replications);
  std::vector<std::vector<EstimateRecord>> slots(reps);
  parallel_for(reps, spec.threads, [&](std::size_t i) {
    slots[i] = run_replication(spec, static_cast<int>(i));
  });

  ExperimentResult result;
  for (auto& r : slots)
    result.records.insert(result.records.end(),
                          std::make_move_iterator(r.begin()),
                          std::make_move_iterator(r.end()));
  result.aggregates = aggregate(result.records, spec.params.alpha);
  result.elapsed_ms = now_ms() - t0;
  return result;
}

std::vector<AggregateRow> aggregate(std::span<const EstimateRecord> records,
                                    double true_alpha) {
  std::vector<AggregateRow> rows;
  std::vector<int> boundary_counts;
  for (const auto& rec : records) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& row) {
      return row.estimator == rec.estimator;
    });
    if (it == rows.end()) {
      rows.push_back({rec.estimator, 0.0, 0.0, 0.0, 0.0, 0});
      boundary_counts.push_back(0);
      it = rows.end() - 1;
    }
    if (rec.failed) continue;
    const auto idx = static_cast<std::size_t>(it - rows.begin());
    const double err = rec.alpha_hat - true_alpha;
    it->bias += err;
    it->rmse += err * err;
    ++it->n_success;
    if (std::isfinite(rec.boundary0)) {
      it->boundary0 += rec.boundary0;
      it->boundary2 += rec.boundary2;
      ++boundary_counts[idx];
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    if (row.n_success == 0)
      throw EstimationError("estimator " + row.estimator +
                            " has no successful replication");
    row.bias /= row.n_success;
    row.rmse = std::sqrt(row.rmse / row.n_success);
    if (boundary_counts[i] > 0) {
      row.boundary0 /= boundary_counts[i];
      row.boundary2 /= boundary_counts[i];
    } else {
      row.boundary0 = kNaN;
      row.boundary2 = kNaN;
    }
  }
  return rows;
}

std::vector<CurveRow> rmse_curve(const ExperimentSpec& spec) {
  if (spec.alpha_sweep.empty())
    throw std::invalid_argument("alpha_sweep is empty");
  for (double a : spec.alpha_sweep)
    if (!(a > 0.0 && a < 2.0))
      throw std::invalid_argument("sweep alphas must lie in (0, 2)");

  // rows grouped per estimator, in sweep order
  std::vector<std::string> estimators;
  std::vector<std::vector<double>> rmse_by_estimator;
  for (std::size_t i = 0; i < spec.alpha_sweep.size(); ++i) {
    ExperimentSpec point = spec;
    point.alpha_sweep.clear();
    point.params.alpha = spec.alpha_sweep[i];
    point.seed = substream_seed(spec.seed, i);
    const ExperimentResult res = run_experiment(point);
    for (const auto& agg : res.aggregates) {
      auto it = std::find(estimators.begin(), estimators.end(),
                          agg.estimator);
      if (it == estimators.end()) {
        estimators.push_back(agg.estimator);
        rmse_by_estimator.emplace_back();
        it = estimators.end() - 1;
      }
      rmse_by_estimator[static_cast<std::size_t>(it - estimators.begin())]
          .push_back(agg.rmse);
    }
  }

  std::vector<CurveRow> out;
  for (std::size_t e = 0; e < estimators.size(); ++e) {
    const auto& raw = rmse_by_estimator[e];
    const std::vector<double> smooth = moving_average3(raw);
    for (std::size_t i = 0; i < raw.size(); ++i)
      out.push_back(
          {spec.alpha_sweep[i], estimators[e], raw[i], smooth[i]});
  }
  return out;
}

std::vector<double> moving_average3(std::span<const double> values) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(i + 1, values.size() - 1);
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) acc += values[j];
    out[i] = acc / static_cast<double>(hi - lo + 1);
  }
  return out;
}

void write_records_csv(const std::filesystem::path& path,
                       std::span<const EstimateRecord> records) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "replication,estimator,alpha_hat,sigma_bar,failures,elapsed_ms\n";
  for (const auto& r : records) {
    os << r.replication << ',' << r.estimator << ',';
    write_csv_double(os, r.alpha_hat);
    os << ',';
    write_csv_double(os, r.sigma_bar);
    os << ',' << r.failures << ',';
    write_csv_double(os, r.elapsed_ms);
    os << '\n';
  }
}

std::vector<EstimateRecord> read_records_csv(
    const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(is, line) ||
      line != "replication,estimator,alpha_hat,sigma_bar,failures,elapsed_ms")
    throw std::runtime_error("unexpected records CSV header in " +
                             path.string());
  std::vector<EstimateRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    EstimateRecord rec;
    std::string field;
    std::getline(ss, field, ',');
    rec.replication = std::stoi(field);
    std::getline(ss, rec.estimator, ',');
    std::getline(ss, field, ',');
    rec.alpha_hat = std::stod(field);
    std::getline(ss, field, ',');
    rec.sigma_bar = std::stod(field);
    std::getline(ss, field, ',');
    rec.failures = std::stoi(field);
    std::getline(ss, field, ',');
    rec.elapsed_ms = std::stod(field);
    rec.failed = std::isnan(rec.alpha_hat);
    rec.boundary0 = kNaN;
    rec.boundary2 = kNaN;
    out.push_back(std::move(rec));
  }
  return out;
}

void write_aggregate_csv(const std::filesystem::path& path,
                         const std::string& config_id,
                         std::span<const AggregateRow> rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "config_id,estimator,bias,rmse,boundary0,boundary2,n_success\n";
  for (const auto& r : rows) {
    os << config_id << ',' << r.estimator << ',';
    write_csv_double(os, r.bias);
    os << ',';
    write_csv_double(os, r.rmse);
    os << ',';
    write_csv_double(os, r.boundary0);
    os << ',';
    write_csv_double(os, r.boundary2);
    os << ',' << r.n_success << '\n';
  }
}

}  // namespace splitstable
