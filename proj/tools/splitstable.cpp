// splitstable.cpp
//
// Command-line front end: index estimation on user data files,
// simulation campaigns, RMSE curves, quantile-table maintenance,
// partition counting and variate generation.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "splitstable/mqe.hpp"
#include "splitstable/parallel.hpp"
#include "splitstable/sim.hpp"
#include "splitstable/split.hpp"
#include "splitstable/stable.hpp"

namespace {

using namespace splitstable;

constexpr int kExitUsage = 2;
constexpr int kExitEstimation = 3;

int env_default_threads() {
  if (const char* env = std::getenv("SPLITSTABLE_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return default_thread_count();
}

// Newline-delimited decimals; '#' starts a comment line; blanks ignored.
std::vector<double> read_data_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::vector<double> out;
  std::string line;
  while (std::getline(is, line)) {
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::size_t pos = 0;
    const double v = std::stod(line.substr(start), &pos);
    out.push_back(v);
  }
  return out;
}

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void print_aggregate_table(const std::vector<AggregateRow>& rows) {
  std::printf("%-10s %10s %10s %10s %10s %10s\n", "estimator", "bias",
              "RMSE", "bnd[0]", "bnd[2]", "n");
  for (const auto& r : rows)
    std::printf("%-10s %10.4f %10.4f %10.4f %10.4f %10d\n",
                r.estimator.c_str(), r.bias, r.rmse, r.boundary0,
                r.boundary2, r.n_success);
}

struct CommonSim {
  double alpha = 1.0, beta = 0.0, gamma = 1.0, delta = 0.0;
  std::size_t size = 300;
  int b_splits = 250;
  int k = 9;
  int replications = 300;
  std::uint64_t seed = 1;
  int threads = env_default_threads();
  bool with_mqe = false;
  std::string mqe_table_path = "mqe_table_v1.txt";
  std::string records_path, aggregate_path, config_id = "sim";
};

void add_sim_options(CLI::App* cmd, CommonSim* opt) {
  cmd->add_option("--alpha", opt->alpha, "stability index");
  cmd->add_option("--beta", opt->beta, "skewness");
  cmd->add_option("--gamma", opt->gamma, "scale");
  cmd->add_option("--delta", opt->delta, "location");
  cmd->add_option("--size", opt->size, "total sample size n + 2m");
  cmd->add_option("-B,--B,--splits", opt->b_splits,
                  "random splits per sample");
  cmd->add_option("-k,--k,--quantiles", opt->k,
                  "number of t-values (t_j = j/(k+1)); k=3 is the "
                  "heavy-tail option");
  cmd->add_option("-N,--N,--replications", opt->replications,
                  "Monte-Carlo replications");
  cmd->add_option("--seed", opt->seed, "master seed");
  cmd->add_option("--threads", opt->threads, "worker threads");
  cmd->add_flag("--mqe", opt->with_mqe, "also run the quantile estimator");
  cmd->add_option("--mqe-table", opt->mqe_table_path,
                  "cached quantile-table file");
  cmd->add_option("--records", opt->records_path,
                  "per-replication CSV output");
  cmd->add_option("--aggregate", opt->aggregate_path,
                  "aggregate CSV output");
  cmd->add_option("--config-id", opt->config_id, "aggregate CSV row id");
}

ExperimentSpec make_spec(const CommonSim& opt, const MqeTable* table) {
  ExperimentSpec spec;
  spec.params = {opt.alpha, opt.beta, opt.gamma, opt.delta};
  if (opt.size % 3 != 0)
    throw std::invalid_argument(
        "--size must be divisible by 3 (m = n split)");
  spec.total_size = opt.size;
  spec.n = opt.size / 3;
  spec.m = spec.n;
  spec.b_splits = opt.b_splits;
  spec.grid = TGrid::equispaced(opt.k);
  spec.run_mqe = opt.with_mqe;
  spec.mqe_table = table;
  spec.replications = opt.replications;
  spec.seed = opt.seed;
  spec.threads = opt.threads;
  return spec;
}

MqeTable obtain_table(const CommonSim& opt) {
  const auto ag = mqe_default_alpha_grid();
  const auto bg = mqe_default_beta_grid();
  return load_or_build_mqe_table(opt.mqe_table_path, ag, bg, 4000000,
                                 20260809, opt.threads);
}

int cmd_estimate(const std::string& input, std::size_t n_opt,
                 std::size_t m_opt, std::size_t size_opt, int b_splits,
                 int k, std::uint64_t seed, int threads,
                 const std::string& output) {
  std::vector<double> data;
  try {
    data = read_data_file(input);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::size_t n = n_opt, m = m_opt;
  if (n == 0 && m == 0) {
    const std::size_t total = size_opt != 0 ? size_opt : data.size();
    n = total / 3;
    m = n;
  } else if (m == 0) {
    m = n;  // default split m = n
  }
  const std::size_t need = n + 2 * m;
  const std::size_t file_count = data.size();
  if (n < 2 || m < 2 || file_count < need) {
    std::cerr << "error: need n + 2m = " << need << " values (n = " << n
              << ", m = " << m << "), file has " << file_count << '\n';
    return kExitUsage;
  }
  // Explicit subsample: the first n + 2m values in file order.
  data.resize(need);

  SplitConfig config{n, m, b_splits, TGrid::equispaced(k), seed, threads,
                     AlFitOptions{}};
  SplitEstimate est;
  try {
    est = sse_estimate(data, config);
  } catch (const EstimationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEstimation;
  }

  double mean_sigma = 0.0;
  for (double s : est.sigma_hats) mean_sigma += s;
  mean_sigma /= static_cast<double>(est.sigma_hats.size());
  std::vector<double> sorted = est.sigma_hats;
  std::sort(sorted.begin(), sorted.end());
  const double med_sigma =
      sorted.size() % 2 == 1
          ? sorted[sorted.size() / 2]
          : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);

  std::cout << "data points used: " << need << " of " << file_count
            << " read\n";
  std::cout << "n = " << n << ", m = " << m << ", B = " << b_splits
            << ", k = " << k << ", seed = " << seed << '\n';
  std::cout << "successful fits: " << est.sigma_hats.size() << "/"
            << b_splits << (est.reliable ? "" : "  [UNRELIABLE: >50% failed]")
            << '\n';
  std::cout << "sigma-hat: mean " << format_g(mean_sigma) << ", median "
            << format_g(med_sigma) << ", min " << format_g(sorted.front())
            << ", max " << format_g(sorted.back()) << '\n';
  std::cout << "alpha1 (mean sigma)   = " << format_g(est.alpha1) << '\n';
  std::cout << "alpha2 (mean alpha)   = " << format_g(est.alpha2) << '\n';
  std::cout << "alpha3 (median alpha) = " << format_g(est.alpha3) << '\n';

  if (!output.empty()) {
    std::ofstream os(output);
    if (!os) {
      std::cerr << "error: cannot write " << output << '\n';
      return kExitUsage;
    }
    os << "split,sigma_hat,alpha_hat\n";
    for (std::size_t i = 0; i < est.sigma_hats.size(); ++i) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i,
                    est.sigma_hats[i], est.alpha_hats[i]);
      os << buf;
    }
  }
  return 0;
}

int cmd_simulate(const CommonSim& opt) {
  MqeTable table;
  ExperimentSpec spec;
  if (opt.with_mqe) {
    std::cerr << "preparing quantile table (" << opt.mqe_table_path
              << ")...\n";
    table = obtain_table(opt);
    spec = make_spec(opt, &table);
  } else {
    spec = make_spec(opt, nullptr);
  }
  const ExperimentResult result = run_experiment(spec);
  print_aggregate_table(result.aggregates);
  std::cerr << "elapsed: " << format_g(result.elapsed_ms / 1000.0) << " s\n";
  if (!opt.records_path.empty())
    write_records_csv(opt.records_path, result.records);
  if (!opt.aggregate_path.empty())
    write_aggregate_csv(opt.aggregate_path, opt.config_id,
                        result.aggregates);
  return 0;
}

int cmd_curve(const CommonSim& opt, const std::vector<double>& alphas,
              const std::string& out_path) {
  MqeTable table;
  ExperimentSpec spec;
  if (opt.with_mqe) {
    table = obtain_table(opt);
    spec = make_spec(opt, &table);
  } else {
    spec = make_spec(opt, nullptr);
  }
  spec.alpha_sweep = alphas;
  const std::vector<CurveRow> rows = rmse_curve(spec);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "error: cannot write " << out_path << '\n';
      return kExitUsage;
    }
    os = &file;
  }
  *os << "alpha,estimator,rmse,rmse_smoothed\n";
  for (const auto& r : rows) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g\n", r.alpha,
                  r.estimator.c_str(), r.rmse, r.rmse_smoothed);
    *os << buf;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "split-sample estimation of the stability index of stable "
      "distributions"};
  app.require_subcommand(1);

  // estimate
  auto* est = app.add_subcommand(
      "estimate", "estimate alpha from a newline-delimited data file");
  std::string input, output;
  std::size_t opt_n = 0, opt_m = 0, opt_size = 0;
  int est_b = 250, est_k = 9;
  std::uint64_t est_seed = 1;
  int est_threads = env_default_threads();
  est->add_option("input", input, "data file")->required();
  est->add_option("--n", opt_n, "X-sample size");
  est->add_option("--m", opt_m, "Y pair count (default: m = n)");
  est->add_option("--size", opt_size, "total n + 2m (default: file length)");
  est->add_option("-B,--B,--splits", est_b, "random splits");
  est->add_option("-k,--k,--quantiles", est_k, "number of t-values");
  est->add_option("--seed", est_seed, "master seed");
  est->add_option("--threads", est_threads, "worker threads");
  est->add_option("--output", output, "per-split sigma CSV");

  // simulate
  CommonSim sim_opt;
  auto* sim = app.add_subcommand("simulate",
                                 "Monte-Carlo bias/RMSE experiment");
  add_sim_options(sim, &sim_opt);

  // curve
  CommonSim curve_opt;
  std::vector<double> curve_alphas;
  std::string curve_out;
  auto* curve = app.add_subcommand("curve", "RMSE over an alpha sweep");
  add_sim_options(curve, &curve_opt);
  curve->add_option("--alphas", curve_alphas, "sweep values in (0,2)")
      ->required()
      ->delimiter(',');
  curve->add_option("--out", curve_out, "CSV output (default: stdout)");

  // mqe-table
  auto* mt = app.add_subcommand("mqe-table",
                                "build/load the quantile-ratio table");
  std::string mt_path = "mqe_table_v1.txt";
  std::size_t mt_mc = 4000000;
  std::uint64_t mt_seed = 20260809;
  int mt_threads = env_default_threads();
  mt->add_option("--output", mt_path, "table file");
  mt->add_option("--mc-size", mt_mc, "variates per grid cell");
  mt->add_option("--seed", mt_seed, "build seed");
  mt->add_option("--threads", mt_threads, "worker threads");

  // perm-count
  auto* pc = app.add_subcommand("perm-count",
                                "count distinct X/Y-sample constructions");
  std::size_t pc_n = 0, pc_m = 0;
  pc->add_option("--n", pc_n, "X-sample size")->required();
  pc->add_option("--m", pc_m, "Y pair count")->required();

  // sample
  auto* smp = app.add_subcommand("sample", "generate stable variates");
  double s_alpha = 1.0, s_beta = 0.0, s_gamma = 1.0, s_delta = 0.0;
  std::size_t s_count = 100;
  std::uint64_t s_seed = 1;
  std::string s_out;
  smp->add_option("--alpha", s_alpha, "stability index")->required();
  smp->add_option("--beta", s_beta, "skewness");
  smp->add_option("--gamma", s_gamma, "scale");
  smp->add_option("--delta", s_delta, "location");
  smp->add_option("--count", s_count, "number of variates")->required();
  smp->add_option("--seed", s_seed, "seed");
  smp->add_option("--output", s_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (est->parsed())
      return cmd_estimate(input, opt_n, opt_m, opt_size, est_b, est_k,
                          est_seed, est_threads, output);
    if (sim->parsed()) return cmd_simulate(sim_opt);
    if (curve->parsed()) return cmd_curve(curve_opt, curve_alphas, curve_out);
    if (mt->parsed()) {
      const auto ag = mqe_default_alpha_grid();
      const auto bg = mqe_default_beta_grid();
      const MqeTable table = load_or_build_mqe_table(
          mt_path, ag, bg, mt_mc, mt_seed, mt_threads);
      std::cout << "table ready: " << table.alpha_grid.size() << " x "
                << table.beta_grid.size() << " cells, mc_size "
                << table.mc_size << ", seed " << table.seed << " -> "
                << mt_path << '\n';
      return 0;
    }
    if (pc->parsed()) {
      const auto count = permutation_count(pc_n, pc_m);
      const double approx = count.convert_to<double>();
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6e", approx);
      std::cout << count.str() << "\n= " << buf << '\n';
      return 0;
    }
    if (smp->parsed()) {
      Rng rng(s_seed);
      const auto xs =
          sample_stable({s_alpha, s_beta, s_gamma, s_delta}, s_count, rng);
      std::ostream* os = &std::cout;
      std::ofstream file;
      if (!s_out.empty()) {
        file.open(s_out);
        if (!file) {
          std::cerr << "error: cannot write " << s_out << '\n';
          return kExitUsage;
        }
        os = &file;
      }
      char buf[32];
      for (double x : xs) {
        std::snprintf(buf, sizeof buf, "%.17g\n", x);
        *os << buf;
      }
      return 0;
    }
  } catch (const EstimationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEstimation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
