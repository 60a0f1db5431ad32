#include "splitstable/mqe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "splitstable/empirical.hpp"
#include "splitstable/parallel.hpp"
#include "splitstable/stable.hpp"

namespace splitstable {

namespace {

constexpr double kMqeProbs[5] = {0.05, 0.25, 0.5, 0.75, 0.95};

struct NuPair {
  double nu_a;
  double nu_b;
};

NuPair nu_from_quantiles(const double q[5]) {
  const double span90 = q[4] - q[0];
  const double iqr = q[3] - q[1];
  if (!(iqr > 0.0))
    throw DegenerateSampleError("zero interquartile range");
  return {span90 / iqr, (q[4] + q[0] - 2.0 * q[2]) / span90};
}

// Bracketing segment of an ascending grid around value v: [j, j+1] with
// an interpolation weight, degenerating to the single cell when the grid
// has one entry.
struct GridSegment {
  std::size_t lo;
  std::size_t hi;
  double w;
};

GridSegment locate(const std::vector<double>& grid, double v) {
  if (grid.size() == 1) return {0, 0, 0.0};
  const double c = std::clamp(v, grid.front(), grid.back());
  auto it = std::upper_bound(grid.begin(), grid.end(), c);
  auto hi = static_cast<std::size_t>(it - grid.begin());
  hi = std::clamp<std::size_t>(hi, 1, grid.size() - 1);
  const std::size_t lo = hi - 1;
  return {lo, hi, (c - grid[lo]) / (grid[hi] - grid[lo])};
}

// Linear interpolation of column values at beta (columns ascending).
void beta_slice(const MqeTable& t, double beta, std::vector<double>* nu_a) {
  const GridSegment s = locate(t.beta_grid, beta);
  nu_a->resize(t.alpha_grid.size());
  for (std::size_t i = 0; i < t.alpha_grid.size(); ++i)
    (*nu_a)[i] = t.nu_alpha_at(i, s.lo) * (1.0 - s.w) +
                 t.nu_alpha_at(i, s.hi) * s.w;
}

// Row of nu_beta interpolated at alpha (rows ascending in alpha).
void alpha_row(const MqeTable& t, double alpha, std::vector<double>* nu_b) {
  const GridSegment s = locate(t.alpha_grid, alpha);
  nu_b->resize(t.beta_grid.size());
  for (std::size_t j = 0; j < t.beta_grid.size(); ++j)
    (*nu_b)[j] = t.nu_beta_at(s.lo, j) * (1.0 - s.w) +
                 t.nu_beta_at(s.hi, j) * s.w;
}

// Inverse interpolation of a strictly decreasing profile.
double invert_decreasing(const std::vector<double>& xs,
                         const std::vector<double>& ys, double y) {
  if (y >= ys.front()) return xs.front();
  if (y <= ys.back()) return xs.back();
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    if (y <= ys[i] && y > ys[i + 1]) {
      const double w = (y - ys[i]) / (ys[i + 1] - ys[i]);
      return xs[i] * (1.0 - w) + xs[i + 1] * w;
    }
  }
  return xs.back();
}

// Inverse interpolation of a nondecreasing profile.
double invert_increasing(const std::vector<double>& xs,
                         const std::vector<double>& ys, double y) {
  if (y <= ys.front()) return xs.front();
  if (y >= ys.back()) return xs.back();
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    if (y >= ys[i] && y < ys[i + 1]) {
      const double denom = ys[i + 1] - ys[i];
      const double w = denom > 0.0 ? (y - ys[i]) / denom : 0.0;
      return xs[i] * (1.0 - w) + xs[i + 1] * w;
    }
  }
  return xs.back();
}

void write_double_row(std::ostream& os, std::span<const double> row) {
  char buf[32];
  for (std::size_t i = 0; i < row.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", row[i]);
    os << (i ? " " : "") << buf;
  }
  os << '\n';
}

}  // namespace

std::vector<double> mqe_default_alpha_grid() {
  std::vector<double> g;
  for (int i = 5; i <= 20; ++i) g.push_back(static_cast<double>(i) / 10.0);
  return g;
}

std::vector<double> mqe_default_beta_grid() {
  return {-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0};
}

MqeTable build_mqe_table(std::span<const double> alpha_grid,
                         std::span<const double> beta_grid,
                         std::size_t mc_size, Rng& rng, int threads) {
  if (alpha_grid.empty() || beta_grid.empty())
    throw std::invalid_argument("empty table grid");
  if (mc_size < 1000000)
    throw std::domain_error("table build requires mc_size >= 10^6");
  for (double a : alpha_grid)
    if (!(a >= 0.5 && a <= 2.0))
      throw std::domain_error("alpha grid must lie within [0.5, 2]");
  for (double b : beta_grid)
    if (!(b >= -1.0 && b <= 1.0))
      throw std::domain_error("beta grid must lie within [-1, 1]");
  for (std::size_t i = 1; i < alpha_grid.size(); ++i)
    if (!(alpha_grid[i] > alpha_grid[i - 1]))
      throw std::invalid_argument("alpha grid must be strictly increasing");
  for (std::size_t j = 1; j < beta_grid.size(); ++j)
    if (!(beta_grid[j] > beta_grid[j - 1]))
      throw std::invalid_argument("beta grid must be strictly increasing");
  // Negative-beta cells come from the reflection X(-beta) =d= -X(beta),
  // so the grid must pair each beta with its negative.
  for (double b : beta_grid) {
    const bool mirrored =
        std::any_of(beta_grid.begin(), beta_grid.end(),
                    [b](double o) { return std::abs(o + b) < 1e-12; });
    if (!mirrored)
      throw std::invalid_argument("beta grid must be symmetric about 0");
  }

  MqeTable table;
  table.alpha_grid.assign(alpha_grid.begin(), alpha_grid.end());
  table.beta_grid.assign(beta_grid.begin(), beta_grid.end());
  table.mc_size = mc_size;
  table.seed = rng.seed();
  const std::size_t rows = table.alpha_grid.size();
  const std::size_t cols = table.beta_grid.size();
  table.nu_alpha.assign(rows * cols, 0.0);
  table.nu_beta.assign(rows * cols, 0.0);

  // Simulate the beta >= 0 cells only.
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (table.beta_grid[j] >= 0.0) cells.emplace_back(i, j);

  parallel_for(cells.size(), threads, [&](std::size_t c) {
    const auto [i, j] = cells[c];
    Rng stream = rng.substream(i * cols + j);
    const StableParams params{table.alpha_grid[i], table.beta_grid[j], 1.0,
                              0.0};
    const auto qs = numeric_quantiles(params, kMqeProbs, mc_size, stream);
    double q[5];
    for (int p = 0; p < 5; ++p) q[p] = qs[static_cast<std::size_t>(p)].value;
    const NuPair nu = nu_from_quantiles(q);
    table.nu_alpha[i * cols + j] = nu.nu_a;
    table.nu_beta[i * cols + j] = nu.nu_b;
  });

  // Mirror to negative beta: nu_alpha is even, nu_beta odd.
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      if (table.beta_grid[j] >= 0.0) continue;
      const double pos = -table.beta_grid[j];
      const auto it = std::find_if(
          table.beta_grid.begin(), table.beta_grid.end(),
          [pos](double b) { return std::abs(b - pos) < 1e-12; });
      const auto jj =
          static_cast<std::size_t>(it - table.beta_grid.begin());
      table.nu_alpha[i * cols + j] = table.nu_alpha_at(i, jj);
      table.nu_beta[i * cols + j] = -table.nu_beta_at(i, jj);
    }

  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 1; i < rows; ++i)
      if (!(table.nu_alpha_at(i, j) < table.nu_alpha_at(i - 1, j)))
        throw TableBuildError(
            "nu_alpha not strictly decreasing in alpha at beta = " +
            std::to_string(table.beta_grid[j]) +
            "; increase mc_size or coarsen the grid");
  return table;
}

double mqe_invert(double nu_a, double nu_b, const MqeTable& table) {
  double alpha = 2.0, beta = 0.0;
  std::vector<double> slice, row;
  for (int iter = 0; iter < 20; ++iter) {
    beta_slice(table, beta, &slice);
    const double alpha_next =
        invert_decreasing(table.alpha_grid, slice, nu_a);
    alpha_row(table, alpha_next, &row);
    const double beta_next = invert_increasing(table.beta_grid, row, nu_b);
    const bool settled = std::abs(alpha_next - alpha) < 1e-6 &&
                         std::abs(beta_next - beta) < 1e-6;
    alpha = alpha_next;
    beta = beta_next;
    if (settled) break;
  }
  return std::clamp(alpha, 0.5, 2.0);
}

double mqe_estimate(std::span<const double> data, const MqeTable& table) {
  if (data.size() < 20)
    throw std::invalid_argument("mqe_estimate needs at least 20 values");
  SortedSample sample(std::vector<double>(data.begin(), data.end()));
  double q[5];
  for (int p = 0; p < 5; ++p) q[p] = sample.quantile(kMqeProbs[p]);
  const NuPair nu = nu_from_quantiles(q);
  return mqe_invert(nu.nu_a, nu.nu_b, table);
}

void save_mqe_table(const MqeTable& table,
                    const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "splitstable-mqe-table v" << table.version << '\n';
  os << "mc_size " << table.mc_size << '\n';
  os << "seed " << table.seed << '\n';
  os << "alpha_grid ";
  write_double_row(os, table.alpha_grid);
  os << "beta_grid ";
  write_double_row(os, table.beta_grid);
  os << "nu_alpha\n";
  for (std::size_t i = 0; i < table.alpha_grid.size(); ++i)
    write_double_row(
        os, std::span(table.nu_alpha)
                .subspan(i * table.beta_grid.size(), table.beta_grid.size()));
  os << "nu_beta\n";
  for (std::size_t i = 0; i < table.alpha_grid.size(); ++i)
    write_double_row(
        os, std::span(table.nu_beta)
                .subspan(i * table.beta_grid.size(), table.beta_grid.size()));
  os << "end\n";
}

std::optional<MqeTable> load_mqe_table(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  std::string line;
  if (!std::getline(is, line) || line.rfind("splitstable-mqe-table v", 0) != 0)
    return std::nullopt;

  MqeTable t;
  try {
    t.version = std::stoi(line.substr(23));
    std::string key;
    is >> key >> t.mc_size;
    if (key != "mc_size") return std::nullopt;
    is >> key >> t.seed;
    if (key != "seed") return std::nullopt;

    is >> key;
    if (key != "alpha_grid") return std::nullopt;
    std::getline(is, line);
    std::istringstream ag(line);
    for (double v; ag >> v;) t.alpha_grid.push_back(v);

    is >> key;
    if (key != "beta_grid") return std::nullopt;
    std::getline(is, line);
    std::istringstream bg(line);
    for (double v; bg >> v;) t.beta_grid.push_back(v);

    const std::size_t cells = t.alpha_grid.size() * t.beta_grid.size();
    is >> key;
    if (key != "nu_alpha") return std::nullopt;
    t.nu_alpha.resize(cells);
    for (auto& v : t.nu_alpha) is >> v;
    is >> key;
    if (key != "nu_beta") return std::nullopt;
    t.nu_beta.resize(cells);
    for (auto& v : t.nu_beta) is >> v;
    is >> key;
    if (!is || key != "end") return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return t;
}

MqeTable load_or_build_mqe_table(const std::filesystem::path& path,
                                 std::span<const double> alpha_grid,
                                 std::span<const double> beta_grid,
                                 std::size_t mc_size, std::uint64_t seed,
                                 int threads) {
  if (auto cached = load_mqe_table(path)) {
    const bool grids_match =
        cached->alpha_grid.size() == alpha_grid.size() &&
        cached->beta_grid.size() == beta_grid.size() &&
        std::equal(alpha_grid.begin(), alpha_grid.end(),
                   cached->alpha_grid.begin()) &&
        std::equal(beta_grid.begin(), beta_grid.end(),
                   cached->beta_grid.begin());
    if (grids_match && cached->mc_size == mc_size && cached->seed == seed &&
        cached->version == 1)
      return std::move(*cached);
  }
  Rng rng(seed);
  MqeTable table = build_mqe_table(alpha_grid, beta_grid, mc_size, rng,
                                   threads);
  save_mqe_table(table, path);
  return table;
}

}  // namespace splitstable
