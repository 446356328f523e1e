#include "spherekit/sampling.hpp"

#include "spherekit/losses.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace spherekit {

namespace rng {

std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t x = seed ^ (counter * 0xD1B54A32D192ED03ULL);
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>((mix(seed, counter) >> 11) + 1) * 0x1.0p-53;
}

double gaussian(std::uint64_t seed, std::uint64_t counter) {
  const double u1 = uniform01(seed, 2 * counter);
  const double u2 = uniform01(seed, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rng

SampleSet sample_uniform_sphere(int q, int n, std::uint64_t seed) {
  if (q < 2) throw std::domain_error("sphere sampling requires q >= 2");
  if (n < 1) throw std::domain_error("sample count must be >= 1");
  SampleSet set;
  set.seed = seed;
  set.generator = "gaussian-normalize/splitmix64";
  set.points.resize(n, q);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) {
      set.points(i, j) = rng::gaussian(seed, static_cast<std::uint64_t>(i) * q + j);
    }
    set.points.row(i).normalize();
  }
  return set;
}

namespace {

constexpr int kBlocks = 100;
constexpr Eigen::Index kRowBlock = 256;

McEstimate block_mean_se(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  const int blocks = std::min(kBlocks, n);
  std::vector<double> means(static_cast<std::size_t>(blocks), 0.0);
  std::vector<int> counts(static_cast<std::size_t>(blocks), 0);
  for (int i = 0; i < n; ++i) {
    const auto b = static_cast<std::size_t>(static_cast<long long>(i) * blocks / n);
    means[b] += values[static_cast<std::size_t>(i)];
    counts[b] += 1;
  }
  double grand = 0.0;
  for (std::size_t b = 0; b < means.size(); ++b) {
    means[b] /= counts[b];
    grand += means[b];
  }
  grand /= blocks;
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var /= std::max(1, blocks - 1);
  McEstimate est;
  est.estimate = grand;
  est.std_error = std::sqrt(var / blocks);
  return est;
}

// Sum of phi over all pairs (row of a, row of b), accumulated block by block
// in fixed order.
double sum_kernel_pairs(const KernelSpec& spec, const Eigen::MatrixXd& a,
                        const Eigen::MatrixXd& b) {
  double total = 0.0;
  for (Eigen::Index r0 = 0; r0 < a.rows(); r0 += kRowBlock) {
    const Eigen::Index rows = std::min(kRowBlock, a.rows() - r0);
    const Eigen::MatrixXd gram = a.middleRows(r0, rows) * b.transpose();
    Eigen::MatrixXd value;
    detail::centered_kernel_matrix(spec, gram, &value, nullptr);
    total += value.sum();
  }
  return total;
}

}  // namespace

McEstimate uniform_mean_embedding_mc(const KernelSpec& spec, const Eigen::VectorXd& v,
                                     int n, std::uint64_t seed) {
  if (v.size() != spec.q) throw std::invalid_argument("direction dimension mismatch");
  const SampleSet samples = sample_uniform_sphere(spec.q, n, seed);
  const Eigen::VectorXd dots = samples.points * v;
  Eigen::MatrixXd value;
  detail::centered_kernel_matrix(spec, dots, &value, nullptr);
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = value(i, 0);
  return block_mean_se(values);
}

double mmd_two_sample(const KernelSpec& spec, const Eigen::MatrixXd& z,
                      const Eigen::MatrixXd& w) {
  if (z.cols() != spec.q || w.cols() != spec.q) {
    throw std::invalid_argument("sample dimension does not match kernel");
  }
  const double n = static_cast<double>(z.rows());
  const double m = static_cast<double>(w.rows());
  const double szz = sum_kernel_pairs(spec, z, z);
  const double sww = sum_kernel_pairs(spec, w, w);
  const double szw = sum_kernel_pairs(spec, z, w);
  return szz / (n * n) + sww / (m * m) - 2.0 * szw / (n * m);
}

McEstimate mmd_to_uniform_mc(const KernelSpec& spec, const Eigen::MatrixXd& z,
                             const SampleSet& reference) {
  const Eigen::MatrixXd& w = reference.points;
  const Eigen::Index m = w.rows();
  const Eigen::Index n = z.rows();

  McEstimate result;
  result.estimate = mmd_two_sample(spec, z, w);

  // First-order influence of each reference point:
  //   psi_j = 2 (1/m) sum_j' phi(w_j . w_j') - 2 (1/n) sum_i phi(z_i . w_j).
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  for (Eigen::Index r0 = 0; r0 < m; r0 += kRowBlock) {
    const Eigen::Index rows = std::min(kRowBlock, m - r0);
    const Eigen::MatrixXd gram = w.middleRows(r0, rows) * w.transpose();
    Eigen::MatrixXd value;
    detail::centered_kernel_matrix(spec, gram, &value, nullptr);
    g.segment(r0, rows) = value.rowwise().sum() / static_cast<double>(m);
  }
  Eigen::MatrixXd cross_value;
  detail::centered_kernel_matrix(spec, w * z.transpose(), &cross_value, nullptr);
  const Eigen::VectorXd f = cross_value.rowwise().sum() / static_cast<double>(n);

  std::vector<double> psi(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) {
    psi[static_cast<std::size_t>(j)] = 2.0 * (g(j) - f(j));
  }
  result.std_error = block_mean_se(psi).std_error;
  return result;
}

void export_sample_csv(std::ostream& out, const Eigen::MatrixXd& points) {
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (j > 0) out << ',';
      out << points(i, j);
    }
    out << '\n';
  }
}

Eigen::MatrixXd import_sample_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("ragged CSV input");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty CSV input");
  Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      points(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return points;
}

}  // namespace spherekit
