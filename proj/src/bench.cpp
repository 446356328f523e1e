#include "spherekit/bench.hpp"

#include "spherekit/losses.hpp"
#include "spherekit/sampling.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace spherekit {

namespace {

using Clock = std::chrono::steady_clock;

double time_runs(const std::function<double()>& body, int repeats, BenchRecord* record) {
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  double value = body();  // warm run
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(repeats));
  for (int r = 0; r < repeats; ++r) {
    const auto start = Clock::now();
    value = body();
    const auto stop = Clock::now();
    const double seconds =
        std::chrono::duration_cast<std::chrono::duration<double>>(stop - start).count();
    times.push_back(std::max(seconds, 1e-9));
  }
  std::sort(times.begin(), times.end());
  record->min_seconds = times.front();
  record->max_seconds = times.back();
  record->median_seconds = times[times.size() / 2];
  return value;
}

constexpr Eigen::Index kCovRowBlock = 512;

}  // namespace

nlohmann::json BenchRecord::to_json() const {
  return {{"loss", loss},
          {"q", q},
          {"batch", batch},
          {"median_seconds", median_seconds},
          {"min_seconds", min_seconds},
          {"max_seconds", max_seconds},
          {"value", value},
          {"buffer_doubles", buffer_doubles}};
}

BenchRecord bench_sfrik_uniformity(int q, int batch, int repeats, std::uint64_t seed) {
  const SampleSet sample = sample_uniform_sphere(q, batch, seed);
  const KernelSpec spec =
      center_kernel(KernelSpec::truncated(q, {{0, 1.0}, {1, 1.0}, {2, 40.0}}));

  BenchRecord record;
  record.loss = "sfrik-uniformity";
  record.q = q;
  record.batch = batch;
  record.buffer_doubles = static_cast<double>(batch) * batch;

  const Eigen::MatrixXd& z = sample.points;
  const double n = static_cast<double>(batch);
  record.value = time_runs(
      [&]() {
        const Eigen::MatrixXd gram = z * z.transpose();
        Eigen::MatrixXd value;
        detail::centered_kernel_matrix(spec, gram, &value, nullptr);
        return value.sum() / (n * n);
      },
      repeats, &record);
  return record;
}

BenchRecord bench_vicreg(int q, int batch, int repeats, std::uint64_t seed) {
  const SampleSet sample = sample_uniform_sphere(q, batch, seed);
  const double gamma = 1.0, epsilon = 1e-4;

  BenchRecord record;
  record.loss = "vicreg";
  record.q = q;
  record.batch = batch;
  record.buffer_doubles = static_cast<double>(std::min<Eigen::Index>(kCovRowBlock, q)) * q;

  const Eigen::Index n = batch;
  const Eigen::MatrixXd centered =
      sample.points.rowwise() - sample.points.colwise().mean();
  record.value = time_runs(
      [&]() {
        const double inv_nm1 = 1.0 / static_cast<double>(n - 1);
        double variance_term = 0.0;
        double covariance_sq = 0.0;
        for (Eigen::Index r0 = 0; r0 < q; r0 += kCovRowBlock) {
          const Eigen::Index rows = std::min<Eigen::Index>(kCovRowBlock, q - r0);
          const Eigen::MatrixXd cov_block =
              inv_nm1 * (centered.middleCols(r0, rows).transpose() * centered);
          for (Eigen::Index i = 0; i < rows; ++i) {
            const double diag = cov_block(i, r0 + i);
            const double std_i = std::sqrt(diag + epsilon);
            if (gamma > std_i) variance_term += gamma - std_i;
            covariance_sq += cov_block.row(i).squaredNorm() - diag * diag;
          }
        }
        return variance_term / q + covariance_sq / q;
      },
      repeats, &record);
  return record;
}

ScalingFit fit_scaling(const std::vector<double>& sizes, const std::vector<double>& times) {
  if (sizes.size() != times.size() || sizes.size() < 4) {
    throw std::invalid_argument("scaling fit needs >= 4 matching (size, time) points");
  }
  const auto n = static_cast<double>(sizes.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double x = std::log(sizes[i]);
    const double y = std::log(times[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  ScalingFit fit;
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double ss_res = syy - sy * sy / n - fit.exponent * (sxy - sx * sy / n);
  const double ss_tot = syy - sy * sy / n;
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

nlohmann::json BenchSummary::to_json() const {
  nlohmann::json j;
  j["records"] = nlohmann::json::array();
  for (const BenchRecord& r : records) j["records"].push_back(r.to_json());
  j["fits"] = nlohmann::json::object();
  for (const auto& [name, fit] : fits) {
    j["fits"][name] = {{"exponent", fit.exponent}, {"r_squared", fit.r_squared}};
  }
  return j;
}

void BenchSummary::write_csv(std::ostream& out) const {
  out << "loss,q,batch,median_seconds,min_seconds,max_seconds,value,buffer_doubles\n";
  out << std::setprecision(17);
  for (const BenchRecord& r : records) {
    out << r.loss << ',' << r.q << ',' << r.batch << ',' << r.median_seconds << ','
        << r.min_seconds << ',' << r.max_seconds << ',' << r.value << ','
        << r.buffer_doubles << '\n';
  }
}

BenchSummary run_standard_bench(const std::vector<int>& q_list,
                                const std::vector<int>& batch_list,
                                int batch_for_q_sweep, int q_for_batch_sweep,
                                int repeats, std::uint64_t seed) {
  BenchSummary summary;

  std::vector<double> qs, sfrik_times, vicreg_times;
  for (int q : q_list) {
    BenchRecord s = bench_sfrik_uniformity(q, batch_for_q_sweep, repeats, seed);
    BenchRecord v = bench_vicreg(q, batch_for_q_sweep, repeats, seed);
    qs.push_back(q);
    sfrik_times.push_back(s.median_seconds);
    vicreg_times.push_back(v.median_seconds);
    summary.records.push_back(std::move(s));
    summary.records.push_back(std::move(v));
  }
  summary.fits["sfrik-q"] = fit_scaling(qs, sfrik_times);
  summary.fits["vicreg-q"] = fit_scaling(qs, vicreg_times);

  std::vector<double> batches, batch_times;
  for (int b : batch_list) {
    BenchRecord s = bench_sfrik_uniformity(q_for_batch_sweep, b, repeats, seed);
    batches.push_back(b);
    batch_times.push_back(s.median_seconds);
    summary.records.push_back(std::move(s));
  }
  summary.fits["sfrik-batch"] = fit_scaling(batches, batch_times);
  return summary;
}

}  // namespace spherekit
