#pragma once

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace spherekit {

struct BenchRecord {
  std::string loss;  // "sfrik-uniformity" or "vicreg"
  int q = 0;
  int batch = 0;
  double median_seconds = 0.0;
  double min_seconds = 0.0;
  double max_seconds = 0.0;
  double value = 0.0;          // computed loss (deterministic; timing is not)
  double buffer_doubles = 0.0; // peak auxiliary buffer, in doubles

  nlohmann::json to_json() const;
};

// Value-only evaluation of the truncated L=2 uniformity estimator on a
// uniform batch: one |I| x |I| Gram block plus the entrywise kernel. Median
// of `repeats` timed runs after one warm run.
BenchRecord bench_sfrik_uniformity(int q, int batch, int repeats, std::uint64_t seed);

// Value-only VICReg variance + covariance terms. The q x q covariance is
// processed in row blocks so the working set stays O(block * q) regardless
// of q; the same blocked algorithm runs at every size so the fitted exponent
// reflects the q^2 |I| arithmetic, not an algorithm switch.
BenchRecord bench_vicreg(int q, int batch, int repeats, std::uint64_t seed);

// Least-squares slope of log(time) against log(size).
struct ScalingFit {
  double exponent = 0.0;
  double r_squared = 0.0;
};
ScalingFit fit_scaling(const std::vector<double>& sizes, const std::vector<double>& times);

// q sweeps for both losses at fixed |I| = batch_for_q_sweep, plus a batch
// sweep for the uniformity estimator at fixed q = q_for_batch_sweep.
// Fits: "sfrik-q", "vicreg-q", "sfrik-batch".
struct BenchSummary {
  std::vector<BenchRecord> records;
  std::map<std::string, ScalingFit> fits;

  nlohmann::json to_json() const;
  void write_csv(std::ostream& out) const;
};
BenchSummary run_standard_bench(const std::vector<int>& q_list,
                                const std::vector<int>& batch_list,
                                int batch_for_q_sweep, int q_for_batch_sweep,
                                int repeats, std::uint64_t seed);

}  // namespace spherekit
