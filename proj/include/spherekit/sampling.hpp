#pragma once

#include "spherekit/kernels.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace spherekit {

// Counter-based deterministic randomness: every draw is a pure function of
// (seed, counter), so sample sets regenerate bit-identically and rows can be
// produced in any order. The mixer is SplitMix64 applied to seed ^ counter
// with distinct odd multipliers.
namespace rng {
std::uint64_t mix(std::uint64_t seed, std::uint64_t counter);
double uniform01(std::uint64_t seed, std::uint64_t counter);   // in (0, 1]
double gaussian(std::uint64_t seed, std::uint64_t counter);    // standard normal
}  // namespace rng

struct SampleSet {
  Eigen::MatrixXd points;  // n x q, unit rows
  std::uint64_t seed = 0;
  std::string generator;
};

// i.i.d. uniform points on S^{q-1}: q independent standard normals per point,
// normalized. Deterministic given (seed, n, q).
SampleSet sample_uniform_sphere(int q, int n, std::uint64_t seed);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Monte-Carlo estimate of the kernel mean embedding at direction v:
// mean over n uniform samples u of phi(u . v). Standard error from 100
// block means.
McEstimate uniform_mean_embedding_mc(const KernelSpec& spec, const Eigen::VectorXd& v,
                                     int n, std::uint64_t seed);

// Biased (V-statistic) two-sample MMD^2:
// (1/n^2) sum K(z,z') + (1/m^2) sum K(w,w') - (2/nm) sum K(z,w).
// All three double sums share one blocked accumulation path, so
// mmd_two_sample(spec, Z, Z) cancels to exactly zero.
double mmd_two_sample(const KernelSpec& spec, const Eigen::MatrixXd& z,
                      const Eigen::MatrixXd& w);

// MMD^2 between a batch and a uniform reference sample, with a standard error
// for the W-dependent part (linearized influence values, 100 block means).
McEstimate mmd_to_uniform_mc(const KernelSpec& spec, const Eigen::MatrixXd& z,
                             const SampleSet& reference);

// One row per point, 17 significant digits.
void export_sample_csv(std::ostream& out, const Eigen::MatrixXd& points);
Eigen::MatrixXd import_sample_csv(std::istream& in);

}  // namespace spherekit
