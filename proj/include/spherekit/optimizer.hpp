#pragma once

#include "spherekit/kernels.hpp"
#include "spherekit/losses.hpp"
#include "spherekit/sampling.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spherekit {

// Paired embedding batches standing in for two augmented views of the same
// latent points.
struct TwoViewBatch {
  EmbeddingBatch z1;
  EmbeddingBatch z2;
  // generator provenance
  int clusters = 0;
  double noise_angle = 0.0;
  std::uint64_t seed = 0;
};

// clusters == 0: every latent point sampled uniformly at random.
// clusters >= 1: that many uniform cluster centers, points assigned
// round-robin (clusters == 1 is the fully collapsed configuration).
// Each view is the latent point rotated by an independent angle, uniform in
// [0, noise_angle], within a random 2-plane containing it.
TwoViewBatch generate_two_view_data(int q, int n, int clusters, double noise_angle,
                                    std::uint64_t seed);

// Riemannian gradient on the sphere: g - (g . z) z.
Eigen::VectorXd tangent_project(const Eigen::VectorXd& z, const Eigen::VectorXd& g);
// Row-wise version for whole batches.
EmbeddingBatch tangent_project_batch(const EmbeddingBatch& z, const EmbeddingBatch& g);

enum class LossKind { Sfrik, Auh, Simclr, Vicreg };
std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

struct OptimConfig {
  double step_size = 0.0;  // <= 0 picks the default 0.5 / (lambda + mu * sum b_l)
  int steps = 1000;
  LossKind loss = LossKind::Sfrik;
  LossWeights weights;
  KernelSpec kernel;  // centered automatically for Sfrik
  int eval_every = 100;
  std::uint64_t seed = 0;
  int mc_ref_size = 4096;  // uniform reference sample for MC-MMD checkpoints
  bool record_mc_mmd = true;
};

struct TrajectoryRecord {
  int step = 0;
  double total = 0.0;
  double align = 0.0;
  double unif = 0.0;
  double mean_norm = 0.0;
  double autocorr_dev = 0.0;
  double mc_mmd = 0.0;
  double mc_mmd_se = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  EmbeddingBatch final_z1;
  EmbeddingBatch final_z2;

  // Fixed column order: step,total,align,unif,mean_norm,autocorr_dev,mc_mmd,mc_mmd_se
  void write_csv(std::ostream& out) const;
};

// One consistent checkpoint record: losses, moment statistics of z1, and
// (when a reference is given) the MC MMD-to-uniform of z1 with its standard
// error. The kernel spec must be centered.
TrajectoryRecord evaluate_checkpoint(const KernelSpec& spec, const LossWeights& weights,
                                     const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                                     const SampleSet* uniform_ref, int step);

// Projected gradient descent on the selected loss, embeddings as the free
// parameters: z <- normalize(z - eta * tangent_project(z, grad)). Records a
// checkpoint every eval_every steps plus the final state. Aborts if the loss
// exceeds 10x its initial value. Bit-deterministic given config and data.
Trajectory minimize(const OptimConfig& config, const TwoViewBatch& data);

// Named reference hyperparameter configurations.
struct Preset {
  std::string name;
  int q;
  double lambda;
  double b1, b2, b3;
};
const std::vector<Preset>& presets();
std::optional<Preset> find_preset(const std::string& name);

}  // namespace spherekit
