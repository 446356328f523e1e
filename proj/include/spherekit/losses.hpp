#pragma once

#include "spherekit/kernels.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <map>
#include <string>

namespace spherekit {

// Rows are embeddings z_i in R^q. Losses treat the rows as free vectors;
// the sphere constraint is handled by the optimizer's tangent projection.
using EmbeddingBatch = Eigen::MatrixXd;

struct LossWeights {
  double lambda = 1.0;   // alignment weight
  double mu = 0.5;       // regularizer weight
  double tau = 0.15;     // SimCLR temperature
  double t_scale = 2.5;  // AUH RBF scale
  double nu = 1.0;       // VICReg covariance weight
  double gamma = 1.0;    // VICReg variance threshold
  double epsilon = 1e-4; // VICReg variance stabilizer
};

struct LossReport {
  double value = 0.0;
  std::map<std::string, double> terms;
  EmbeddingBatch grad1;  // gradient w.r.t. the first (or only) batch
  EmbeddingBatch grad2;  // empty for single-batch losses
  double grad_norm = 0.0;

  nlohmann::json to_json() const;
};

// (1/|I|) sum_i ||z_i^(1) - z_i^(2)||^2.
LossReport alignment_loss(const EmbeddingBatch& z1, const EmbeddingBatch& z2);

// Biased squared-MMD-to-uniform estimator (1/|I|^2) sum_ii' phi~(z_i . z_i'),
// diagonal included. Requires a centered spec. Truncated specs with L <= 3
// take the closed-form cubic fast path; force_generic = true keeps the
// Legendre-recurrence path (the two must agree to 1e-12).
LossReport uniformity_loss(const KernelSpec& spec, const EmbeddingBatch& z,
                           bool force_generic = false);

// lambda * alignment + mu * (uniformity(z1) + uniformity(z2)).
LossReport total_loss(const LossWeights& weights, const KernelSpec& spec,
                      const EmbeddingBatch& z1, const EmbeddingBatch& z2);

// (1/(2|I|)) sum_{v,i} log sum_{(v',i') != (v,i)} exp(z_i^v . z_i'^v' / tau).
LossReport simclr_regularizer(double tau, const EmbeddingBatch& z1,
                              const EmbeddingBatch& z2);

// (1/(2|I|^2)) sum_v log sum_{i,i'} exp(-t ||z_i^v - z_i'^v||^2).
LossReport auh_regularizer(double t_scale, const EmbeddingBatch& z1,
                           const EmbeddingBatch& z2);

// (1/2)[v(Z1)+v(Z2)] + (nu/(2 mu))[c(Z1)+c(Z2)] with hinge variance and
// squared off-diagonal covariance terms; unbiased (|I|-1) normalization.
// Embeddings need not be normalized. Requires |I| >= 2.
LossReport vicreg_regularizer(const LossWeights& weights, const EmbeddingBatch& z1,
                              const EmbeddingBatch& z2);

namespace detail {
// Entrywise phi~ (and optionally d phi~/dt) on a Gram matrix; natural smooth
// extension outside [-1, 1] (polynomial / exponential), so finite-difference
// probes of the losses stay well defined.
void centered_kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& gram,
                            Eigen::MatrixXd* value, Eigen::MatrixXd* deriv);
}  // namespace detail

}  // namespace spherekit
