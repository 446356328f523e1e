#include "spherekit/optimizer.hpp"

#include "spherekit/harmonics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace spherekit {

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Sfrik: return "sfrik";
    case LossKind::Auh: return "auh";
    case LossKind::Simclr: return "simclr";
    case LossKind::Vicreg: return "vicreg";
  }
  return "unknown";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "sfrik") return LossKind::Sfrik;
  if (name == "auh") return LossKind::Auh;
  if (name == "simclr") return LossKind::Simclr;
  if (name == "vicreg") return LossKind::Vicreg;
  throw std::invalid_argument("unknown loss kind: " + name);
}

TwoViewBatch generate_two_view_data(int q, int n, int clusters, double noise_angle,
                                    std::uint64_t seed) {
  if (clusters < 0) throw std::domain_error("cluster count must be >= 0");
  if (noise_angle < 0.0) throw std::domain_error("noise angle must be >= 0");

  TwoViewBatch batch;
  batch.clusters = clusters;
  batch.noise_angle = noise_angle;
  batch.seed = seed;

  // Disjoint counter streams: latent points, then view directions/angles.
  const SampleSet latent_src =
      sample_uniform_sphere(q, clusters == 0 ? n : clusters, seed);
  EmbeddingBatch latent(n, q);
  for (int i = 0; i < n; ++i) {
    latent.row(i) = clusters == 0 ? latent_src.points.row(i)
                                  : latent_src.points.row(i % clusters);
  }

  batch.z1.resize(n, q);
  batch.z2.resize(n, q);
  const std::uint64_t view_seed = rng::mix(seed, 0x76696577ULL);  // independent stream
  for (int view = 0; view < 2; ++view) {
    EmbeddingBatch& z = (view == 0) ? batch.z1 : batch.z2;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd point = latent.row(i).transpose();
      if (noise_angle == 0.0) {
        z.row(i) = point.transpose();
        continue;
      }
      const std::uint64_t base =
          (static_cast<std::uint64_t>(view) * n + static_cast<std::uint64_t>(i)) * (q + 2);
      Eigen::VectorXd direction(q);
      for (int j = 0; j < q; ++j) {
        direction(j) = rng::gaussian(view_seed, base + static_cast<std::uint64_t>(j));
      }
      // Rotate within the 2-plane spanned by the point and an orthogonalized
      // random direction.
      direction -= direction.dot(point) * point;
      const double norm = direction.norm();
      if (norm < 1e-12) {
        z.row(i) = point.transpose();
        continue;
      }
      direction /= norm;
      const double angle =
          noise_angle * rng::uniform01(view_seed, base + static_cast<std::uint64_t>(q));
      z.row(i) = (std::cos(angle) * point + std::sin(angle) * direction).transpose();
      z.row(i).normalize();
    }
  }
  return batch;
}

Eigen::VectorXd tangent_project(const Eigen::VectorXd& z, const Eigen::VectorXd& g) {
  return g - g.dot(z) * z;
}

EmbeddingBatch tangent_project_batch(const EmbeddingBatch& z, const EmbeddingBatch& g) {
  const Eigen::VectorXd radial = (g.array() * z.array()).rowwise().sum();
  return g - radial.asDiagonal() * z;
}

namespace {

LossReport evaluate_loss(const OptimConfig& config, const KernelSpec& spec,
                         const EmbeddingBatch& z1, const EmbeddingBatch& z2) {
  switch (config.loss) {
    case LossKind::Sfrik:
      return total_loss(config.weights, spec, z1, z2);
    case LossKind::Auh: {
      LossReport reg = auh_regularizer(config.weights.t_scale, z1, z2);
      const LossReport align = alignment_loss(z1, z2);
      LossReport report;
      report.value = config.weights.lambda * align.value + config.weights.mu * reg.value;
      report.terms["alignment"] = align.value;
      report.terms["regularizer"] = reg.value;
      report.grad1 = config.weights.lambda * align.grad1 + config.weights.mu * reg.grad1;
      report.grad2 = config.weights.lambda * align.grad2 + config.weights.mu * reg.grad2;
      report.grad_norm = std::sqrt(report.grad1.squaredNorm() + report.grad2.squaredNorm());
      return report;
    }
    case LossKind::Simclr: {
      LossReport reg = simclr_regularizer(config.weights.tau, z1, z2);
      const LossReport align = alignment_loss(z1, z2);
      LossReport report;
      report.value = config.weights.lambda * align.value + config.weights.mu * reg.value;
      report.terms["alignment"] = align.value;
      report.terms["regularizer"] = reg.value;
      report.grad1 = config.weights.lambda * align.grad1 + config.weights.mu * reg.grad1;
      report.grad2 = config.weights.lambda * align.grad2 + config.weights.mu * reg.grad2;
      report.grad_norm = std::sqrt(report.grad1.squaredNorm() + report.grad2.squaredNorm());
      return report;
    }
    case LossKind::Vicreg: {
      LossReport reg = vicreg_regularizer(config.weights, z1, z2);
      const LossReport align = alignment_loss(z1, z2);
      LossReport report;
      report.value = config.weights.lambda * align.value + config.weights.mu * reg.value;
      report.terms["alignment"] = align.value;
      report.terms["regularizer"] = reg.value;
      report.grad1 = config.weights.lambda * align.grad1 + config.weights.mu * reg.grad1;
      report.grad2 = config.weights.lambda * align.grad2 + config.weights.mu * reg.grad2;
      report.grad_norm = std::sqrt(report.grad1.squaredNorm() + report.grad2.squaredNorm());
      return report;
    }
  }
  throw std::logic_error("unreachable loss kind");
}

}  // namespace

TrajectoryRecord evaluate_checkpoint(const KernelSpec& spec, const LossWeights& weights,
                                     const EmbeddingBatch& z1, const EmbeddingBatch& z2,
                                     const SampleSet* uniform_ref, int step) {
  TrajectoryRecord record;
  record.step = step;
  const LossReport align = alignment_loss(z1, z2);
  const LossReport unif1 = uniformity_loss(spec, z1);
  const LossReport unif2 = uniformity_loss(spec, z2);
  record.align = align.value;
  record.unif = unif1.value + unif2.value;
  record.total = weights.lambda * align.value + weights.mu * record.unif;
  const MomentStats stats = embedding_moment_stats(z1);
  record.mean_norm = stats.mean_norm;
  record.autocorr_dev = stats.autocorr_deviation;
  if (uniform_ref != nullptr) {
    const McEstimate mc = mmd_to_uniform_mc(spec, z1, *uniform_ref);
    record.mc_mmd = mc.estimate;
    record.mc_mmd_se = mc.std_error;
  }
  return record;
}

Trajectory minimize(const OptimConfig& config, const TwoViewBatch& data) {
  if (config.steps < 1) throw std::invalid_argument("step count must be >= 1");
  KernelSpec spec = config.kernel;
  if (!spec.centered) spec = center_kernel(std::move(spec));

  double step_size = config.step_size;
  if (step_size <= 0.0) {
    step_size = 0.5 / (config.weights.lambda + config.weights.mu * spec.coefficient_sum());
  }

  SampleSet uniform_ref;
  const SampleSet* ref = nullptr;
  if (config.record_mc_mmd) {
    uniform_ref = sample_uniform_sphere(static_cast<int>(data.z1.cols()),
                                        config.mc_ref_size,
                                        rng::mix(config.seed, 0x726566ULL));
    ref = &uniform_ref;
  }

  EmbeddingBatch z1 = data.z1;
  EmbeddingBatch z2 = data.z2;
  Trajectory trajectory;
  trajectory.records.push_back(
      evaluate_checkpoint(spec, config.weights, z1, z2, ref, 0));
  const double initial_total = trajectory.records.front().total;

  OptimConfig effective = config;
  effective.kernel = spec;
  for (int step = 1; step <= config.steps; ++step) {
    const LossReport report = evaluate_loss(effective, spec, z1, z2);
    if (std::abs(report.value) > 10.0 * std::max(1e-12, std::abs(initial_total)) &&
        report.value > initial_total) {
      throw std::runtime_error("optimization diverged at step " + std::to_string(step));
    }
    z1 -= step_size * tangent_project_batch(z1, report.grad1);
    z2 -= step_size * tangent_project_batch(z2, report.grad2);
    z1.rowwise().normalize();
    z2.rowwise().normalize();
    if (step % config.eval_every == 0 || step == config.steps) {
      trajectory.records.push_back(
          evaluate_checkpoint(spec, config.weights, z1, z2, ref, step));
    }
  }
  trajectory.final_z1 = std::move(z1);
  trajectory.final_z2 = std::move(z2);
  return trajectory;
}

void Trajectory::write_csv(std::ostream& out) const {
  out << "step,total,align,unif,mean_norm,autocorr_dev,mc_mmd,mc_mmd_se\n";
  out << std::setprecision(17);
  for (const TrajectoryRecord& r : records) {
    out << r.step << ',' << r.total << ',' << r.align << ',' << r.unif << ','
        << r.mean_norm << ',' << r.autocorr_dev << ',' << r.mc_mmd << ','
        << r.mc_mmd_se << '\n';
  }
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"l2-q1024", 1024, 400.0, 1.0, 40.0, 0.0},
      {"l2-q2048", 2048, 400.0, 1.0, 40.0, 0.0},
      {"l2-q4096", 4096, 1000.0, 1.0, 40.0, 0.0},
      {"l2-q8192", 8192, 2000.0, 1.0, 20.0, 0.0},
      {"l3-q8192", 8192, 4000.0, 1.0, 40.0, 40.0},
      {"in-l2-q8192", 8192, 4000.0, 1.0, 20.0, 0.0},
      {"in-l2-q16384", 16384, 20000.0, 1.0, 40.0, 0.0},
      {"in-l2-q32768", 32768, 40000.0, 1.0, 40.0, 0.0},
      {"in-l3-q32768", 32768, 40000.0, 1.0, 40.0, 40.0},
  };
  return table;
}

std::optional<Preset> find_preset(const std::string& name) {
  for (const Preset& p : presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

}  // namespace spherekit
