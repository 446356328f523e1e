#include "spherekit/verify.hpp"

#include "spherekit/bench.hpp"
#include "spherekit/harmonics.hpp"
#include "spherekit/kernels.hpp"
#include "spherekit/losses.hpp"
#include "spherekit/optimizer.hpp"
#include "spherekit/sampling.hpp"
#include "spherekit/sphere_math.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace spherekit {

nlohmann::json CheckResult::to_json() const {
  return {{"name", name},
          {"status", passed ? "pass" : "fail"},
          {"measured", measured},
          {"tolerance", tolerance}};
}

bool SuiteResult::passed() const {
  for (const CheckResult& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

nlohmann::json SuiteResult::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["passed"] = passed();
  j["checks"] = nlohmann::json::array();
  for (const CheckResult& c : checks) j["checks"].push_back(c.to_json());
  return j;
}

namespace {

CheckResult bounded_check(const std::string& name, double measured, double tolerance) {
  CheckResult c;
  c.name = name;
  c.measured = measured;
  c.tolerance = tolerance;
  c.passed = measured <= tolerance;
  return c;
}

CheckResult range_check(const std::string& name, double measured, double lo, double hi) {
  CheckResult c;
  c.name = name;
  c.measured = measured;
  c.tolerance = hi;
  c.passed = measured >= lo && measured <= hi;
  return c;
}

SuiteResult suite_legendre(std::uint64_t) {
  SuiteResult suite{"legendre", {}};
  std::vector<double> grid(1001);
  for (int i = 0; i <= 1000; ++i) grid[static_cast<std::size_t>(i)] = -1.0 + i * 2e-3;

  double worst = 0.0;
  for (int q = 3; q <= 64; ++q) {
    const LegendreTable table(q, 30);
    const Eigen::MatrixXd rec = table.evaluate(grid);
    for (int l = 0; l <= 30; ++l) {
      for (int i = 0; i <= 1000; ++i) {
        const double closed = legendre_closed_form(q, l, grid[static_cast<std::size_t>(i)]);
        const double err = std::abs(rec(l, i) - closed) / std::max(1.0, std::abs(closed));
        worst = std::max(worst, err);
      }
    }
  }
  suite.checks.push_back(bounded_check("legendre-recurrence-vs-closed-form", worst, 1e-10));
  return suite;
}

SuiteResult suite_orthogonality(std::uint64_t) {
  SuiteResult suite{"orthogonality", {}};
  double worst_off = 0.0, worst_diag = 0.0;
  for (int q = 3; q <= 16; ++q) {
    const QuadratureRule rule = gauss_jacobi_sphere(q, 200);
    const LegendreTable table(q, 10);
    std::vector<double> nodes(static_cast<std::size_t>(rule.nodes.size()));
    for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
      nodes[static_cast<std::size_t>(k)] = rule.nodes(k);
    }
    const Eigen::MatrixXd p = table.evaluate(nodes);
    const Eigen::MatrixXd gram = p * rule.weights.asDiagonal() * p.transpose();
    for (int a = 0; a <= 10; ++a) {
      for (int b = 0; b <= 10; ++b) {
        if (a == b) {
          const double expected = legendre_weight_norm(q, a);
          worst_diag = std::max(worst_diag,
                                std::abs(gram(a, a) - expected) / expected);
        } else {
          worst_off = std::max(worst_off, std::abs(gram(a, b)));
        }
      }
    }
  }
  suite.checks.push_back(bounded_check("orthogonality-off-diagonal", worst_off, 1e-9));
  suite.checks.push_back(bounded_check("orthogonality-diagonal-norm", worst_diag, 1e-9));
  return suite;
}

SuiteResult suite_mean_embedding(std::uint64_t seed) {
  SuiteResult suite{"mean-embedding", {}};
  const int mc_n = 100000;
  for (int q : {3, 8, 32}) {
    std::vector<std::pair<std::string, KernelSpec>> kernels;
    kernels.emplace_back("truncated",
                         KernelSpec::truncated(q, {{0, 0.7}, {1, 1.0}, {2, 5.0}}));
    kernels.emplace_back("rbf", KernelSpec::rbf(q, 1.0));
    kernels.emplace_back("gendist", KernelSpec::gen_dist(q, 0.5 * q));

    const SampleSet probes =
        sample_uniform_sphere(q, 5, rng::mix(seed, 1000 + static_cast<std::uint64_t>(q)));
    for (const auto& [label, spec] : kernels) {
      const double b0 = spec.coefficient(0);
      double worst = 0.0;
      for (int p = 0; p < 5; ++p) {
        const McEstimate est = uniform_mean_embedding_mc(
            spec, probes.points.row(p).transpose(), mc_n,
            rng::mix(seed, 2000 + static_cast<std::uint64_t>(100 * q + p)));
        worst = std::max(worst, std::abs(est.estimate - b0) / est.std_error);
      }
      suite.checks.push_back(bounded_check(
          "mean-embedding-" + label + "-q" + std::to_string(q), worst, 3.0));
    }
  }
  return suite;
}

SuiteResult suite_feature_map(std::uint64_t seed) {
  SuiteResult suite{"feature-map", {}};
  const int q_cycle[3] = {3, 8, 16};
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int q = q_cycle[trial % 3];
    const auto tag = static_cast<std::uint64_t>(trial);
    const int n = 8 + static_cast<int>(rng::mix(seed, 3000 + tag) % 249);
    const double b1 = 50.0 * rng::uniform01(seed, 3300 + tag);
    const double b2 = 50.0 * rng::uniform01(seed, 3600 + tag);

    const SampleSet batch = sample_uniform_sphere(q, n, rng::mix(seed, 3900 + tag));
    const KernelSpec spec =
        center_kernel(KernelSpec::truncated(q, {{1, b1}, {2, b2}}));
    const double gram_path = uniformity_loss(spec, batch.points).value;
    const HarmonicBasis basis = build_basis(q, b1, b2);
    const double moment_path = basis.mmd_via_moments(batch.points);
    worst = std::max(worst, std::abs(gram_path - moment_path) /
                                std::max(1.0, std::abs(gram_path)));
  }
  suite.checks.push_back(bounded_check("feature-map-gram-vs-moments", worst, 1e-8));
  return suite;
}

SuiteResult suite_addition(std::uint64_t seed) {
  SuiteResult suite{"addition", {}};
  double worst = 0.0;
  for (int q = 3; q <= 12; ++q) {
    const HarmonicBasis basis = build_basis(q, 1.0, 1.0);
    const double area = sphere_surface_area(q);
    const SampleSet pairs =
        sample_uniform_sphere(q, 200, rng::mix(seed, 4000 + static_cast<std::uint64_t>(q)));
    for (int p = 0; p < 100; ++p) {
      const Eigen::VectorXd u = pairs.points.row(2 * p).transpose();
      const Eigen::VectorXd v = pairs.points.row(2 * p + 1).transpose();
      const double t = u.dot(v);
      const double lhs1 = basis.orthonormal_order1(u).dot(basis.orthonormal_order1(v));
      const double rhs1 =
          static_cast<double>(harmonic_space_dim(q, 1)) / area * legendre_closed_form(q, 1, t);
      const double lhs2 = basis.orthonormal_order2(u).dot(basis.orthonormal_order2(v));
      const double rhs2 =
          static_cast<double>(harmonic_space_dim(q, 2)) / area * legendre_closed_form(q, 2, t);
      worst = std::max({worst, std::abs(lhs1 - rhs1), std::abs(lhs2 - rhs2)});
    }
  }
  suite.checks.push_back(bounded_check("addition-theorem-orders-1-2", worst, 1e-8));
  return suite;
}

SuiteResult suite_coefficients(std::uint64_t) {
  SuiteResult suite{"coefficients", {}};

  for (double s : {1.2, 1.5, 1.8}) {
    const KernelSpec spec = KernelSpec::gen_dist(3, s, 10);
    auto phi = [&spec](double t) { return kernel_eval(spec, t); };
    // The kernel has an algebraic endpoint singularity in its derivatives,
    // so quadrature convergence is only polynomial in the node count; 4000
    // nodes leave the s = 1.2 case comfortably under 1e-8.
    const CoefficientExpansion quad = expand_coefficients(phi, 3, 10, 4000);
    const std::vector<double> closed = gendist_coefficients(3, s, 10);
    double worst = 0.0;
    for (int l = 0; l <= 10; ++l) {
      worst = std::max(worst, std::abs(quad.coefficients[static_cast<std::size_t>(l)] -
                                       closed[static_cast<std::size_t>(l)]));
    }
    std::ostringstream name;
    name << "gendist-cross-oracle-s" << s;
    suite.checks.push_back(bounded_check(name.str(), worst, 1e-8));
  }

  const KernelSpec rbf = KernelSpec::rbf(3, 1.0, 20);
  double min_coeff = rbf.coefficient(0);
  double worst_bound_ratio = 0.0;
  for (int l = 0; l <= 20; ++l) {
    min_coeff = std::min(min_coeff, rbf.coefficient(l));
    worst_bound_ratio =
        std::max(worst_bound_ratio, rbf.coefficient(l) / rbf_coefficient_bound(3, 1.0, l));
  }
  CheckResult positive;
  positive.name = "rbf-coefficients-positive";
  positive.measured = min_coeff;
  positive.tolerance = 0.0;
  positive.passed = min_coeff > 0.0;
  suite.checks.push_back(positive);
  suite.checks.push_back(
      bounded_check("rbf-coefficients-within-bound", worst_bound_ratio, 1.0 + 1e-12));

  auto phi_rbf = [](double t) { return std::exp(-2.0 * (1.0 - t)); };
  const CoefficientExpansion rbf_quad = expand_coefficients(phi_rbf, 3, 10);
  double worst_rbf = 0.0;
  for (int l = 0; l <= 10; ++l) {
    worst_rbf = std::max(worst_rbf, std::abs(rbf_quad.coefficients[static_cast<std::size_t>(l)] -
                                             rbf.coefficient(l)));
  }
  suite.checks.push_back(bounded_check("rbf-cross-oracle", worst_rbf, 1e-8));
  return suite;
}

using LossFn = std::function<double(const EmbeddingBatch&, const EmbeddingBatch&)>;

double fd_gradient_error(const LossFn& f, EmbeddingBatch z1, EmbeddingBatch z2,
                         const EmbeddingBatch& g1, const EmbeddingBatch& g2) {
  const double h = 1e-5;
  double diff_sq = 0.0;
  for (int which = 0; which < 2; ++which) {
    EmbeddingBatch& z = (which == 0) ? z1 : z2;
    const EmbeddingBatch& g = (which == 0) ? g1 : g2;
    if (g.size() == 0) continue;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      for (Eigen::Index j = 0; j < z.cols(); ++j) {
        const double saved = z(i, j);
        z(i, j) = saved + h;
        const double up = f(z1, z2);
        z(i, j) = saved - h;
        const double down = f(z1, z2);
        z(i, j) = saved;
        const double fd = (up - down) / (2.0 * h);
        diff_sq += (fd - g(i, j)) * (fd - g(i, j));
      }
    }
  }
  const double scale = std::max(std::sqrt(g1.squaredNorm() + g2.squaredNorm()), 1e-6);
  return std::sqrt(diff_sq) / scale;
}

SuiteResult suite_gradients(std::uint64_t seed) {
  SuiteResult suite{"gradients", {}};
  const int n = 8, q = 6;
  LossWeights weights;
  const KernelSpec truncated =
      center_kernel(KernelSpec::truncated(q, {{0, 1.0}, {1, 1.0}, {2, 2.0}, {3, 3.0}}));
  const KernelSpec rbf = center_kernel(KernelSpec::rbf(q, 1.0));

  double worst_align = 0.0, worst_unif = 0.0, worst_unif_rbf = 0.0;
  double worst_total = 0.0, worst_simclr = 0.0, worst_auh = 0.0, worst_vicreg = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto tag = static_cast<std::uint64_t>(trial);
    const EmbeddingBatch z1 =
        sample_uniform_sphere(q, n, rng::mix(seed, 5000 + tag)).points;
    const EmbeddingBatch z2 =
        sample_uniform_sphere(q, n, rng::mix(seed, 5500 + tag)).points;

    {
      const LossReport r = alignment_loss(z1, z2);
      worst_align = std::max(
          worst_align,
          fd_gradient_error([](const EmbeddingBatch& a, const EmbeddingBatch& b) {
            return alignment_loss(a, b).value;
          }, z1, z2, r.grad1, r.grad2));
    }
    {
      const LossReport r = uniformity_loss(truncated, z1);
      worst_unif = std::max(
          worst_unif,
          fd_gradient_error([&truncated](const EmbeddingBatch& a, const EmbeddingBatch&) {
            return uniformity_loss(truncated, a).value;
          }, z1, z2, r.grad1, EmbeddingBatch()));
    }
    {
      const LossReport r = uniformity_loss(rbf, z1);
      worst_unif_rbf = std::max(
          worst_unif_rbf,
          fd_gradient_error([&rbf](const EmbeddingBatch& a, const EmbeddingBatch&) {
            return uniformity_loss(rbf, a).value;
          }, z1, z2, r.grad1, EmbeddingBatch()));
    }
    {
      const LossReport r = total_loss(weights, truncated, z1, z2);
      worst_total = std::max(
          worst_total,
          fd_gradient_error(
              [&](const EmbeddingBatch& a, const EmbeddingBatch& b) {
                return total_loss(weights, truncated, a, b).value;
              }, z1, z2, r.grad1, r.grad2));
    }
    {
      const LossReport r = simclr_regularizer(weights.tau, z1, z2);
      worst_simclr = std::max(
          worst_simclr,
          fd_gradient_error(
              [&weights](const EmbeddingBatch& a, const EmbeddingBatch& b) {
                return simclr_regularizer(weights.tau, a, b).value;
              }, z1, z2, r.grad1, r.grad2));
    }
    {
      const LossReport r = auh_regularizer(weights.t_scale, z1, z2);
      worst_auh = std::max(
          worst_auh,
          fd_gradient_error(
              [&weights](const EmbeddingBatch& a, const EmbeddingBatch& b) {
                return auh_regularizer(weights.t_scale, a, b).value;
              }, z1, z2, r.grad1, r.grad2));
    }
    {
      // Skip batches with a per-coordinate std within 1e-3 of the hinge
      // threshold; the variance term is non-differentiable there.
      bool near_kink = false;
      for (const EmbeddingBatch* z : {&z1, &z2}) {
        const Eigen::RowVectorXd mean = z->colwise().mean();
        const EmbeddingBatch centered = z->rowwise() - mean;
        for (Eigen::Index j = 0; j < q; ++j) {
          const double var = centered.col(j).squaredNorm() / (n - 1);
          if (std::abs(weights.gamma - std::sqrt(var + weights.epsilon)) < 1e-3) {
            near_kink = true;
          }
        }
      }
      if (!near_kink) {
        const LossReport r = vicreg_regularizer(weights, z1, z2);
        worst_vicreg = std::max(
            worst_vicreg,
            fd_gradient_error(
                [&weights](const EmbeddingBatch& a, const EmbeddingBatch& b) {
                  return vicreg_regularizer(weights, a, b).value;
                }, z1, z2, r.grad1, r.grad2));
      }
    }
  }
  suite.checks.push_back(bounded_check("gradient-alignment", worst_align, 1e-5));
  suite.checks.push_back(bounded_check("gradient-uniformity-truncated", worst_unif, 1e-5));
  suite.checks.push_back(bounded_check("gradient-uniformity-rbf", worst_unif_rbf, 1e-5));
  suite.checks.push_back(bounded_check("gradient-total", worst_total, 1e-5));
  suite.checks.push_back(bounded_check("gradient-simclr", worst_simclr, 1e-5));
  suite.checks.push_back(bounded_check("gradient-auh", worst_auh, 1e-5));
  suite.checks.push_back(bounded_check("gradient-vicreg", worst_vicreg, 1e-5));
  return suite;
}

SuiteResult suite_collapse(std::uint64_t seed) {
  SuiteResult suite{"collapse", {}};
  for (int q : {4, 8, 16}) {
    const int n = 2 * q;
    TwoViewBatch data = generate_two_view_data(
        q, n, 4, 0.3, rng::mix(seed, 6000 + static_cast<std::uint64_t>(q)));

    OptimConfig config;
    config.loss = LossKind::Sfrik;
    config.weights.lambda = 0.0;
    config.weights.mu = 1.0;
    config.kernel = KernelSpec::truncated(q, {{1, 1.0}, {2, 1.0}});
    config.steps = 2000;
    config.eval_every = 50;
    config.seed = rng::mix(seed, 6100 + static_cast<std::uint64_t>(q));
    const Trajectory traj = minimize(config, data);

    const TrajectoryRecord& first = traj.records.front();
    const TrajectoryRecord& last = traj.records.back();
    const std::string tag = "-q" + std::to_string(q);
    suite.checks.push_back(bounded_check("moment-mean-norm" + tag, last.mean_norm, 0.05));
    suite.checks.push_back(
        bounded_check("moment-autocorr-dev" + tag, last.autocorr_dev, 0.05));
    suite.checks.push_back(
        bounded_check("mmd-decrease" + tag, last.mc_mmd, 0.1 * first.mc_mmd));

    // Descent of the uniformity objective between consecutive checkpoints.
    double worst_increase = 0.0;
    for (std::size_t i = 1; i < traj.records.size(); ++i) {
      worst_increase =
          std::max(worst_increase, traj.records[i].total - traj.records[i - 1].total);
    }
    suite.checks.push_back(bounded_check("descent" + tag, worst_increase, 1e-9));
  }

  // Order-1 ablation: with b_1 = 0 the regularizer applies no mean-centering
  // force. Antipodal pairs are interleaved so the column sums cancel exactly,
  // and the order-2 flow preserves the antipodal symmetry bit-for-bit, so the
  // mean norm stays at its initial value.
  {
    const int q = 4, n = 2 * q;
    const SampleSet half = sample_uniform_sphere(q, q, rng::mix(seed, 6200));
    TwoViewBatch data;
    data.z1.resize(n, q);
    for (int i = 0; i < q; ++i) {
      data.z1.row(2 * i) = half.points.row(i);
      data.z1.row(2 * i + 1) = -half.points.row(i);
    }
    data.z2 = data.z1;

    OptimConfig config;
    config.loss = LossKind::Sfrik;
    config.weights.lambda = 0.0;
    config.weights.mu = 1.0;
    config.kernel = KernelSpec::truncated(q, {{2, 1.0}});
    config.steps = 2000;
    config.eval_every = 100;
    config.seed = rng::mix(seed, 6300);
    const Trajectory traj = minimize(config, data);

    const double initial = traj.records.front().mean_norm;
    const double final_norm = traj.records.back().mean_norm;
    CheckResult ablation;
    ablation.name = "ablation-order1-mean-preserved";
    ablation.measured = final_norm;
    ablation.tolerance = 0.5 * initial;
    ablation.passed = final_norm >= 0.5 * initial ||
                      (final_norm < 1e-12 && initial < 1e-12);
    suite.checks.push_back(ablation);
  }
  return suite;
}

SuiteResult suite_determinism(std::uint64_t seed) {
  SuiteResult suite{"determinism", {}};
  const int q = 8, n = 16;
  const TwoViewBatch data = generate_two_view_data(q, n, 4, 0.2, rng::mix(seed, 7000));

  OptimConfig config;
  config.loss = LossKind::Sfrik;
  config.kernel = KernelSpec::truncated(q, {{0, 1.0}, {1, 1.0}, {2, 5.0}});
  config.steps = 200;
  config.eval_every = 50;
  config.seed = rng::mix(seed, 7100);

  std::ostringstream first, second;
  minimize(config, data).write_csv(first);
  minimize(config, data).write_csv(second);

  CheckResult c;
  c.name = "determinism-byte-identical-trajectories";
  c.measured = first.str() == second.str() ? 0.0 : 1.0;
  c.tolerance = 0.0;
  c.passed = c.measured == 0.0;
  suite.checks.push_back(c);
  return suite;
}

SuiteResult suite_scaling(std::uint64_t seed) {
  SuiteResult suite{"scaling", {}};
  const BenchSummary summary = run_standard_bench(
      {1024, 2048, 4096, 8192, 16384}, {64, 128, 256, 512}, 256, 1024, 5, seed);
  suite.checks.push_back(range_check("scaling-sfrik-uniformity-q",
                                     summary.fits.at("sfrik-q").exponent, 0.8, 1.3));
  suite.checks.push_back(range_check("scaling-vicreg-q",
                                     summary.fits.at("vicreg-q").exponent, 1.7, 2.3));
  suite.checks.push_back(range_check("scaling-sfrik-uniformity-batch",
                                     summary.fits.at("sfrik-batch").exponent, 1.7, 2.3));
  return suite;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "legendre",  "orthogonality", "mean-embedding",   "feature-map", "addition",
      "coefficients", "gradients",  "collapse", "determinism", "scaling"};
  return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "legendre") return suite_legendre(seed);
  if (name == "orthogonality") return suite_orthogonality(seed);
  if (name == "mean-embedding") return suite_mean_embedding(seed);
  if (name == "feature-map") return suite_feature_map(seed);
  if (name == "addition") return suite_addition(seed);
  if (name == "coefficients") return suite_coefficients(seed);
  if (name == "gradients") return suite_gradients(seed);
  if (name == "collapse") return suite_collapse(seed);
  if (name == "determinism") return suite_determinism(seed);
  if (name == "scaling") return suite_scaling(seed);
  throw std::invalid_argument("unknown verification suite: " + name);
}

std::vector<SuiteResult> run_all_suites(std::uint64_t seed) {
  std::vector<SuiteResult> results;
  for (const std::string& name : suite_names()) {
    if (name == "scaling") continue;  // minutes of benchmarking; run explicitly
    results.push_back(run_suite(name, seed));
  }
  return results;
}

}  // namespace spherekit
