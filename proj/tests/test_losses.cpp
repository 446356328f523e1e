#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spherekit/losses.hpp"
#include "spherekit/sampling.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace spherekit;

namespace {

Eigen::MatrixXd random_rotation(int q, std::uint64_t seed) {
  Eigen::MatrixXd g(q, q);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      g(i, j) = rng::gaussian(seed, static_cast<std::uint64_t>(i) * q + j);
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd rot = qr.householderQ();
  if (rot.determinant() < 0.0) rot.col(0) *= -1.0;
  return rot;
}

}  // namespace

TEST_CASE("alignment loss") {
  const SampleSet sample = sample_uniform_sphere(6, 8, 3);
  const LossReport same = alignment_loss(sample.points, sample.points);
  CHECK(same.value == 0.0);
  CHECK(same.grad_norm == 0.0);

  Eigen::MatrixXd a(1, 3), b(1, 3);
  a.row(0) = Eigen::RowVector3d(1, 0, 0);
  b.row(0) = -a.row(0);
  CHECK(alignment_loss(a, b).value == doctest::Approx(4.0).epsilon(1e-12));
  b.row(0) = Eigen::RowVector3d(0, 1, 0);
  CHECK(alignment_loss(a, b).value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("uniformity loss closed-form values") {
  const KernelSpec l3 =
      center_kernel(KernelSpec::truncated(5, {{1, 1.0}, {2, 1.0}, {3, 1.0}}));
  Eigen::MatrixXd one(1, 5);
  one.row(0) = Eigen::RowVectorXd::Unit(5, 0);
  CHECK(uniformity_loss(l3, one).value == doctest::Approx(3.0).epsilon(1e-12));

  // Antipodal pair: odd orders cancel, leaving b_2.
  const KernelSpec l2 =
      center_kernel(KernelSpec::truncated(4, {{1, 3.0}, {2, 7.0}}));
  Eigen::MatrixXd pair(2, 4);
  pair.row(0) = Eigen::RowVectorXd::Unit(4, 1);
  pair.row(1) = -pair.row(0);
  CHECK(uniformity_loss(l2, pair).value == doctest::Approx(7.0).epsilon(1e-12));

  const KernelSpec q3 =
      center_kernel(KernelSpec::truncated(3, {{1, 1.0}, {2, 1.0}}));
  Eigen::MatrixXd ortho(2, 3);
  ortho.row(0) = Eigen::RowVector3d(1, 0, 0);
  ortho.row(1) = Eigen::RowVector3d(0, 1, 0);
  CHECK(uniformity_loss(q3, ortho).value == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("uniformity loss requires centering and stays nonnegative") {
  const KernelSpec uncentered = KernelSpec::truncated(4, {{0, 1.0}, {1, 1.0}});
  const SampleSet sample = sample_uniform_sphere(4, 16, 9);
  CHECK_THROWS(uniformity_loss(uncentered, sample.points));

  const KernelSpec centered = center_kernel(uncentered);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const SampleSet batch = sample_uniform_sphere(4, 12, 100 + seed);
    CHECK(uniformity_loss(centered, batch.points).value >= -1e-14);
  }
}

TEST_CASE("cubic fast path agrees with the generic recurrence path") {
  const KernelSpec spec = center_kernel(
      KernelSpec::truncated(6, {{1, 1.0}, {2, 2.5}, {3, 0.75}}));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SampleSet batch = sample_uniform_sphere(6, 20, 200 + seed);
    const LossReport fast = uniformity_loss(spec, batch.points);
    const LossReport generic = uniformity_loss(spec, batch.points, true);
    CHECK(std::abs(fast.value - generic.value) <= 1e-12);
    CHECK((fast.grad1 - generic.grad1).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("total loss") {
  const KernelSpec spec =
      center_kernel(KernelSpec::truncated(4, {{1, 1.0}, {2, 1.0}}));
  LossWeights weights;
  weights.lambda = 1.0;
  weights.mu = 0.5;
  Eigen::MatrixXd one(1, 4);
  one.row(0) = Eigen::RowVectorXd::Unit(4, 0);
  CHECK(total_loss(weights, spec, one, one).value ==
        doctest::Approx(2.0).epsilon(1e-12));

  // With lambda = 0 only the regularizer remains.
  const SampleSet s1 = sample_uniform_sphere(4, 10, 4);
  const SampleSet s2 = sample_uniform_sphere(4, 10, 5);
  weights.lambda = 0.0;
  const double expected = 0.5 * (uniformity_loss(spec, s1.points).value +
                                 uniformity_loss(spec, s2.points).value);
  CHECK(total_loss(weights, spec, s1.points, s2.points).value ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("SimCLR closed-form values") {
  Eigen::MatrixXd a(1, 3), b(1, 3);
  a.row(0) = Eigen::RowVector3d(1, 0, 0);
  b = a;
  const double tau = 0.15;
  CHECK(simclr_regularizer(tau, a, b).value ==
        doctest::Approx(1.0 / tau).epsilon(1e-12));

  // Four mutually orthogonal embeddings: every log term is log 3.
  Eigen::MatrixXd z1(2, 4), z2(2, 4);
  z1.row(0) = Eigen::RowVectorXd::Unit(4, 0);
  z1.row(1) = Eigen::RowVectorXd::Unit(4, 1);
  z2.row(0) = Eigen::RowVectorXd::Unit(4, 2);
  z2.row(1) = Eigen::RowVectorXd::Unit(4, 3);
  CHECK(simclr_regularizer(tau, z1, z2).value ==
        doctest::Approx(std::log(3.0)).epsilon(1e-12));

  CHECK_THROWS(simclr_regularizer(0.0, a, b));
}

TEST_CASE("AUH closed-form values") {
  Eigen::MatrixXd one(1, 3);
  one.row(0) = Eigen::RowVector3d(0, 0, 1);
  CHECK(auh_regularizer(2.5, one, one).value == doctest::Approx(0.0).epsilon(1e-15));

  Eigen::MatrixXd z(2, 3);
  z.row(0) = Eigen::RowVector3d(0, 1, 0);
  z.row(1) = z.row(0);
  CHECK(auh_regularizer(2.5, z, z).value ==
        doctest::Approx(std::log(4.0) / 4.0).epsilon(1e-12));
}

TEST_CASE("AUH matches the plain RBF double sum") {
  // exp(-t ||u - v||^2) on unit vectors is the RBF kernel with sigma = t, so
  // each view term is log of the RBF Gram sum over all n^2 pairs.
  const int q = 5, n = 9;
  const double t_scale = 2.5;
  const KernelSpec rbf = KernelSpec::rbf(q, t_scale);
  const SampleSet s1 = sample_uniform_sphere(q, n, 21);
  const SampleSet s2 = sample_uniform_sphere(q, n, 22);
  double expected = 0.0;
  for (const Eigen::MatrixXd& z : {s1.points, s2.points}) {
    double gram_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        gram_sum += kernel_eval(rbf, z.row(i).dot(z.row(j)));
      }
    }
    expected += std::log(gram_sum) / (2.0 * n * n);
  }
  CHECK(auh_regularizer(t_scale, s1.points, s2.points).value ==
        doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("VICReg closed-form values") {
  LossWeights weights;
  weights.mu = 0.5;
  weights.nu = 1.0;
  weights.gamma = 1.0;
  weights.epsilon = 1e-4;

  // Identical rows: zero variance, hinge active at gamma - sqrt(epsilon).
  Eigen::MatrixXd collapsed(3, 4);
  for (int i = 0; i < 3; ++i) collapsed.row(i) = Eigen::RowVectorXd::Unit(4, 0);
  const LossReport c = vicreg_regularizer(weights, collapsed, collapsed);
  CHECK(c.terms.at("variance_1") == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(c.terms.at("covariance_1") == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(c.value == doctest::Approx(0.99).epsilon(1e-12));

  // Sign pattern with per-coordinate variance above the threshold and
  // uncorrelated coordinates: both terms vanish.
  Eigen::MatrixXd spread(4, 2);
  spread << 1, 1, 1, -1, -1, 1, -1, -1;
  const LossReport s = vicreg_regularizer(weights, spread, spread);
  CHECK(s.value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(s.grad_norm == doctest::Approx(0.0).epsilon(1e-15));

  Eigen::MatrixXd one(1, 2);
  one.row(0) = Eigen::RowVector2d(1, 0);
  CHECK_THROWS(vicreg_regularizer(weights, one, one));
}

TEST_CASE("rotation invariance") {
  const int q = 6, n = 12;
  const Eigen::MatrixXd rot = random_rotation(q, 77);
  const SampleSet s1 = sample_uniform_sphere(q, n, 31);
  const SampleSet s2 = sample_uniform_sphere(q, n, 32);
  const Eigen::MatrixXd r1 = s1.points * rot.transpose();
  const Eigen::MatrixXd r2 = s2.points * rot.transpose();

  CHECK(alignment_loss(r1, r2).value ==
        doctest::Approx(alignment_loss(s1.points, s2.points).value).epsilon(1e-10));
  const KernelSpec spec = center_kernel(KernelSpec::rbf(q, 1.0));
  CHECK(uniformity_loss(spec, r1).value ==
        doctest::Approx(uniformity_loss(spec, s1.points).value).epsilon(1e-10));
  CHECK(simclr_regularizer(0.15, r1, r2).value ==
        doctest::Approx(simclr_regularizer(0.15, s1.points, s2.points).value)
            .epsilon(1e-10));
  CHECK(auh_regularizer(2.5, r1, r2).value ==
        doctest::Approx(auh_regularizer(2.5, s1.points, s2.points).value)
            .epsilon(1e-10));
}
