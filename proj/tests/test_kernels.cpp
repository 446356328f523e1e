#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spherekit/kernels.hpp"
#include "spherekit/sampling.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace spherekit;

TEST_CASE("kernel evaluation") {
  const KernelSpec rbf = KernelSpec::rbf(3, 1.0);
  CHECK(kernel_eval(rbf, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

  const KernelSpec trunc = KernelSpec::truncated(3, {{1, 1.0}, {2, 1.0}});
  CHECK(kernel_eval(trunc, 0.0) == doctest::Approx(-0.5).epsilon(1e-12));

  const KernelSpec gd = KernelSpec::gen_dist(3, 1.5);
  CHECK(gendist_energy_constant(3, 1.5) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(kernel_eval(gd, -1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("expand_coefficients picks out a single Legendre term") {
  auto phi = [](double t) { return legendre_closed_form(5, 2, t); };
  const CoefficientExpansion result = expand_coefficients(phi, 5, 3);
  CHECK(result.converged);
  CHECK(std::abs(result.coefficients[0]) <= 1e-9);
  CHECK(std::abs(result.coefficients[1]) <= 1e-9);
  CHECK(result.coefficients[2] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(result.coefficients[3]) <= 1e-9);
}

TEST_CASE("RBF coefficients positive, decaying, within the bound") {
  const KernelSpec rbf = KernelSpec::rbf(3, 1.0, 20);
  for (int l = 0; l <= 20; ++l) {
    CHECK(rbf.coefficient(l) > 0.0);
    CHECK(rbf.coefficient(l) <= rbf_coefficient_bound(3, 1.0, l) * (1.0 + 1e-9));
    if (l >= 2) CHECK(rbf.coefficient(l) < rbf.coefficient(l - 1));
  }

  // Quadrature route agrees where it can resolve the coefficients.
  auto phi = [](double t) { return std::exp(-2.0 * (1.0 - t)); };
  const CoefficientExpansion quad = expand_coefficients(phi, 3, 10);
  for (int l = 0; l <= 10; ++l) {
    CHECK(quad.coefficients[static_cast<std::size_t>(l)] ==
          doctest::Approx(rbf.coefficient(l)).epsilon(1e-9));
  }
}

TEST_CASE("RBF bound values and decay") {
  CHECK(rbf_coefficient_bound(3, 1.0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  for (int q : {3, 8}) {
    const KernelSpec rbf = KernelSpec::rbf(q, 1.0, 10);
    for (int l = 0; l <= 10; ++l) {
      CHECK(rbf.coefficient(l) <= rbf_coefficient_bound(q, 1.0, l) * (1.0 + 1e-9));
    }
  }
  for (int l = 12; l <= 20; ++l) {
    CHECK(rbf_coefficient_bound(3, 1.0, l) < rbf_coefficient_bound(3, 1.0, l - 1));
  }
}

TEST_CASE("generalized distance coefficients") {
  const std::vector<double> coeffs = gendist_coefficients(3, 1.5, 50);
  CHECK(coeffs[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  for (int l = 0; l <= 20; ++l) CHECK(coeffs[static_cast<std::size_t>(l)] >= 0.0);

  // alpha_l l^{2s} approaches the tail constant.
  const double n50 = std::exp(log_harmonic_space_dim(3, 50));
  const double alpha_50 = coeffs[50] / n50;
  const double c = gendist_tail_constant(3, 1.5);
  CHECK(alpha_50 * std::pow(50.0, 2.0 * 1.5) == doctest::Approx(c).epsilon(0.05));

  // The (1-t)^{1/2} endpoint singularity slows quadrature convergence; the
  // default node count only reaches ~1e-7 here.
  const CoefficientExpansion quad = [] {
    const KernelSpec gd = KernelSpec::gen_dist(3, 1.5, 10);
    return expand_coefficients([&gd](double t) { return kernel_eval(gd, t); }, 3, 10,
                               4000);
  }();
  const std::vector<double> closed = gendist_coefficients(3, 1.5, 10);
  for (int l = 0; l <= 10; ++l) {
    CHECK(std::abs(quad.coefficients[static_cast<std::size_t>(l)] -
                   closed[static_cast<std::size_t>(l)]) <= 1e-8);
  }
}

TEST_CASE("centering") {
  KernelSpec spec = KernelSpec::truncated(4, {{0, 2.0}, {1, 1.0}});
  spec = center_kernel(spec);
  CHECK(spec.centered);
  CHECK(spec.coefficient(0) == 0.0);
  CHECK(spec.coefficient(1) == 1.0);
  CHECK(spec.b0_removed == 2.0);

  const KernelSpec twice = center_kernel(spec);
  CHECK(twice.coefficient(0) == 0.0);
  CHECK(twice.b0_removed == 2.0);

  // Centered kernel has zero mean against the uniform distribution.
  const KernelSpec rbf = center_kernel(KernelSpec::rbf(5, 1.0));
  Eigen::VectorXd v = Eigen::VectorXd::Unit(5, 0);
  const McEstimate mc = uniform_mean_embedding_mc(rbf, v, 100000, 7);
  CHECK(std::abs(mc.estimate) <= 3.0 * mc.std_error);
}

TEST_CASE("universality classification") {
  const KernelSpec trunc = KernelSpec::truncated(8192, {{1, 1.0}, {2, 40.0}, {3, 40.0}});
  CHECK(is_universal(trunc, 20) == Universality::NotUniversal);
  CHECK(is_universal(KernelSpec::rbf(3, 1.0), 20) == Universality::UniversalUpToProbe);
  CHECK(is_universal(KernelSpec::gen_dist(5, 2.2), 20) ==
        Universality::UniversalUpToProbe);
}

TEST_CASE("kernel reconstruction from coefficients") {
  // RBF: geometric coefficient decay, order 40 is far past machine precision.
  for (int q : {3, 8}) {
    const KernelSpec rbf = KernelSpec::rbf(q, 1.0, 40);
    const LegendreTable table(q, 40);
    double worst = 0.0, worst_l10 = 0.0, worst_l25 = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = -1.0 + i * 2e-3;
      const Eigen::VectorXd p = table.evaluate_point(t);
      const double target = std::exp(-2.0 * (1.0 - t));
      double partial10 = 0.0, partial25 = 0.0, full = 0.0;
      for (int l = 0; l <= 40; ++l) {
        const double term = rbf.coefficient(l) * p(l);
        full += term;
        if (l <= 10) partial10 += term;
        if (l <= 25) partial25 += term;
      }
      worst = std::max(worst, std::abs(full - target));
      worst_l10 = std::max(worst_l10, std::abs(partial10 - target));
      worst_l25 = std::max(worst_l25, std::abs(partial25 - target));
    }
    CHECK(worst <= 1e-4);
    CHECK(worst_l25 <= worst_l10);  // error decreases with truncation order
  }

  // Generalized distance: coefficients decay only polynomially (alpha_l ~
  // l^{-2s}), so reconstruction to 1e-4 needs a deep truncation and the
  // singular endpoint t = 1 converges slowest; it is excluded here.
  const int q = 3, order = 2000;
  const KernelSpec gd = KernelSpec::gen_dist(q, 1.5, order);
  const LegendreTable table(q, order);
  double worst = 0.0;
  for (int i = 0; i <= 990; ++i) {
    const double t = -1.0 + i * 2e-3;
    const Eigen::VectorXd p = table.evaluate_point(t);
    double full = 0.0;
    for (int l = 0; l <= order; ++l) full += gd.coefficient(l) * p(l);
    worst = std::max(worst, std::abs(full - kernel_eval(gd, t)));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("Gram matrices are positive semidefinite") {
  const int q = 8, n = 64;
  const SampleSet sample = sample_uniform_sphere(q, n, 11);
  std::vector<KernelSpec> kernels = {
      KernelSpec::truncated(q, {{0, 1.0}, {1, 1.0}, {2, 40.0}, {3, 40.0}}),
      KernelSpec::rbf(q, 1.0), KernelSpec::gen_dist(q, 4.0)};
  for (const KernelSpec& spec : kernels) {
    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        gram(i, j) = kernel_eval(spec, sample.points.row(i).dot(sample.points.row(j)));
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    CHECK(solver.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("expand after eval is the identity on truncated specs") {
  const KernelSpec spec = KernelSpec::truncated(6, {{0, 0.5}, {1, 2.0}, {3, 1.25}});
  const CoefficientExpansion result = expand_coefficients(
      [&spec](double t) { return kernel_eval(spec, t); }, 6, 5);
  for (int l = 0; l <= 5; ++l) {
    CHECK(std::abs(result.coefficients[static_cast<std::size_t>(l)] -
                   spec.coefficient(l)) <= 1e-9);
  }
}

TEST_CASE("JSON round trip") {
  KernelSpec spec = center_kernel(KernelSpec::truncated(8, {{0, 1.0}, {2, 3.5}}));
  const KernelSpec back = KernelSpec::from_json(spec.to_json());
  CHECK(back.q == spec.q);
  CHECK(back.family == spec.family);
  CHECK(back.centered == spec.centered);
  CHECK(back.coefficient(2) == spec.coefficient(2));

  const KernelSpec rbf = KernelSpec::rbf(5, 2.0);
  const KernelSpec rbf_back = KernelSpec::from_json(rbf.to_json());
  CHECK(rbf_back.sigma == rbf.sigma);
  CHECK(rbf_back.coefficient(3) == doctest::Approx(rbf.coefficient(3)).epsilon(1e-12));
}

TEST_CASE("input validation") {
  CHECK_THROWS(KernelSpec::truncated(3, {{1, -1.0}}));
  CHECK_THROWS(KernelSpec::rbf(3, 0.0));
  CHECK_THROWS(KernelSpec::gen_dist(3, 0.9));   // below (q-1)/2
  CHECK_THROWS(KernelSpec::gen_dist(3, 2.1));   // above (q+1)/2
  CHECK_THROWS(kernel_eval_derivative(KernelSpec::gen_dist(3, 1.5), 1.0));
}
