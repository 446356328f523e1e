#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spherekit/sampling.hpp"
#include "spherekit/sphere_math.hpp"

#include <cmath>
#include <numbers>

using namespace spherekit;

TEST_CASE("closed form known values") {
  CHECK(legendre_closed_form(8192, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(legendre_closed_form(3, 2, 0.5) == doctest::Approx(-0.125).epsilon(1e-12));
  CHECK(legendre_closed_form(17, 5, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("closed form matches the low-order explicit polynomials") {
  for (int q : {3, 4, 7, 16}) {
    for (double t : {-0.9, -0.3, 0.0, 0.25, 0.8, 1.0}) {
      CHECK(legendre_closed_form(q, 1, t) == doctest::Approx(t).epsilon(1e-12));
      CHECK(legendre_closed_form(q, 2, t) ==
            doctest::Approx((q * t * t - 1.0) / (q - 1)).epsilon(1e-12));
      CHECK(legendre_closed_form(q, 3, t) ==
            doctest::Approx(((q + 2) * t * t * t - 3.0 * t) / (q - 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("recurrence table") {
  LegendreTable t3(3, 2);
  const Eigen::VectorXd at_zero = t3.evaluate_point(0.0);
  CHECK(at_zero(0) == doctest::Approx(1.0));
  CHECK(at_zero(1) == doctest::Approx(0.0));
  CHECK(at_zero(2) == doctest::Approx(-0.5));

  LegendreTable t5(5, 10);
  const Eigen::VectorXd at_one = t5.evaluate_point(1.0);
  for (int l = 0; l <= 10; ++l) CHECK(at_one(l) == doctest::Approx(1.0).epsilon(1e-12));

  LegendreTable t4(4, 3);
  CHECK(t4.evaluate_point(0.2)(3) ==
        doctest::Approx(legendre_closed_form(4, 3, 0.2)).epsilon(1e-12));
}

TEST_CASE("recurrence vs closed form and boundedness on a grid") {
  for (int q : {3, 8, 24, 64}) {
    LegendreTable table(q, 30);
    for (int i = 0; i <= 1000; ++i) {
      const double t = -1.0 + i * 2e-3;
      const Eigen::VectorXd p = table.evaluate_point(t);
      for (int l = 0; l <= 30; ++l) {
        CHECK(std::abs(p(l)) <= 1.0 + 1e-12);
        const double closed = legendre_closed_form(q, l, t);
        CHECK(std::abs(p(l) - closed) <= 1e-10 * std::max(1.0, std::abs(closed)));
      }
    }
  }
}

TEST_CASE("endpoint values") {
  for (int q : {3, 5, 12}) {
    for (int l = 0; l <= 20; ++l) {
      CHECK(legendre_closed_form(q, l, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(legendre_closed_form(q, l, -1.0) ==
            doctest::Approx(l % 2 == 0 ? 1.0 : -1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("derivative") {
  CHECK(legendre_derivative(9, 1, 0.7) == doctest::Approx(1.0));
  CHECK(legendre_derivative(3, 2, 0.5) == doctest::Approx(1.5));

  const double h = 1e-6;
  const double fd = (legendre_closed_form(6, 3, 0.1 + h) -
                     legendre_closed_form(6, 3, 0.1 - h)) / (2.0 * h);
  CHECK(legendre_derivative(6, 3, 0.1) == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("harmonic space dimensions") {
  CHECK(harmonic_space_dim(8192, 1) == 8192);
  CHECK(harmonic_space_dim(3, 2) == 5);
  CHECK(harmonic_space_dim(4, 2) == 9);
  CHECK(harmonic_space_dim(5, 0) == 1);
  for (int q : {3, 4, 8}) {
    CHECK(harmonic_space_dim(q, 2) == (q - 1) * (q + 2) / 2);
  }
}

TEST_CASE("surface areas") {
  CHECK(sphere_surface_area(3) == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-12));
  CHECK(sphere_surface_area(2) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("surface area Monte-Carlo cross-check") {
  // |S^{q-1}| = q V_q; estimate V_q by the fraction of the cube inside the ball.
  const int q = 10, n = 8000000;
  std::int64_t hits = 0;
  for (int i = 0; i < n; ++i) {
    double r2 = 0.0;
    for (int j = 0; j < q; ++j) {
      const double x =
          2.0 * rng::uniform01(42, static_cast<std::uint64_t>(i) * q + j) - 1.0;
      r2 += x * x;
    }
    if (r2 <= 1.0) ++hits;
  }
  const double volume = std::pow(2.0, q) * static_cast<double>(hits) / n;
  CHECK(q * volume == doctest::Approx(sphere_surface_area(q)).epsilon(0.01));
}

TEST_CASE("legendre weight norms") {
  CHECK(legendre_weight_norm(3, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(legendre_weight_norm(3, 2) == doctest::Approx(0.4).epsilon(1e-12));

  const QuadratureRule rule = gauss_jacobi_sphere(5, 200);
  double integral = 0.0;
  for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
    const double p = legendre_closed_form(5, 1, rule.nodes(k));
    integral += rule.weights(k) * p * p;
  }
  CHECK(integral == doctest::Approx(legendre_weight_norm(5, 1)).epsilon(1e-9));
}

TEST_CASE("quadrature reproduces the Gauss-Legendre special case") {
  // q = 3 gives unit weight; the 3-node rule is the classical one.
  const QuadratureRule rule = gauss_jacobi_sphere(3, 3);
  CHECK(rule.nodes(0) == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-12));
  CHECK(rule.nodes(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rule.nodes(2) == doctest::Approx(std::sqrt(0.6)).epsilon(1e-12));
  CHECK(rule.weights(0) == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
  CHECK(rule.weights(1) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  CHECK(rule.weights(2) == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("quadrature integrates polynomials exactly") {
  for (int q : {3, 6, 11}) {
    const QuadratureRule rule = gauss_jacobi_sphere(q, 40);
    // Orthogonality of P_0 against P_2 and the total mass.
    double mass = 0.0, p2 = 0.0;
    for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
      mass += rule.weights(k);
      p2 += rule.weights(k) * legendre_closed_form(q, 2, rule.nodes(k));
    }
    CHECK(mass == doctest::Approx(surface_area_ratio(q)).epsilon(1e-12));
    CHECK(p2 == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("clamp behavior") {
  CHECK(clamp_dot(1.0 + 5e-13) == 1.0);
  CHECK(clamp_dot(-1.0 - 5e-13) == -1.0);
  CHECK_THROWS_AS(clamp_dot(1.1), std::domain_error);
  CHECK_THROWS_AS(legendre_closed_form(2, 1, 0.0), std::domain_error);
}
