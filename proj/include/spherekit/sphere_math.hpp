#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace spherekit {

// Clamps t to [-1, 1] when it is within 1e-12 of the boundary (inner products
// of unit vectors drift past +-1 in floating point). Throws std::domain_error
// for anything further out.
double clamp_dot(double t);

// Legendre (Gegenbauer) polynomial P_l(q; t), normalized so that P_l(q; 1) = 1,
// evaluated by the explicit finite sum. q >= 3, l >= 0, |t| <= 1.
double legendre_closed_form(int q, int l, double t);

// d/dt P_l(q; t), via the identity P_l'(q; t) = l (l + q - 2) / (q - 1) *
// P_{l-1}(q + 2; t).
double legendre_derivative(int q, int l, double t);

// Dimension N(q, l) of the space of spherical harmonics of order l in
// dimension q. Computed in log-Gamma space and rounded.
std::int64_t harmonic_space_dim(int q, int l);
double log_harmonic_space_dim(int q, int l);

// Surface area |S^{q-1}| = 2 pi^{q/2} / Gamma(q/2), q >= 2.
double sphere_surface_area(int q);
double log_sphere_surface_area(int q);

// |S^{q-1}| / |S^{q-2}| = sqrt(pi) Gamma((q-1)/2) / Gamma(q/2).
double surface_area_ratio(int q);

// Integral of P_l(q; t)^2 (1 - t^2)^{(q-3)/2} over [-1, 1], which equals
// (|S^{q-1}| / |S^{q-2}|) / N(q, l).
double legendre_weight_norm(int q, int l);

// Precomputed three-term recurrence for P_l(q; .), l = 0..max_order:
//   (l + q - 2) P_{l+1} = (2l + q - 2) t P_l - l P_{l-1}.
// Immutable after construction.
class LegendreTable {
 public:
  LegendreTable(int q, int max_order);

  int q() const { return q_; }
  int max_order() const { return max_order_; }

  // Column j holds P_0..P_max_order at t_values[j]. Inputs are clamped via
  // clamp_dot.
  Eigen::MatrixXd evaluate(const std::vector<double>& t_values) const;

  // All orders at a single point.
  Eigen::VectorXd evaluate_point(double t) const;

 private:
  int q_;
  int max_order_;
  std::vector<double> a_;  // a_l = (2l + q - 2) / (l + q - 2)
  std::vector<double> c_;  // c_l = l / (l + q - 2)
};

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// Gauss-Jacobi rule on [-1, 1] for the weight (1 - t^2)^{(q-3)/2}, built via
// Golub-Welsch. Exact for polynomials of degree <= 2 * num_nodes - 1.
QuadratureRule gauss_jacobi_sphere(int q, int num_nodes);

// Default node count used when callers pass 0: max(200, 4L + 20).
int default_quadrature_nodes(int max_order);

}  // namespace spherekit
