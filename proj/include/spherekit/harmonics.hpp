#pragma once

#include "spherekit/sphere_math.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace spherekit {

// Integral of u_1^{e_1} ... u_q^{e_q} over S^{q-1} (unnormalized surface
// measure): zero if any exponent is odd, otherwise
// 2 prod_j Gamma((e_j+1)/2) / Gamma((sum_j (e_j+1)) / 2).
double monomial_sphere_integral(const std::vector<int>& exponents);

// Polynomial on the sphere as a sparse sum of monomials; exponents stored as
// (coordinate, power) pairs. Exact integration via monomial_sphere_integral.
struct SpherePolynomial {
  struct Term {
    double coeff;
    std::vector<std::pair<int, int>> powers;  // sorted by coordinate
  };
  std::vector<Term> terms;

  double evaluate(const Eigen::VectorXd& u) const;
};

// Exact sphere inner product <p, r> (both polynomials in dimension q).
double sphere_inner_product(const SpherePolynomial& p, const SpherePolynomial& r, int q);

// Orthonormalized spherical harmonics of orders 1 and 2 for a truncated L=2
// kernel with weights b1, b2. The raw order-2 basis ordering is fixed: cross
// terms u_j u_j' (j < j') lexicographically, then squares u_j^2 - 1/q for
// j = 2..q. M1, M2 are lower triangular with positive diagonal; the ordering
// must not change, triangularity depends on it.
class HarmonicBasis {
 public:
  int q() const { return q_; }
  double b1() const { return b1_; }
  double b2() const { return b2_; }
  double a1() const { return a1_; }  // a_l = b_l |S^{q-1}| / N(q, l)
  double a2() const { return a2_; }
  const Eigen::MatrixXd& m1() const { return m1_; }
  const Eigen::MatrixXd& m2() const { return m2_; }
  const std::vector<SpherePolynomial>& raw_order2_basis() const { return raw2_; }

  Eigen::VectorXd raw_order1(const Eigen::VectorXd& z) const;  // = z
  Eigen::VectorXd raw_order2(const Eigen::VectorXd& z) const;

  // Orthonormalized harmonics M_l * raw_l, without kernel weighting.
  Eigen::VectorXd orthonormal_order1(const Eigen::VectorXd& z) const;
  Eigen::VectorXd orthonormal_order2(const Eigen::VectorXd& z) const;

  // Feature map Phi(z): concatenation of sqrt(a1) M1 raw1 and sqrt(a2) M2 raw2,
  // so that Phi(u) . Phi(v) = b1 P_1(q; u.v) + b2 P_2(q; u.v).
  Eigen::VectorXd feature_map(const Eigen::VectorXd& z) const;

  // Squared-MMD-to-uniform through explicit moments:
  // a1 ||M1 mean(raw1)||^2 + a2 ||M2 mean(raw2)||^2. Rows of Z are unit
  // vectors; equals the biased Gram estimator for the centered L=2 kernel.
  double mmd_via_moments(const Eigen::MatrixXd& Z) const;

  // Row-major CSV with 17 significant digits.
  void export_m1_csv(std::ostream& out) const;
  void export_m2_csv(std::ostream& out) const;

  friend HarmonicBasis build_basis(int q, double b1, double b2);

 private:
  int q_ = 0;
  double b1_ = 0.0, b2_ = 0.0;
  double a1_ = 0.0, a2_ = 0.0;
  Eigen::MatrixXd m1_, m2_;
  std::vector<SpherePolynomial> raw2_;
};

// Gram-Schmidt via Cholesky of the exact Gram matrix (monomial integrals),
// so M_l is reproducible bit-for-bit given the fixed ordering.
HarmonicBasis build_basis(int q, double b1, double b2);

struct MomentStats {
  double mean_norm;           // ||mean(Z)||_2
  double autocorr_deviation;  // ||Z^T Z / n - I/q||_F
};
MomentStats embedding_moment_stats(const Eigen::MatrixXd& Z);

}  // namespace spherekit
