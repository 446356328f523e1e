#include "spherekit/harmonics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace spherekit {

double monomial_sphere_integral(const std::vector<int>& exponents) {
  int sum = 0;
  for (int e : exponents) {
    if (e < 0) throw std::domain_error("monomial exponents must be >= 0");
    if (e % 2 == 1) return 0.0;  // odd symmetry
    sum += e;
  }
  const int q = static_cast<int>(exponents.size());
  double log_num = std::log(2.0);
  for (int e : exponents) log_num += std::lgamma(0.5 * (e + 1));
  return std::exp(log_num - std::lgamma(0.5 * (sum + q)));
}

double SpherePolynomial::evaluate(const Eigen::VectorXd& u) const {
  double value = 0.0;
  for (const Term& term : terms) {
    double m = term.coeff;
    for (const auto& [j, p] : term.powers) {
      for (int k = 0; k < p; ++k) m *= u(j);
    }
    value += m;
  }
  return value;
}

double sphere_inner_product(const SpherePolynomial& p, const SpherePolynomial& r, int q) {
  double value = 0.0;
  std::vector<int> exps(static_cast<std::size_t>(q));
  for (const auto& tp : p.terms) {
    for (const auto& tr : r.terms) {
      std::fill(exps.begin(), exps.end(), 0);
      for (const auto& [j, pw] : tp.powers) exps[static_cast<std::size_t>(j)] += pw;
      for (const auto& [j, pw] : tr.powers) exps[static_cast<std::size_t>(j)] += pw;
      value += tp.coeff * tr.coeff * monomial_sphere_integral(exps);
    }
  }
  return value;
}

namespace {

std::vector<SpherePolynomial> make_raw_order2(int q) {
  std::vector<SpherePolynomial> basis;
  basis.reserve(static_cast<std::size_t>(q * (q - 1) / 2 + q - 1));
  // Cross terms u_j u_j', j < j', lexicographic.
  for (int j = 0; j < q; ++j) {
    for (int jp = j + 1; jp < q; ++jp) {
      SpherePolynomial poly;
      poly.terms.push_back({1.0, {{j, 1}, {jp, 1}}});
      basis.push_back(std::move(poly));
    }
  }
  // Squares u_j^2 - 1/q for j = 2..q (0-based: 1..q-1).
  for (int j = 1; j < q; ++j) {
    SpherePolynomial poly;
    poly.terms.push_back({1.0, {{j, 2}}});
    poly.terms.push_back({-1.0 / q, {}});
    basis.push_back(std::move(poly));
  }
  return basis;
}

}  // namespace

HarmonicBasis build_basis(int q, double b1, double b2) {
  if (q < 3) throw std::domain_error("harmonic basis requires q >= 3");
  if (b1 < 0.0 || b2 < 0.0) throw std::domain_error("kernel weights must be >= 0");

  HarmonicBasis basis;
  basis.q_ = q;
  basis.b1_ = b1;
  basis.b2_ = b2;

  const double area = sphere_surface_area(q);
  const double n1 = static_cast<double>(harmonic_space_dim(q, 1));
  const double n2 = static_cast<double>(harmonic_space_dim(q, 2));
  basis.a1_ = b1 * area / n1;
  basis.a2_ = b2 * area / n2;

  // Order 1: <u_j, u_j'> = delta |S^{q-1}| / q, so M1 is a scaled identity.
  basis.m1_ = std::sqrt(q / area) * Eigen::MatrixXd::Identity(q, q);

  // Order 2: Cholesky of the exact Gram matrix, M2 = L^{-1} (lower triangular,
  // positive diagonal, and M2 G M2^T = I).
  basis.raw2_ = make_raw_order2(q);
  const int n2i = static_cast<int>(basis.raw2_.size());
  Eigen::MatrixXd gram(n2i, n2i);
  for (int i = 0; i < n2i; ++i) {
    for (int j = i; j < n2i; ++j) {
      gram(i, j) = sphere_inner_product(basis.raw2_[static_cast<std::size_t>(i)],
                                        basis.raw2_[static_cast<std::size_t>(j)], q);
      gram(j, i) = gram(i, j);
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("order-2 Gram matrix is not positive definite");
  }
  basis.m2_ = Eigen::MatrixXd(llt.matrixL())
                  .triangularView<Eigen::Lower>()
                  .solve(Eigen::MatrixXd::Identity(n2i, n2i));
  return basis;
}

Eigen::VectorXd HarmonicBasis::raw_order1(const Eigen::VectorXd& z) const { return z; }

Eigen::VectorXd HarmonicBasis::raw_order2(const Eigen::VectorXd& z) const {
  const int q = q_;
  Eigen::VectorXd out(q * (q - 1) / 2 + q - 1);
  int idx = 0;
  for (int j = 0; j < q; ++j) {
    for (int jp = j + 1; jp < q; ++jp) out(idx++) = z(j) * z(jp);
  }
  const double inv_q = 1.0 / q;
  for (int j = 1; j < q; ++j) out(idx++) = z(j) * z(j) - inv_q;
  return out;
}

Eigen::VectorXd HarmonicBasis::orthonormal_order1(const Eigen::VectorXd& z) const {
  return m1_(0, 0) * z;
}

Eigen::VectorXd HarmonicBasis::orthonormal_order2(const Eigen::VectorXd& z) const {
  return m2_.triangularView<Eigen::Lower>() * raw_order2(z);
}

Eigen::VectorXd HarmonicBasis::feature_map(const Eigen::VectorXd& z) const {
  if (std::abs(z.norm() - 1.0) > 1e-9) {
    throw std::domain_error("feature map argument must be a unit vector");
  }
  Eigen::VectorXd phi(z.size() + m2_.rows());
  phi.head(z.size()) = std::sqrt(a1_) * orthonormal_order1(z);
  phi.tail(m2_.rows()) = std::sqrt(a2_) * orthonormal_order2(z);
  return phi;
}

double HarmonicBasis::mmd_via_moments(const Eigen::MatrixXd& Z) const {
  if (Z.cols() != q_) throw std::invalid_argument("batch dimension mismatch");
  const Eigen::Index n = Z.rows();
  Eigen::VectorXd mean1 = Eigen::VectorXd::Zero(q_);
  Eigen::VectorXd mean2 = Eigen::VectorXd::Zero(m2_.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    mean1 += Z.row(i).transpose();
    mean2 += raw_order2(Z.row(i).transpose());
  }
  mean1 /= static_cast<double>(n);
  mean2 /= static_cast<double>(n);
  const double term1 = (m1_(0, 0) * mean1).squaredNorm();
  const double term2 = (m2_.triangularView<Eigen::Lower>() * mean2).squaredNorm();
  return a1_ * term1 + a2_ * term2;
}

namespace {

void write_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

}  // namespace

void HarmonicBasis::export_m1_csv(std::ostream& out) const { write_csv(out, m1_); }
void HarmonicBasis::export_m2_csv(std::ostream& out) const { write_csv(out, m2_); }

MomentStats embedding_moment_stats(const Eigen::MatrixXd& Z) {
  const Eigen::Index n = Z.rows();
  const Eigen::Index q = Z.cols();
  if (n < 1) throw std::invalid_argument("batch must contain at least one point");
  MomentStats stats;
  stats.mean_norm = (Z.colwise().sum() / static_cast<double>(n)).norm();
  Eigen::MatrixXd autocorr = Z.transpose() * Z / static_cast<double>(n);
  autocorr.diagonal().array() -= 1.0 / static_cast<double>(q);
  stats.autocorr_deviation = autocorr.norm();
  return stats;
}

}  // namespace spherekit
