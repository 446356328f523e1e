#include "spherekit/sphere_math.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spherekit {

namespace {

constexpr double kBoundarySlack = 1e-12;

void check_dim(int q, int min_q = 3) {
  if (q < min_q) {
    throw std::domain_error("dimension q must be >= " + std::to_string(min_q) +
                            ", got " + std::to_string(q));
  }
}

void check_order(int l) {
  if (l < 0) {
    throw std::domain_error("order l must be >= 0, got " + std::to_string(l));
  }
}

}  // namespace

double clamp_dot(double t) {
  if (t > 1.0) {
    if (t > 1.0 + kBoundarySlack) {
      throw std::domain_error("argument t = " + std::to_string(t) +
                              " outside [-1, 1]");
    }
    return 1.0;
  }
  if (t < -1.0) {
    if (t < -1.0 - kBoundarySlack) {
      throw std::domain_error("argument t = " + std::to_string(t) +
                              " outside [-1, 1]");
    }
    return -1.0;
  }
  return t;
}

double legendre_closed_form(int q, int l, double t) {
  check_dim(q);
  check_order(l);
  t = clamp_dot(t);
  if (l == 0) return 1.0;
  if (l == 1) return t;

  // P_l(q; t) = l! Gamma(a) sum_k (-1/4)^k (1-t^2)^k t^{l-2k}
  //             / (k! (l-2k)! Gamma(k + a)),  a = (q-1)/2.
  // Each term is assembled in log space; |t|^{l-2k} and (1-t^2)^k stay as
  // ordinary powers since both bases are <= 1.
  const double a = 0.5 * (q - 1);
  const double one_minus_t2 = std::max(0.0, 1.0 - t * t);
  const double log_lfact = std::lgamma(static_cast<double>(l) + 1.0);
  const double log_gamma_a = std::lgamma(a);

  double sum = 0.0;
  for (int k = 0; k <= l / 2; ++k) {
    const int p = l - 2 * k;  // power of t
    if (t == 0.0 && p > 0) continue;
    if (one_minus_t2 == 0.0 && k > 0) continue;
    double log_mag = log_lfact + log_gamma_a - std::lgamma(k + 1.0) -
                     std::lgamma(p + 1.0) - std::lgamma(k + a) -
                     k * std::log(4.0);
    if (k > 0) log_mag += k * std::log(one_minus_t2);
    if (p > 0) log_mag += p * std::log(std::abs(t));
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    if (t < 0.0 && p % 2 == 1) sign = -sign;
    sum += sign * std::exp(log_mag);
  }
  return sum;
}

double legendre_derivative(int q, int l, double t) {
  check_dim(q);
  check_order(l);
  t = clamp_dot(t);
  if (l == 0) return 0.0;
  const double factor =
      static_cast<double>(l) * (l + q - 2) / static_cast<double>(q - 1);
  return factor * legendre_closed_form(q + 2, l - 1, t);
}

double log_harmonic_space_dim(int q, int l) {
  check_dim(q);
  check_order(l);
  if (l == 0) return 0.0;
  if (l == 1) return std::log(static_cast<double>(q));
  // N(q, l) = (2l + q - 2) (l + q - 3)! / (l! (q - 2)!)
  return std::log(static_cast<double>(2 * l + q - 2)) +
         std::lgamma(static_cast<double>(l + q - 2)) -
         std::lgamma(static_cast<double>(l) + 1.0) -
         std::lgamma(static_cast<double>(q - 1));
}

std::int64_t harmonic_space_dim(int q, int l) {
  const double log_n = log_harmonic_space_dim(q, l);
  if (log_n > 43.0) {  // ~ 2^62
    throw std::overflow_error("N(q, l) exceeds 64-bit range for q=" +
                              std::to_string(q) + ", l=" + std::to_string(l));
  }
  return static_cast<std::int64_t>(std::llround(std::exp(log_n)));
}

double log_sphere_surface_area(int q) {
  check_dim(q, 2);
  return std::log(2.0) + 0.5 * q * std::log(std::numbers::pi) -
         std::lgamma(0.5 * q);
}

double sphere_surface_area(int q) { return std::exp(log_sphere_surface_area(q)); }

double surface_area_ratio(int q) {
  check_dim(q);
  return std::exp(0.5 * std::log(std::numbers::pi) +
                  std::lgamma(0.5 * (q - 1)) - std::lgamma(0.5 * q));
}

double legendre_weight_norm(int q, int l) {
  return std::exp(std::log(surface_area_ratio(q)) -
                  log_harmonic_space_dim(q, l));
}

LegendreTable::LegendreTable(int q, int max_order) : q_(q), max_order_(max_order) {
  check_dim(q);
  check_order(max_order);
  a_.resize(max_order_ + 1);
  c_.resize(max_order_ + 1);
  for (int l = 0; l <= max_order_; ++l) {
    const double denom = l + q - 2;
    a_[l] = (2.0 * l + q - 2) / denom;
    c_[l] = static_cast<double>(l) / denom;
  }
}

Eigen::VectorXd LegendreTable::evaluate_point(double t) const {
  t = clamp_dot(t);
  Eigen::VectorXd p(max_order_ + 1);
  p(0) = 1.0;
  if (max_order_ >= 1) p(1) = t;
  for (int l = 1; l < max_order_; ++l) {
    p(l + 1) = a_[l] * t * p(l) - c_[l] * p(l - 1);
  }
  return p;
}

Eigen::MatrixXd LegendreTable::evaluate(const std::vector<double>& t_values) const {
  Eigen::MatrixXd out(max_order_ + 1, static_cast<Eigen::Index>(t_values.size()));
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j) = evaluate_point(t_values[static_cast<std::size_t>(j)]);
  }
  return out;
}

int default_quadrature_nodes(int max_order) {
  return std::max(200, 4 * max_order + 20);
}

namespace {

// Symmetric tridiagonal QL with implicit shifts, rotating only the first
// eigenvector component (all Golub-Welsch needs). O(n^2), so large node
// counts stay cheap; a dense eigensolver would be O(n^3).
void tridiagonal_ql_first_row(std::vector<double>& d, std::vector<double>& e,
                              std::vector<double>& z) {
  const int n = static_cast<int>(d.size());
  e.push_back(0.0);  // sentinel
  for (int l = 0; l < n; ++l) {
    for (int iter = 0;; ++iter) {
      if (iter > 50) throw std::runtime_error("Golub-Welsch QL failed to converge");
      int m = l;
      while (m < n - 1) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= 1e-16 * dd) break;
        ++m;
      }
      if (m == l) break;

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (int i = m - 1; i >= l; --i) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        f = z[i + 1];
        z[i + 1] = s * z[i] + c * f;
        z[i] = c * z[i] - s * f;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

}  // namespace

QuadratureRule gauss_jacobi_sphere(int q, int num_nodes) {
  check_dim(q);
  if (num_nodes < 1) throw std::invalid_argument("num_nodes must be >= 1");

  // Jacobi weight with alpha = beta = (q-3)/2. Symmetric case: the monic
  // recurrence has zero diagonal and
  //   b_n = n (n + 2 alpha) / ((2n + 2 alpha + 1)(2n + 2 alpha - 1)).
  const double alpha = 0.5 * (q - 3);
  const int n = num_nodes;
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  std::vector<double> off(static_cast<std::size_t>(n) - 1, 0.0);
  for (int k = 1; k < n; ++k) {
    const double bk =
        k * (k + 2.0 * alpha) /
        ((2.0 * k + 2.0 * alpha + 1.0) * (2.0 * k + 2.0 * alpha - 1.0));
    off[static_cast<std::size_t>(k) - 1] = std::sqrt(bk);
  }
  std::vector<double> first(static_cast<std::size_t>(n), 0.0);
  first[0] = 1.0;
  tridiagonal_ql_first_row(diag, off, first);

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
  std::sort(order.begin(), order.end(),
            [&diag](int a, int b) { return diag[static_cast<std::size_t>(a)] <
                                           diag[static_cast<std::size_t>(b)]; });

  const double mu0 = surface_area_ratio(q);  // integral of the weight
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    rule.nodes(k) = diag[static_cast<std::size_t>(src)];
    const double v0 = first[static_cast<std::size_t>(src)];
    rule.weights(k) = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace spherekit
