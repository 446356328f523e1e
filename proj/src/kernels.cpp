#include "spherekit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spherekit {

namespace {

constexpr double kPositiveTolerance = 1e-12;

void check_gendist_exponent(int q, double s) {
  if (!(s > 0.5 * (q - 1) && s < 0.5 * (q + 1))) {
    throw std::domain_error("generalized-distance exponent s must satisfy (q-1)/2 < s < (q+1)/2");
  }
}

void validate(const KernelSpec& spec) {
  if (spec.q < 3) throw std::domain_error("kernel dimension q must be >= 3");
  for (std::size_t l = 0; l < spec.coefficients.size(); ++l) {
    if (spec.coefficients[l] < -kPositiveTolerance) {
      throw std::domain_error("negative Legendre coefficient b_" + std::to_string(l));
    }
  }
}

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Truncated: return "truncated";
    case KernelFamily::Rbf: return "rbf";
    case KernelFamily::GenDist: return "gendist";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "truncated") return KernelFamily::Truncated;
  if (name == "rbf") return KernelFamily::Rbf;
  if (name == "gendist") return KernelFamily::GenDist;
  throw std::invalid_argument("unknown kernel family: " + name);
}

KernelSpec KernelSpec::truncated(int q, const std::vector<std::pair<int, double>>& coeffs) {
  KernelSpec spec;
  spec.q = q;
  spec.family = KernelFamily::Truncated;
  int max_l = 0;
  for (const auto& [l, b] : coeffs) {
    if (l < 0) throw std::domain_error("coefficient order must be >= 0");
    max_l = std::max(max_l, l);
  }
  spec.coefficients.assign(static_cast<std::size_t>(max_l) + 1, 0.0);
  for (const auto& [l, b] : coeffs) spec.coefficients[static_cast<std::size_t>(l)] += b;
  validate(spec);
  return spec;
}

KernelSpec KernelSpec::rbf(int q, double sigma, int working_order) {
  if (sigma <= 0.0) throw std::domain_error("RBF scale sigma must be > 0");
  KernelSpec spec;
  spec.q = q;
  spec.family = KernelFamily::Rbf;
  spec.sigma = sigma;
  // Closed form via the Gegenbauer plane-wave expansion:
  //   b_l = N(q, l) e^{-2 sigma} Gamma(q/2) sigma^{-(q-2)/2} I_{l+(q-2)/2}(2 sigma).
  // Strictly positive at every order; quadrature extraction would lose the
  // tail below machine precision.
  const double log_pre =
      std::lgamma(0.5 * q) - 0.5 * (q - 2) * std::log(sigma) - 2.0 * sigma;
  spec.coefficients.assign(static_cast<std::size_t>(working_order) + 1, 0.0);
  for (int l = 0; l <= working_order; ++l) {
    const double nu = l + 0.5 * (q - 2);
    const double bessel = std::cyl_bessel_i(nu, 2.0 * sigma);
    if (bessel > 0.0) {
      spec.coefficients[static_cast<std::size_t>(l)] =
          std::exp(log_harmonic_space_dim(q, l) + log_pre + std::log(bessel));
    }
  }
  validate(spec);
  return spec;
}

KernelSpec KernelSpec::gen_dist(int q, double s, int working_order) {
  check_gendist_exponent(q, s);
  KernelSpec spec;
  spec.q = q;
  spec.family = KernelFamily::GenDist;
  spec.s = s;
  spec.coefficients = gendist_coefficients(q, s, working_order);
  validate(spec);
  return spec;
}

double KernelSpec::coefficient(int l) const {
  if (l < 0 || l >= static_cast<int>(coefficients.size())) return 0.0;
  return coefficients[static_cast<std::size_t>(l)];
}

double KernelSpec::coefficient_sum() const {
  double sum = 0.0;
  for (double b : coefficients) sum += b;
  return sum;
}

nlohmann::json KernelSpec::to_json() const {
  nlohmann::json j;
  j["q"] = q;
  j["family"] = spherekit::to_string(family);
  nlohmann::json coeffs = nlohmann::json::array();
  for (std::size_t l = 0; l < coefficients.size(); ++l) {
    coeffs.push_back({static_cast<int>(l), coefficients[l]});
  }
  j["coefficients"] = coeffs;
  if (family == KernelFamily::Rbf) j["sigma"] = sigma;
  if (family == KernelFamily::GenDist) j["s"] = s;
  j["centered"] = centered;
  return j;
}

KernelSpec KernelSpec::from_json(const nlohmann::json& j) {
  const int q = j.at("q").get<int>();
  const KernelFamily family = kernel_family_from_string(j.at("family").get<std::string>());
  const bool centered = j.value("centered", false);
  KernelSpec spec;
  switch (family) {
    case KernelFamily::Truncated: {
      std::vector<std::pair<int, double>> coeffs;
      for (const auto& pair : j.at("coefficients")) {
        coeffs.emplace_back(pair.at(0).get<int>(), pair.at(1).get<double>());
      }
      spec = KernelSpec::truncated(q, coeffs);
      break;
    }
    case KernelFamily::Rbf:
      spec = KernelSpec::rbf(q, j.at("sigma").get<double>());
      break;
    case KernelFamily::GenDist:
      spec = KernelSpec::gen_dist(q, j.at("s").get<double>());
      break;
  }
  if (centered) spec = center_kernel(std::move(spec));
  return spec;
}

double kernel_eval(const KernelSpec& spec, double t) {
  t = clamp_dot(t);
  switch (spec.family) {
    case KernelFamily::Truncated: {
      LegendreTable table(spec.q, spec.max_order());
      const Eigen::VectorXd p = table.evaluate_point(t);
      double value = 0.0;
      for (int l = 0; l <= spec.max_order(); ++l) value += spec.coefficient(l) * p(l);
      return value;
    }
    case KernelFamily::Rbf: {
      const double value = std::exp(-2.0 * spec.sigma * (1.0 - t));
      return spec.centered ? value - spec.b0_removed : value;
    }
    case KernelFamily::GenDist: {
      const double v = gendist_energy_constant(spec.q, spec.s);
      const double p = 0.5 * (2.0 * spec.s - spec.q + 1.0);
      const double value = 2.0 * v - std::pow(std::max(2.0 - 2.0 * t, 0.0), p);
      return spec.centered ? value - spec.b0_removed : value;
    }
  }
  throw std::logic_error("unreachable kernel family");
}

double kernel_eval_derivative(const KernelSpec& spec, double t) {
  t = clamp_dot(t);
  switch (spec.family) {
    case KernelFamily::Truncated: {
      double value = 0.0;
      for (int l = 1; l <= spec.max_order(); ++l) {
        const double b = spec.coefficient(l);
        if (b != 0.0) value += b * legendre_derivative(spec.q, l, t);
      }
      return value;
    }
    case KernelFamily::Rbf:
      return 2.0 * spec.sigma * std::exp(-2.0 * spec.sigma * (1.0 - t));
    case KernelFamily::GenDist: {
      const double p = 0.5 * (2.0 * spec.s - spec.q + 1.0);
      const double base = 2.0 - 2.0 * t;
      if (base <= 0.0) {
        throw std::domain_error("generalized-distance kernel derivative diverges at t = 1");
      }
      return 2.0 * p * std::pow(base, p - 1.0);
    }
  }
  throw std::logic_error("unreachable kernel family");
}

CoefficientExpansion expand_coefficients(const std::function<double(double)>& phi,
                                         int q, int max_order, int num_nodes) {
  if (num_nodes <= 0) num_nodes = default_quadrature_nodes(max_order);

  auto project = [&](int nodes) {
    const QuadratureRule rule = gauss_jacobi_sphere(q, nodes);
    LegendreTable table(q, max_order);
    std::vector<double> b(static_cast<std::size_t>(max_order) + 1, 0.0);
    for (int k = 0; k < rule.nodes.size(); ++k) {
      const double phi_k = phi(rule.nodes(k));
      const Eigen::VectorXd p = table.evaluate_point(rule.nodes(k));
      for (int l = 0; l <= max_order; ++l) {
        b[static_cast<std::size_t>(l)] += rule.weights(k) * phi_k * p(l);
      }
    }
    const double inv_ratio = 1.0 / surface_area_ratio(q);
    for (int l = 0; l <= max_order; ++l) {
      b[static_cast<std::size_t>(l)] *=
          inv_ratio * std::exp(log_harmonic_space_dim(q, l));
    }
    return b;
  };

  CoefficientExpansion result;
  result.coefficients = project(num_nodes);
  const std::vector<double> refined = project(2 * num_nodes);
  for (std::size_t l = 0; l < result.coefficients.size(); ++l) {
    if (std::abs(result.coefficients[l] - refined[l]) > 1e-8) {
      result.converged = false;
    }
  }
  return result;
}

double rbf_coefficient_bound(int q, double sigma, int l) {
  if (sigma <= 0.0) throw std::domain_error("RBF scale sigma must be > 0");
  const double a = 0.5 * (q - 1);
  const double log_bound = std::log(2.0) + log_harmonic_space_dim(q, l) -
                           std::log(surface_area_ratio(q)) + std::lgamma(a) -
                           l * std::log(2.0) - std::lgamma(l + a) +
                           l * std::log(2.0 * sigma);
  return std::exp(log_bound);
}

double gendist_energy_constant(int q, double s) {
  check_gendist_exponent(q, s);
  return std::exp((2.0 * s - 1.0) * std::log(2.0) + std::lgamma(0.5 * q) +
                  std::lgamma(s) - 0.5 * std::log(std::numbers::pi) -
                  std::lgamma(0.5 * (q - 1) + s));
}

std::vector<double> gendist_coefficients(int q, double s, int max_order) {
  check_gendist_exponent(q, s);
  const double v = gendist_energy_constant(q, s);
  const double a = 0.5 * (q - 1) - s;  // in (-1, 0)
  const double b = 0.5 * (q - 1) + s;

  std::vector<double> coeffs(static_cast<std::size_t>(max_order) + 1, 0.0);
  coeffs[0] = v;
  double pochhammer_ratio = 1.0;  // (a)_l / (b)_l
  for (int l = 1; l <= max_order; ++l) {
    pochhammer_ratio *= (a + l - 1) / (b + l - 1);
    const double alpha_l = -v * pochhammer_ratio;
    coeffs[static_cast<std::size_t>(l)] =
        alpha_l * std::exp(log_harmonic_space_dim(q, l));
  }
  return coeffs;
}

double gendist_tail_constant(int q, double s) {
  check_gendist_exponent(q, s);
  // -V Gamma((q-1)/2 + s) / Gamma((q-1)/2 - s); the Gamma in the denominator
  // has a negative argument in (-1, 0), so go through std::tgamma for sign.
  const double v = gendist_energy_constant(q, s);
  return -v * std::tgamma(0.5 * (q - 1) + s) / std::tgamma(0.5 * (q - 1) - s);
}

KernelSpec center_kernel(KernelSpec spec) {
  if (!spec.centered) {
    spec.b0_removed = spec.coefficient(0);
    if (!spec.coefficients.empty()) spec.coefficients[0] = 0.0;
    spec.centered = true;
  }
  return spec;
}

Universality is_universal(const KernelSpec& spec, int probe_order) {
  if (spec.family == KernelFamily::Truncated) return Universality::NotUniversal;
  if (spec.family == KernelFamily::Rbf) {
    // b_l = c_l * integral of phi^(l)(t) (1-t^2)^{l+(q-3)/2} dt with c_l > 0
    // and phi^(l)(t) = e^{-2 sigma} (2 sigma)^l e^{2 sigma t} > 0, so every
    // coefficient is strictly positive regardless of probe depth. Quadrature
    // cannot resolve the sub-machine-precision tail, hence the analytic route.
    return Universality::UniversalUpToProbe;
  }
  const std::vector<double> coeffs = gendist_coefficients(spec.q, spec.s, probe_order);
  for (int l = 1; l <= probe_order; ++l) {
    if (coeffs[static_cast<std::size_t>(l)] <= kPositiveTolerance) {
      return Universality::NotUniversal;
    }
  }
  return Universality::UniversalUpToProbe;
}

}  // namespace spherekit
