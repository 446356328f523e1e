#pragma once

#include "spherekit/sphere_math.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace spherekit {

enum class KernelFamily { Truncated, Rbf, GenDist };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

// A rotation-invariant kernel phi(t) = sum_l b_l P_l(q; t), b_l >= 0.
// Immutable after construction; build through the factory functions.
struct KernelSpec {
  int q = 0;
  KernelFamily family = KernelFamily::Truncated;
  std::vector<double> coefficients;  // b_l, dense by order
  double sigma = 0.0;                // RBF scale
  double s = 0.0;                    // generalized-distance exponent
  bool centered = false;
  double b0_removed = 0.0;  // original b_0, kept so closed-form evaluation
                            // of centered RBF/GenDist kernels can subtract it

  static KernelSpec truncated(int q, const std::vector<std::pair<int, double>>& coeffs);
  // RBF coefficients come from the Bessel closed form (see kernels.cpp), so
  // they stay strictly positive at every stored order.
  static KernelSpec rbf(int q, double sigma, int working_order = 40);
  static KernelSpec gen_dist(int q, double s, int working_order = 40);

  double coefficient(int l) const;
  int max_order() const { return static_cast<int>(coefficients.size()) - 1; }
  double coefficient_sum() const;  // sum of b_l (= phi(1) for truncated)

  nlohmann::json to_json() const;
  static KernelSpec from_json(const nlohmann::json& j);
};

// phi(t), or phi~(t) = phi(t) - b_0 when the spec is centered. RBF and
// generalized-distance kernels are evaluated in closed form, truncated
// kernels through the Legendre recurrence.
double kernel_eval(const KernelSpec& spec, double t);

// d phi / dt. For GenDist the derivative diverges at t = 1; callers that
// need gradients should use Truncated or Rbf kernels (see losses).
double kernel_eval_derivative(const KernelSpec& spec, double t);

// Projection b_l = N(q, l) (|S^{q-2}| / |S^{q-1}|) * integral of
// phi P_l (1-t^2)^{(q-3)/2}, by Gauss-Jacobi quadrature. num_nodes = 0 picks
// the default count; the result is flagged converged = false if any
// coefficient moves by more than 1e-8 when the node count doubles.
struct CoefficientExpansion {
  std::vector<double> coefficients;
  bool converged = true;
};
CoefficientExpansion expand_coefficients(const std::function<double(double)>& phi,
                                         int q, int max_order, int num_nodes = 0);

// Pre-asymptotic bound on the RBF Legendre coefficients:
//   b_l <= 2 N(q,l) (|S^{q-2}|/|S^{q-1}|) Gamma((q-1)/2) / (2^l Gamma(l+(q-1)/2)) (2 sigma)^l.
double rbf_coefficient_bound(int q, double sigma, int l);

// V_{q-1-2s}(S^{q-1}) = 2^{2s-1} Gamma(q/2) Gamma(s) / (sqrt(pi) Gamma((q-1)/2 + s)).
double gendist_energy_constant(int q, double s);

// Closed-form Legendre coefficients of the generalized distance kernel:
// b_0 = V, b_l = alpha_l^{(s)} N(q, l) with
// alpha_l = -V ((q-1)/2 - s)_l / ((q-1)/2 + s)_l (Pochhammer ratios,
// accumulated iteratively to preserve sign and avoid Gamma overflow).
std::vector<double> gendist_coefficients(int q, double s, int max_order);

// Asymptotic constant C with alpha_l^{(s)} ~ C l^{-2s}.
double gendist_tail_constant(int q, double s);

// Removes b_0 and sets the centered flag. Idempotent.
KernelSpec center_kernel(KernelSpec spec);

enum class Universality { UniversalUpToProbe, NotUniversal };

// Truncated kernels are never universal; RBF/GenDist are classified
// universal-up-to-probe when every b_l, l <= probe_order, exceeds 1e-12.
Universality is_universal(const KernelSpec& spec, int probe_order);

}  // namespace spherekit
