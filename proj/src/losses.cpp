#include "spherekit/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace spherekit {

namespace {

void check_same_shape(const EmbeddingBatch& z1, const EmbeddingBatch& z2) {
  if (z1.rows() != z2.rows() || z1.cols() != z2.cols()) {
    throw std::invalid_argument("embedding batches must have identical shape");
  }
  if (z1.rows() < 1) throw std::invalid_argument("empty embedding batch");
}

double concat_norm(const EmbeddingBatch& g1, const EmbeddingBatch& g2) {
  return std::sqrt(g1.squaredNorm() + g2.squaredNorm());
}

}  // namespace

nlohmann::json LossReport::to_json() const {
  nlohmann::json j;
  j["value"] = value;
  j["terms"] = terms;
  j["grad_norm"] = grad_norm;
  return j;
}

namespace detail {

void centered_kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& gram,
                            Eigen::MatrixXd* value, Eigen::MatrixXd* deriv) {
  const int q = spec.q;
  switch (spec.family) {
    case KernelFamily::Truncated: {
      const int order = spec.max_order();
      if (order <= 3) {
        // Closed forms of P_1..P_3, so no recurrence table is needed.
        const double b1 = spec.coefficient(1);
        const double b2 = spec.coefficient(2);
        const double b3 = spec.coefficient(3);
        const auto& t = gram.array();
        if (value) {
          value->resize(gram.rows(), gram.cols());
          value->array() = b1 * t + b2 * (q * t.square() - 1.0) / (q - 1) +
                           b3 * ((q + 2) * t.cube() - 3.0 * t) / (q - 1);
          if (!spec.centered) value->array() += spec.coefficient(0);
        }
        if (deriv) {
          deriv->resize(gram.rows(), gram.cols());
          deriv->array() = b1 + b2 * 2.0 * q * t / (q - 1) +
                           b3 * (3.0 * (q + 2) * t.square() - 3.0) / (q - 1);
        }
        return;
      }
      // General order: the three-term recurrence applied entrywise, together
      // with its derivative.
      Eigen::ArrayXXd p_prev = Eigen::ArrayXXd::Ones(gram.rows(), gram.cols());
      Eigen::ArrayXXd p_cur = gram.array();
      Eigen::ArrayXXd dp_prev = Eigen::ArrayXXd::Zero(gram.rows(), gram.cols());
      Eigen::ArrayXXd dp_cur = Eigen::ArrayXXd::Ones(gram.rows(), gram.cols());
      Eigen::ArrayXXd v = Eigen::ArrayXXd::Constant(gram.rows(), gram.cols(),
                                                    spec.centered ? 0.0 : spec.coefficient(0));
      Eigen::ArrayXXd d = Eigen::ArrayXXd::Zero(gram.rows(), gram.cols());
      if (order >= 1) {
        v += spec.coefficient(1) * p_cur;
        d += spec.coefficient(1) * dp_cur;
      }
      for (int l = 1; l < order; ++l) {
        const double a = (2.0 * l + q - 2) / (l + q - 2);
        const double c = static_cast<double>(l) / (l + q - 2);
        Eigen::ArrayXXd p_next = a * gram.array() * p_cur - c * p_prev;
        Eigen::ArrayXXd dp_next = a * (p_cur + gram.array() * dp_cur) - c * dp_prev;
        p_prev.swap(p_cur);
        p_cur.swap(p_next);
        dp_prev.swap(dp_cur);
        dp_cur.swap(dp_next);
        const double b = spec.coefficient(l + 1);
        if (b != 0.0) {
          v += b * p_cur;
          d += b * dp_cur;
        }
      }
      if (value) *value = v.matrix();
      if (deriv) *deriv = d.matrix();
      return;
    }
    case KernelFamily::Rbf: {
      const double sigma = spec.sigma;
      Eigen::ArrayXXd e = (-2.0 * sigma * (1.0 - gram.array())).exp();
      if (value) *value = (spec.centered ? (e - spec.b0_removed) : e).matrix();
      if (deriv) *deriv = (2.0 * sigma * e).matrix();
      return;
    }
    case KernelFamily::GenDist: {
      const double vc = gendist_energy_constant(spec.q, spec.s);
      const double p = 0.5 * (2.0 * spec.s - spec.q + 1.0);
      Eigen::ArrayXXd base = (2.0 - 2.0 * gram.array()).max(0.0);
      if (value) {
        const double offset = spec.centered ? vc : 2.0 * vc;
        *value = (offset - base.pow(p)).matrix();
      }
      if (deriv) {
        // The derivative diverges as t -> 1; entries at the boundary (the
        // Gram diagonal of unit vectors) are set to 0, which matches the
        // on-sphere view where those entries are constant.
        deriv->resize(gram.rows(), gram.cols());
        deriv->array() =
            (base > 0.0).select(2.0 * p * base.pow(p - 1.0),
                                Eigen::ArrayXXd::Zero(gram.rows(), gram.cols()));
      }
      return;
    }
  }
  throw std::logic_error("unreachable kernel family");
}

}  // namespace detail

LossReport alignment_loss(const EmbeddingBatch& z1, const EmbeddingBatch& z2) {
  check_same_shape(z1, z2);
  const double n = static_cast<double>(z1.rows());
  const EmbeddingBatch diff = z1 - z2;
  LossReport report;
  report.value = diff.squaredNorm() / n;
  report.terms["alignment"] = report.value;
  report.grad1 = (2.0 / n) * diff;
  report.grad2 = -report.grad1;
  report.grad_norm = concat_norm(report.grad1, report.grad2);
  return report;
}

LossReport uniformity_loss(const KernelSpec& spec, const EmbeddingBatch& z,
                           bool force_generic) {
  if (!spec.centered) {
    throw std::invalid_argument("uniformity loss requires a centered kernel (b_0 removed)");
  }
  if (z.rows() < 1) throw std::invalid_argument("empty embedding batch");
  if (z.cols() != spec.q) throw std::invalid_argument("batch dimension does not match kernel");

  const double n = static_cast<double>(z.rows());
  const Eigen::MatrixXd gram = z * z.transpose();
  Eigen::MatrixXd value, deriv;
  if (force_generic && spec.family == KernelFamily::Truncated && spec.max_order() <= 3) {
    // Re-run through the recurrence path by lifting the order artificially.
    KernelSpec lifted = spec;
    lifted.coefficients.resize(5, 0.0);
    detail::centered_kernel_matrix(lifted, gram, &value, &deriv);
  } else {
    detail::centered_kernel_matrix(spec, gram, &value, &deriv);
  }

  LossReport report;
  report.value = value.sum() / (n * n);
  report.terms["uniformity"] = report.value;
  report.grad1 = (2.0 / (n * n)) * (deriv * z);
  report.grad_norm = report.grad1.norm();
  return report;
}

LossReport total_loss(const LossWeights& weights, const KernelSpec& spec,
                      const EmbeddingBatch& z1, const EmbeddingBatch& z2) {
  check_same_shape(z1, z2);
  const LossReport align = alignment_loss(z1, z2);
  const LossReport unif1 = uniformity_loss(spec, z1);
  const LossReport unif2 = uniformity_loss(spec, z2);

  LossReport report;
  report.value = weights.lambda * align.value + weights.mu * (unif1.value + unif2.value);
  report.terms["alignment"] = align.value;
  report.terms["uniformity_1"] = unif1.value;
  report.terms["uniformity_2"] = unif2.value;
  report.grad1 = weights.lambda * align.grad1 + weights.mu * unif1.grad1;
  report.grad2 = weights.lambda * align.grad2 + weights.mu * unif2.grad1;
  report.grad_norm = concat_norm(report.grad1, report.grad2);
  return report;
}

LossReport simclr_regularizer(double tau, const EmbeddingBatch& z1,
                              const EmbeddingBatch& z2) {
  if (tau <= 0.0) throw std::domain_error("SimCLR temperature must be > 0");
  check_same_shape(z1, z2);
  const Eigen::Index n = z1.rows();
  Eigen::MatrixXd stacked(2 * n, z1.cols());
  stacked.topRows(n) = z1;
  stacked.bottomRows(n) = z2;

  Eigen::MatrixXd expg = ((stacked * stacked.transpose()).array() / tau).exp();
  expg.diagonal().setZero();
  const Eigen::VectorXd row_sums = expg.rowwise().sum();

  LossReport report;
  report.value = row_sums.array().log().sum() / (2.0 * n);
  report.terms["simclr"] = report.value;

  // W = rows of expg normalized; grad = (W + W^T) X / (2 n tau).
  Eigen::MatrixXd w = row_sums.cwiseInverse().asDiagonal() * expg;
  Eigen::MatrixXd grad = (w + w.transpose()) * stacked / (2.0 * n * tau);
  report.grad1 = grad.topRows(n);
  report.grad2 = grad.bottomRows(n);
  report.grad_norm = concat_norm(report.grad1, report.grad2);
  return report;
}

LossReport auh_regularizer(double t_scale, const EmbeddingBatch& z1,
                           const EmbeddingBatch& z2) {
  if (t_scale <= 0.0) throw std::domain_error("AUH scale must be > 0");
  check_same_shape(z1, z2);
  const Eigen::Index n = z1.rows();

  LossReport report;
  report.grad1.resize(z1.rows(), z1.cols());
  report.grad2.resize(z2.rows(), z2.cols());
  double value = 0.0;
  for (int view = 0; view < 2; ++view) {
    const EmbeddingBatch& z = (view == 0) ? z1 : z2;
    // exp(-t ||z_i - z_j||^2) on general (possibly off-sphere) vectors.
    const Eigen::VectorXd sq = z.rowwise().squaredNorm();
    Eigen::MatrixXd dist2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
                            2.0 * (z * z.transpose());
    Eigen::MatrixXd e = (-t_scale * dist2.array()).exp();
    const double total = e.sum();
    value += std::log(total) / (2.0 * n * n);
    const Eigen::VectorXd row_sums = e.rowwise().sum();
    Eigen::MatrixXd grad =
        (-2.0 * t_scale / (n * n * total)) *
        (row_sums.asDiagonal() * z - e * z);
    if (view == 0) {
      report.grad1 = grad;
    } else {
      report.grad2 = grad;
    }
    report.terms[view == 0 ? "auh_view1" : "auh_view2"] = std::log(total) / (2.0 * n * n);
  }
  report.value = value;
  report.grad_norm = concat_norm(report.grad1, report.grad2);
  return report;
}

namespace {

// Variance and covariance terms of one batch plus their gradient.
struct VicregView {
  double variance_term;
  double covariance_term;
  Eigen::MatrixXd grad_variance;
  Eigen::MatrixXd grad_covariance;
};

VicregView vicreg_view(const EmbeddingBatch& z, double gamma, double epsilon) {
  const Eigen::Index n = z.rows();
  const Eigen::Index q = z.cols();
  const Eigen::RowVectorXd mean = z.colwise().mean();
  const Eigen::MatrixXd centered = z.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);

  VicregView view;
  view.variance_term = 0.0;
  Eigen::VectorXd hinge_scale = Eigen::VectorXd::Zero(q);
  for (Eigen::Index j = 0; j < q; ++j) {
    const double std_j = std::sqrt(cov(j, j) + epsilon);
    if (gamma > std_j) {
      view.variance_term += (gamma - std_j) / static_cast<double>(q);
      hinge_scale(j) = -1.0 / (2.0 * std_j * static_cast<double>(q));
    }
  }
  Eigen::MatrixXd offdiag = cov;
  offdiag.diagonal().setZero();
  view.covariance_term = offdiag.squaredNorm() / static_cast<double>(q);

  const double inv_nm1 = 1.0 / static_cast<double>(n - 1);
  view.grad_variance = 2.0 * inv_nm1 * centered * hinge_scale.asDiagonal();
  view.grad_covariance =
      (4.0 * inv_nm1 / static_cast<double>(q)) * (centered * offdiag);
  return view;
}

}  // namespace

LossReport vicreg_regularizer(const LossWeights& weights, const EmbeddingBatch& z1,
                              const EmbeddingBatch& z2) {
  check_same_shape(z1, z2);
  if (z1.rows() < 2) {
    throw std::invalid_argument("VICReg requires |I| >= 2 (covariance undefined)");
  }
  const VicregView view1 = vicreg_view(z1, weights.gamma, weights.epsilon);
  const VicregView view2 = vicreg_view(z2, weights.gamma, weights.epsilon);
  const double cov_weight = weights.nu / (2.0 * weights.mu);

  LossReport report;
  report.value = 0.5 * (view1.variance_term + view2.variance_term) +
                 cov_weight * (view1.covariance_term + view2.covariance_term);
  report.terms["variance_1"] = view1.variance_term;
  report.terms["variance_2"] = view2.variance_term;
  report.terms["covariance_1"] = view1.covariance_term;
  report.terms["covariance_2"] = view2.covariance_term;
  report.grad1 = 0.5 * view1.grad_variance + cov_weight * view1.grad_covariance;
  report.grad2 = 0.5 * view2.grad_variance + cov_weight * view2.grad_covariance;
  report.grad_norm = concat_norm(report.grad1, report.grad2);
  return report;
}

}  // namespace spherekit
