#pragma once

#include <vector>

#include "funcgen/embedding.hpp"
#include "funcgen/ridge.hpp"

namespace funcgen {

/// The learned slope of G m = int beta(., x') m(x') dx'.
///
/// With N training pairs (m_i, f_i) and the coupling matrix H of the
/// embeddings under the slope kernel, the penalized objective
///
///   (1/N) sum_i || f_i - int beta(., x') m_i(x') dx' ||^2_{L2} + lambda int ||beta(t, .)||^2_H dt
///
/// decouples over t. By the representer theorem beta(t, .) = sum_i c_i(t) h_i with
/// h_i = int k(., x') m_i(x') dx', and c(t) = (H + N lambda I)^{-1} F(t) where
/// F_i(t) = f_i(t). (H + N lambda I) is factorized once at construction.
///
/// When centered, F(t) is replaced by F(t) - fbar(t) 1 with fbar the
/// cross-domain mean of the training outputs, and fbar is added back at
/// prediction.
class SlopeOperator {
 public:
  SlopeOperator() = default;
  SlopeOperator(std::vector<EmpiricalEmbedding> embeddings, std::vector<RkhsFunction> outputs,
                KernelSpec slope_kernel, double lambda, Quadrature quadrature, bool centered = false);

  Index size() const { return static_cast<Index>(embeddings_.size()); }
  const std::vector<EmpiricalEmbedding>& embeddings() const { return embeddings_; }
  const std::vector<RkhsFunction>& outputs() const { return outputs_; }
  const KernelSpec& slope_kernel() const { return slope_kernel_; }
  const KernelSpec& embedding_kernel() const { return embeddings_.front().kernel(); }
  double lambda() const { return lambda_; }
  const Quadrature& quadrature() const { return quadrature_; }
  bool centered() const { return centered_; }
  const Matrix& coupling() const { return coupling_; }
  const CouplingBasis& basis() const { return basis_; }

  /// N x P matrix of training outputs at the given points (centered if enabled).
  Matrix outputs_at(const Vector& points) const;
  /// Cross-domain mean of the raw training outputs at the given points.
  Vector mean_output_at(const Vector& points) const;

  /// alpha = (H + N lambda I)^{-1} v for the target's coupling vector v.
  Vector target_weights(const EmpiricalEmbedding& m_new) const;
  Vector target_weights_from_grid(const Vector& m_new_grid) const;

  /// c(t) for every t in points (N x P).
  Matrix coefficients_at(const Vector& points) const;

  /// Prediction from precomputed target weights; used by the CV harness.
  Vector predict_with_weights(const Vector& alpha, const Vector& eval_points) const;

 private:
  std::vector<EmpiricalEmbedding> embeddings_;
  std::vector<RkhsFunction> outputs_;
  KernelSpec slope_kernel_{};
  double lambda_ = 1.0;
  Quadrature quadrature_{1};
  bool centered_ = false;
  CouplingBasis basis_;
  Matrix coupling_;
  SpdFactor factor_;
};

SlopeOperator fit_slope(const std::vector<EmpiricalEmbedding>& ms, const std::vector<RkhsFunction>& fs,
                        const KernelSpec& k_slope, double lambda, const Quadrature& q, bool centered = false);

/// fhat(x) = alpha^T F(x) at each evaluation point.
Vector predict(const SlopeOperator& op, const EmpiricalEmbedding& m_new, const Vector& eval_points);

/// beta(t, s) = sum_i c_i(t) sum_a w_a k(s, t_a) m_i(t_a).
double eval_slope(const SlopeOperator& op, double t, double s);

/// int ||beta(t, .)||_H^2 dt ~ sum_a w_a c(t_a)^T H c(t_a), outer integral on q.
double penalty_value(const SlopeOperator& op, const Quadrature& q);

/// (1/N) sum_i ||f_i - predict(op, m_i)||^2 on the operator's quadrature grid.
double training_residual(const SlopeOperator& op);

/// C_N(s, t) = (1/N) sum_i m_i(s) m_i(t) on the grid (q x q).
Matrix empirical_covariance(const std::vector<EmpiricalEmbedding>& ms, const Quadrature& q);

/// count^{-1 / (1 + c)}: N^{-1/(1+c6)} for the slope, n^{-1/(1+c3)} per domain.
double theory_lambda(Index count, double c);

}  // namespace funcgen
