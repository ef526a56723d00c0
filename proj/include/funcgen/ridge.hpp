#pragma once

#include <string>

#include "funcgen/kernels.hpp"
#include "funcgen/types.hpp"

namespace funcgen {

/// f(x) = sum_j weights[j] k(x, centers_j). No centers denotes the zero function.
class RkhsFunction {
 public:
  RkhsFunction() = default;
  explicit RkhsFunction(KernelSpec kernel, Index dim = 1);
  RkhsFunction(KernelSpec kernel, Points centers, Vector weights);

  const KernelSpec& kernel() const { return kernel_; }
  const Points& centers() const { return centers_; }
  const Vector& weights() const { return weights_; }
  Index size() const { return weights_.size(); }
  Index dim() const { return centers_.cols(); }

  double operator()(double x) const;
  double operator()(PointRef x) const;

 private:
  KernelSpec kernel_{};
  Points centers_ = Points(0, 1);
  Vector weights_ = Vector(0);
};

/// A fitted domain-specific regression together with the hyperparameters that produced it.
struct DomainModel {
  RkhsFunction fit;
  KernelSpec kernel;
  double lambda = 1.0;
  std::string sample_id;
};

/// Cholesky factor of a symmetric positive-definite system, stabilized by jitter.
///
/// When the plain factorization fails, jitter 1e-10 * unit is added to the
/// diagonal and escalated by x10 up to 1e-6 * unit, where unit is typically
/// trace(K) / n of the underlying Gram matrix. Past that a NumericalError is
/// thrown. Factorizes in place.
class SpdFactor {
 public:
  SpdFactor() = default;
  SpdFactor(Matrix a, double jitter_unit);

  Index size() const { return factor_.rows(); }
  double jitter() const { return jitter_; }

  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;

 private:
  Matrix factor_;
  double jitter_ = 0.0;
};

/// Minimizer of sum_j (f(x_j) - y_j)^2 + lambda ||f||_H^2, i.e. (K + lambda I) w = y.
RkhsFunction krr_fit(const Points& xs, const Vector& ys, const KernelSpec& k, double lambda);

/// Same fit, reusing a Gram matrix that the caller already assembled over xs.
RkhsFunction krr_fit_with_gram(const Points& xs, const Vector& ys, const KernelSpec& k, double lambda,
                               Matrix gram_matrix);

Vector krr_eval(const RkhsFunction& f, const Points& xs);

/// Tr((K + lambda I)^{-1} K) from the eigenvalues of K; negative round-off eigenvalues count as 0.
double effective_dimension(const Matrix& K, double lambda);

/// w^T K w over the centers.
double rkhs_norm_sq(const RkhsFunction& f);

}  // namespace funcgen
