#include "funcgen/ridge.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "funcgen/error.hpp"

namespace funcgen {

RkhsFunction::RkhsFunction(KernelSpec kernel, Index dim)
    : kernel_(kernel), centers_(0, dim), weights_(0) {}

RkhsFunction::RkhsFunction(KernelSpec kernel, Points centers, Vector weights)
    : kernel_(kernel), centers_(std::move(centers)), weights_(std::move(weights)) {
  if (centers_.rows() != weights_.size())
    throw InvalidArgument("RkhsFunction: centers and weights differ in length");
  kernel_.validate();
}

double RkhsFunction::operator()(double x) const {
  if (centers_.cols() != 1) throw InvalidArgument("RkhsFunction: scalar evaluation of a multi-dimensional function");
  double s = 0.0;
  const auto c = centers_.col(0);
  for (Index j = 0; j < weights_.size(); ++j) s += weights_[j] * eval_kernel(kernel_, x, c[j]);
  return s;
}

double RkhsFunction::operator()(PointRef x) const {
  double s = 0.0;
  for (Index j = 0; j < weights_.size(); ++j) s += weights_[j] * eval_kernel(kernel_, x, centers_.row(j));
  return s;
}

SpdFactor::SpdFactor(Matrix a, double jitter_unit) : factor_(std::move(a)) {
  const Index n = factor_.rows();
  if (n != factor_.cols()) throw InvalidArgument("SpdFactor: matrix is not square");
  const Vector diag = factor_.diagonal();
  if (!(jitter_unit > 0.0) || !std::isfinite(jitter_unit)) jitter_unit = 1.0;

  double jitter = 0.0;
  for (int attempt = 0;; ++attempt) {
    Eigen::LLT<Eigen::Ref<Matrix>> llt(factor_);
    if (llt.info() == Eigen::Success) {
      jitter_ = jitter;
      return;
    }
    // Only the lower triangle was touched; rebuild it from the strict upper part.
    for (Index j = 0; j < n; ++j)
      for (Index i = j + 1; i < n; ++i) factor_(i, j) = factor_(j, i);
    if (attempt == 5) {
      factor_.diagonal() = diag;
      const double rcond = Eigen::LDLT<Matrix>(factor_.selfadjointView<Eigen::Upper>()).rcond();
      throw NumericalError("SPD factorization failed after jitter escalation",
                           rcond > 0.0 ? 1.0 / rcond : INFINITY);
    }
    jitter = 1e-10 * std::pow(10.0, attempt) * jitter_unit;
    factor_.diagonal() = diag.array() + jitter;
  }
}

Vector SpdFactor::solve(const Vector& b) const {
  Vector x = factor_.triangularView<Eigen::Lower>().solve(b);
  factor_.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
  return x;
}

Matrix SpdFactor::solve(const Matrix& b) const {
  Matrix x = factor_.triangularView<Eigen::Lower>().solve(b);
  factor_.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
  return x;
}

RkhsFunction krr_fit(const Points& xs, const Vector& ys, const KernelSpec& k, double lambda) {
  if (xs.rows() == 0) throw InvalidArgument("krr_fit: empty sample");
  return krr_fit_with_gram(xs, ys, k, lambda, gram(k, xs));
}

RkhsFunction krr_fit_with_gram(const Points& xs, const Vector& ys, const KernelSpec& k, double lambda,
                               Matrix gram_matrix) {
  if (xs.rows() == 0) throw InvalidArgument("krr_fit: empty sample");
  if (xs.rows() != ys.size()) throw InvalidArgument("krr_fit: xs and ys differ in length");
  if (!(lambda > 0.0)) throw InvalidArgument("krr_fit: lambda must be positive");
  if (!ys.allFinite()) throw InvalidArgument("krr_fit: non-finite labels");
  const Index n = xs.rows();
  const double unit = gram_matrix.trace() / static_cast<double>(n);
  gram_matrix.diagonal().array() += lambda;
  const SpdFactor factor(std::move(gram_matrix), unit);
  return RkhsFunction(k, xs, factor.solve(ys));
}

Vector krr_eval(const RkhsFunction& f, const Points& xs) {
  if (f.size() == 0) return Vector::Zero(xs.rows());
  return cross_gram(f.kernel(), xs, f.centers()) * f.weights();
}

double effective_dimension(const Matrix& K, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("effective_dimension: lambda must be positive");
  if (K.rows() == 0) return 0.0;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(K, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (const double theta : eig.eigenvalues()) {
    const double t = std::max(theta, 0.0);
    s += t / (lambda + t);
  }
  return s;
}

double rkhs_norm_sq(const RkhsFunction& f) {
  if (f.size() == 0) return 0.0;
  const Vector& w = f.weights();
  return std::max(0.0, w.dot(gram(f.kernel(), f.centers()) * w));
}

}  // namespace funcgen
