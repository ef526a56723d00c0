#include "funcgen/funcreg.hpp"

#include <cmath>

#include "funcgen/error.hpp"

namespace funcgen {

SlopeOperator::SlopeOperator(std::vector<EmpiricalEmbedding> embeddings, std::vector<RkhsFunction> outputs,
                             KernelSpec slope_kernel, double lambda, Quadrature quadrature, bool centered)
    : embeddings_(std::move(embeddings)),
      outputs_(std::move(outputs)),
      slope_kernel_(slope_kernel),
      lambda_(lambda),
      quadrature_(std::move(quadrature)),
      centered_(centered) {
  if (embeddings_.empty()) throw InvalidArgument("fit_slope: no training domains");
  if (embeddings_.size() != outputs_.size())
    throw InvalidArgument("fit_slope: embeddings and outputs differ in count");
  if (!(lambda_ > 0.0)) throw InvalidArgument("fit_slope: lambda must be positive");
  slope_kernel_.validate();
  for (const auto& m : embeddings_)
    if (!(m.kernel() == embeddings_.front().kernel()))
      throw ConfigError("fit_slope: all embeddings must share one embedding kernel");

  basis_ = CouplingBasis(embeddings_on_grid(embeddings_, quadrature_), slope_kernel_, quadrature_);
  coupling_ = basis_.coupling_matrix();
  const Index n = size();
  Matrix system = coupling_;
  system.diagonal().array() += static_cast<double>(n) * lambda_;
  const double unit = std::max(coupling_.trace() / static_cast<double>(n), 1e-300);
  factor_ = SpdFactor(std::move(system), unit);
}

Matrix SlopeOperator::outputs_at(const Vector& points) const {
  Matrix f(size(), points.size());
  for (Index i = 0; i < size(); ++i) f.row(i) = krr_eval(outputs_[static_cast<std::size_t>(i)], points).transpose();
  if (centered_) f.rowwise() -= f.colwise().mean();
  return f;
}

Vector SlopeOperator::mean_output_at(const Vector& points) const {
  Vector acc = Vector::Zero(points.size());
  for (const auto& f : outputs_) acc += krr_eval(f, points);
  return acc / static_cast<double>(size());
}

Vector SlopeOperator::target_weights(const EmpiricalEmbedding& m_new) const {
  if (!(m_new.kernel() == embedding_kernel()))
    throw InvalidArgument("predict: target embedding kernel differs from the training embedding kernel");
  return target_weights_from_grid(embed_on_grid(m_new, quadrature_));
}

Vector SlopeOperator::target_weights_from_grid(const Vector& m_new_grid) const {
  return factor_.solve(basis_.coupling_vector(m_new_grid));
}

Matrix SlopeOperator::coefficients_at(const Vector& points) const { return factor_.solve(outputs_at(points)); }

Vector SlopeOperator::predict_with_weights(const Vector& alpha, const Vector& eval_points) const {
  Vector out = outputs_at(eval_points).transpose() * alpha;
  if (centered_) out += mean_output_at(eval_points);
  return out;
}

SlopeOperator fit_slope(const std::vector<EmpiricalEmbedding>& ms, const std::vector<RkhsFunction>& fs,
                        const KernelSpec& k_slope, double lambda, const Quadrature& q, bool centered) {
  return SlopeOperator(ms, fs, k_slope, lambda, q, centered);
}

Vector predict(const SlopeOperator& op, const EmpiricalEmbedding& m_new, const Vector& eval_points) {
  return op.predict_with_weights(op.target_weights(m_new), eval_points);
}

double eval_slope(const SlopeOperator& op, double t, double s) {
  const Vector tv = Vector::Constant(1, t);
  const Vector c = op.coefficients_at(tv).col(0);
  const Quadrature& q = op.quadrature();
  const Vector ks = cross_gram(op.slope_kernel(), Vector::Constant(1, s), q.nodes()).row(0).transpose();
  const Vector h = q.weight() * (op.basis().grid_values() * ks);
  return c.dot(h);
}

double penalty_value(const SlopeOperator& op, const Quadrature& q) {
  const Matrix c = op.coefficients_at(q.nodes());
  const Matrix hc = op.coupling() * c;
  return q.weight() * (c.array() * hc.array()).sum();
}

double training_residual(const SlopeOperator& op) {
  const Quadrature& q = op.quadrature();
  const Matrix f = op.outputs_at(q.nodes());
  const Vector mean = op.centered() ? op.mean_output_at(q.nodes()) : Vector::Zero(q.size());
  double acc = 0.0;
  for (Index i = 0; i < op.size(); ++i) {
    const Vector alpha = op.target_weights_from_grid(op.basis().grid_values().row(i).transpose());
    const Vector pred = f.transpose() * alpha + mean;
    const Vector truth = f.row(i).transpose() + mean;
    const double d = l2_grid_distance(truth, pred, q);
    acc += d * d;
  }
  return acc / static_cast<double>(op.size());
}

Matrix empirical_covariance(const std::vector<EmpiricalEmbedding>& ms, const Quadrature& q) {
  if (ms.empty()) throw InvalidArgument("empirical_covariance: no embeddings");
  const Matrix g = embeddings_on_grid(ms, q);
  Matrix c = (g.transpose() * g) / static_cast<double>(ms.size());
  for (Index j = 0; j < c.cols(); ++j)
    for (Index i = j + 1; i < c.rows(); ++i) c(i, j) = c(j, i);
  return c;
}

double theory_lambda(Index count, double c) {
  if (count < 1) throw InvalidArgument("theory_lambda: count must be positive");
  if (!(c > 0.0) || c > 1.0) throw InvalidArgument("theory_lambda: c must lie in (0, 1]");
  return std::pow(static_cast<double>(count), -1.0 / (1.0 + c));
}

}  // namespace funcgen
