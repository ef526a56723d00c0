#include "funcgen/embedding.hpp"

#include <cmath>

#include "funcgen/error.hpp"

namespace funcgen {

namespace {

// Fixed left-to-right summation so that equal inputs give equal bits
// regardless of storage layout or alignment.
double ordered_dot(const Matrix& a, Index row_a, const Matrix& b, Index row_b) {
  double s = 0.0;
  for (Index k = 0; k < a.cols(); ++k) s += a(row_a, k) * b(row_b, k);
  return s;
}

double ordered_dot(const Matrix& a, Index row_a, const Vector& b) {
  double s = 0.0;
  for (Index k = 0; k < a.cols(); ++k) s += a(row_a, k) * b[k];
  return s;
}

}  // namespace

Quadrature::Quadrature(Index q) {
  if (q < 1) throw InvalidArgument("Quadrature: q must be at least 1");
  nodes_.resize(q);
  for (Index a = 0; a < q; ++a) nodes_[a] = (static_cast<double>(a) + 0.5) / static_cast<double>(q);
}

EmpiricalEmbedding::EmpiricalEmbedding(KernelSpec kernel, Vector sample)
    : kernel_(kernel), sample_(std::move(sample)) {
  kernel_.validate();
  if (sample_.size() == 0) throw InvalidArgument("embed: empty sample");
  if (!sample_.allFinite()) throw InvalidArgument("embed: non-finite sample");
}

double EmpiricalEmbedding::operator()(double s) const {
  double acc = 0.0;
  for (const double x : sample_) acc += eval_kernel(kernel_, s, x);
  return acc / static_cast<double>(sample_.size());
}

Vector EmpiricalEmbedding::operator()(const Vector& s) const {
  if (sample_.size() == 0) return Vector::Zero(s.size());
  return cross_gram(kernel_, s, sample_).rowwise().mean();
}

EmpiricalEmbedding embed(const Vector& sample, const KernelSpec& k) { return EmpiricalEmbedding(k, sample); }

Vector embed_on_grid(const EmpiricalEmbedding& m, const Quadrature& q) { return m(q.nodes()); }

Matrix embeddings_on_grid(const std::vector<EmpiricalEmbedding>& ms, const Quadrature& q) {
  Matrix out(static_cast<Index>(ms.size()), q.size());
  for (std::size_t i = 0; i < ms.size(); ++i) out.row(static_cast<Index>(i)) = embed_on_grid(ms[i], q).transpose();
  return out;
}

CouplingBasis::CouplingBasis(Matrix grid_values, const KernelSpec& k_slope, const Quadrature& q)
    : grid_(std::move(grid_values)), slope_gram_(gram(k_slope, q.nodes())), weight_(q.weight()) {
  if (grid_.cols() != q.size()) throw InvalidArgument("CouplingBasis: grid size mismatch");
  smoothed_.resize(grid_.rows(), grid_.cols());
  for (Index i = 0; i < grid_.rows(); ++i) {
    const Vector m = grid_.row(i).transpose();
    const Vector z = slope_gram_ * m;
    smoothed_.row(i) = z.transpose();
  }
}

Matrix CouplingBasis::coupling_matrix() const {
  std::vector<Index> all(static_cast<std::size_t>(grid_.rows()));
  for (Index i = 0; i < grid_.rows(); ++i) all[static_cast<std::size_t>(i)] = i;
  return coupling_matrix(all);
}

Matrix CouplingBasis::coupling_matrix(const std::vector<Index>& subset) const {
  const Index n = static_cast<Index>(subset.size());
  const double w2 = weight_ * weight_;
  Matrix h(n, n);
  for (Index a = 0; a < n; ++a) {
    const Index i = subset[static_cast<std::size_t>(a)];
    for (Index b = a; b < n; ++b) {
      const Index j = subset[static_cast<std::size_t>(b)];
      // Row i of H always comes from z_i dotted with m_j, whichever triangle it lands in.
      const double v = w2 * ordered_dot(smoothed_, std::min(i, j), grid_, std::max(i, j));
      h(a, b) = v;
      h(b, a) = v;
    }
  }
  return h;
}

Vector CouplingBasis::coupling_vector(const Vector& m_new_grid) const {
  if (m_new_grid.size() != grid_.cols()) throw InvalidArgument("coupling_vector: grid size mismatch");
  const Vector m = m_new_grid;
  const Vector z = slope_gram_ * m;
  const double w2 = weight_ * weight_;
  Vector v(grid_.rows());
  for (Index j = 0; j < grid_.rows(); ++j) v[j] = w2 * ordered_dot(grid_, j, z);
  return v;
}

Matrix coupling_matrix(const std::vector<EmpiricalEmbedding>& ms, const KernelSpec& k_slope, const Quadrature& q) {
  if (ms.empty()) throw InvalidArgument("coupling_matrix: no embeddings");
  return CouplingBasis(embeddings_on_grid(ms, q), k_slope, q).coupling_matrix();
}

Vector coupling_vector(const EmpiricalEmbedding& m_new, const std::vector<EmpiricalEmbedding>& ms,
                       const KernelSpec& k_slope, const Quadrature& q) {
  if (ms.empty()) throw InvalidArgument("coupling_vector: no embeddings");
  return CouplingBasis(embeddings_on_grid(ms, q), k_slope, q).coupling_vector(embed_on_grid(m_new, q));
}

double l2_grid_distance(const Vector& f, const Vector& g, const Quadrature& q) {
  if (f.size() != g.size() || f.size() != q.size())
    throw InvalidArgument("l2_grid_distance: length mismatch");
  return std::sqrt(q.weight() * (f - g).squaredNorm());
}

double mmd_sq(const EmpiricalEmbedding& m1, const EmpiricalEmbedding& m2) {
  if (!(m1.kernel() == m2.kernel())) throw InvalidArgument("mmd_sq: embeddings use different kernels");
  const KernelSpec& k = m1.kernel();
  const double n1 = static_cast<double>(m1.size());
  const double n2 = static_cast<double>(m2.size());
  const double xx = kernel_self_sum(k, m1.sample()) / (n1 * n1);
  const double yy = kernel_self_sum(k, m2.sample()) / (n2 * n2);
  const double xy = kernel_sum(k, m1.sample(), m2.sample()) / (n1 * n2);
  return xx + yy - 2.0 * xy;
}

}  // namespace funcgen
