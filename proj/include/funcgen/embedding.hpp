#pragma once

#include <vector>

#include "funcgen/kernels.hpp"
#include "funcgen/types.hpp"

namespace funcgen {

/// Midpoint rule on [0,1]: q equal cells, nodes at their centres, weights 1/q.
class Quadrature {
 public:
  explicit Quadrature(Index q = 1000);

  Index size() const { return nodes_.size(); }
  const Vector& nodes() const { return nodes_; }
  double weight() const { return 1.0 / static_cast<double>(nodes_.size()); }

 private:
  Vector nodes_;
};

/// m(s) = (1/n) sum_j k(s, x_j) for a one-dimensional sample. The sample is
/// retained so the embedding can be evaluated on any grid.
class EmpiricalEmbedding {
 public:
  EmpiricalEmbedding() = default;
  EmpiricalEmbedding(KernelSpec kernel, Vector sample);

  const KernelSpec& kernel() const { return kernel_; }
  const Vector& sample() const { return sample_; }
  Index size() const { return sample_.size(); }

  double operator()(double s) const;
  Vector operator()(const Vector& s) const;

 private:
  KernelSpec kernel_{};
  Vector sample_;
};

EmpiricalEmbedding embed(const Vector& sample, const KernelSpec& k);

Vector embed_on_grid(const EmpiricalEmbedding& m, const Quadrature& q);

/// Rows are the embeddings evaluated on the quadrature nodes (N x q).
Matrix embeddings_on_grid(const std::vector<EmpiricalEmbedding>& ms, const Quadrature& q);

/// H_ij = sum_ab w_a w_b m_i(t_a) k(t_a, t_b) m_j(t_b).
Matrix coupling_matrix(const std::vector<EmpiricalEmbedding>& ms, const KernelSpec& k_slope,
                       const Quadrature& q);

/// Grid values of N embeddings together with their slope-kernel smoothings
/// z_i = K m_i, from which both the coupling matrix and coupling vectors are
/// formed by the same dot products (a target equal to a training embedding
/// reproduces the matching row of H bit for bit).
class CouplingBasis {
 public:
  CouplingBasis() = default;
  CouplingBasis(Matrix grid_values, const KernelSpec& k_slope, const Quadrature& q);

  Index size() const { return grid_.rows(); }
  const Matrix& grid_values() const { return grid_; }
  const Matrix& smoothed() const { return smoothed_; }
  const Matrix& slope_gram() const { return slope_gram_; }
  double weight() const { return weight_; }

  Matrix coupling_matrix() const;
  /// Also restricted to a subset of the embeddings, in the given order.
  Matrix coupling_matrix(const std::vector<Index>& subset) const;
  Vector coupling_vector(const Vector& m_new_grid) const;

 private:
  Matrix grid_;
  Matrix smoothed_;
  Matrix slope_gram_;
  double weight_ = 1.0;
};

Vector coupling_vector(const EmpiricalEmbedding& m_new, const std::vector<EmpiricalEmbedding>& ms,
                       const KernelSpec& k_slope, const Quadrature& q);

/// sqrt(sum_a w_a (f_a - g_a)^2).
double l2_grid_distance(const Vector& f, const Vector& g, const Quadrature& q);

/// ||m1 - m2||_H^2 in closed form. Both embeddings must share a kernel.
double mmd_sq(const EmpiricalEmbedding& m1, const EmpiricalEmbedding& m2);

}  // namespace funcgen
