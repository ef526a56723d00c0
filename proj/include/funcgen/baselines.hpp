#pragma once

#include <vector>

#include "funcgen/embedding.hpp"
#include "funcgen/ridge.hpp"

namespace funcgen {

struct LabeledSample {
  Vector xs;
  Vector ys;
};

/// One kernel ridge regression on the union of all domains.
RkhsFunction pooled_fit(const std::vector<LabeledSample>& domains, const KernelSpec& k, double lambda);

/// Concatenated inputs and labels.
LabeledSample pool(const std::vector<LabeledSample>& domains);

/// k_M(m, m') between embeddings: exp(-mmd^2 / (2 l_M^2)) for gaussian, 1 for constant.
double distribution_kernel(const KernelSpec& k_m, double mmd2);

/// Pairwise squared MMD between domain embeddings (symmetric, zero diagonal).
Matrix mmd_matrix(const std::vector<EmpiricalEmbedding>& ms);

/// Ridge regression on inputs augmented with their domain's marginal embedding,
/// under the product kernel k_M(m_i, m_i') k_X(x, x').
struct MarginalTransferModel {
  KernelSpec embedding_kernel;
  KernelSpec distribution_kernel;
  KernelSpec input_kernel;
  double lambda = 1.0;
  std::vector<EmpiricalEmbedding> embeddings;
  Vector points;
  std::vector<Index> domain_of;
  Vector weights;
};

inline constexpr Index kDefaultMarginalPointCap = 12000;

/// K̄[(i,j),(i',j')] = dist_kernel(i, i') k_X(x_j^(i), x_j'^(i')) over the pooled points.
Matrix marginal_gram(const Matrix& dist_kernel, const std::vector<Index>& domain_of, const Vector& points,
                     const KernelSpec& k_x);

MarginalTransferModel marginal_transfer_fit(const std::vector<LabeledSample>& domains,
                                            const KernelSpec& embed_kernel, const KernelSpec& k_m,
                                            const KernelSpec& k_x, double lambda,
                                            Index max_points = kDefaultMarginalPointCap);

/// Rebuilds the fitted model from persisted hyperparameters and samples.
MarginalTransferModel marginal_transfer_fit(const std::vector<LabeledSample>& domains,
                                            const std::vector<EmpiricalEmbedding>& embeddings,
                                            const KernelSpec& k_m, const KernelSpec& k_x, double lambda,
                                            Index max_points = kDefaultMarginalPointCap);

/// Per training domain, k_M(m_i, m_T) for the target embedding.
Vector marginal_domain_weights(const MarginalTransferModel& model, const EmpiricalEmbedding& target);

Vector marginal_transfer_predict(const MarginalTransferModel& model, const Vector& target_sample,
                                 const Vector& eval_points);

}  // namespace funcgen
