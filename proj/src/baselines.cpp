#include "funcgen/baselines.hpp"

#include <cmath>

#include "funcgen/error.hpp"

namespace funcgen {

LabeledSample pool(const std::vector<LabeledSample>& domains) {
  Index total = 0;
  for (const auto& d : domains) {
    if (d.xs.size() != d.ys.size()) throw InvalidArgument("pool: xs and ys differ in length");
    total += d.xs.size();
  }
  LabeledSample out{Vector(total), Vector(total)};
  Index at = 0;
  for (const auto& d : domains) {
    out.xs.segment(at, d.xs.size()) = d.xs;
    out.ys.segment(at, d.ys.size()) = d.ys;
    at += d.xs.size();
  }
  return out;
}

RkhsFunction pooled_fit(const std::vector<LabeledSample>& domains, const KernelSpec& k, double lambda) {
  const LabeledSample all = pool(domains);
  if (all.xs.size() == 0) throw InvalidArgument("pooled_fit: no data");
  return krr_fit(all.xs, all.ys, k, lambda);
}

double distribution_kernel(const KernelSpec& k_m, double mmd2) {
  switch (k_m.family) {
    case KernelFamily::constant:
      return 1.0;
    case KernelFamily::gaussian:
      return std::exp(-std::max(mmd2, 0.0) / (2.0 * k_m.lengthscale * k_m.lengthscale));
    case KernelFamily::periodic:
      break;
  }
  throw InvalidArgument("distribution kernel must be gaussian or constant");
}

Matrix mmd_matrix(const std::vector<EmpiricalEmbedding>& ms) {
  const Index n = static_cast<Index>(ms.size());
  Vector self(n);
  for (Index i = 0; i < n; ++i) {
    const auto& m = ms[static_cast<std::size_t>(i)];
    const double s = static_cast<double>(m.size());
    self[i] = kernel_self_sum(m.kernel(), m.sample()) / (s * s);
  }
  Matrix d = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const auto& mj = ms[static_cast<std::size_t>(j)];
    for (Index i = 0; i < j; ++i) {
      const auto& mi = ms[static_cast<std::size_t>(i)];
      if (!(mi.kernel() == mj.kernel())) throw InvalidArgument("mmd_matrix: embeddings use different kernels");
      const double cross = kernel_sum(mi.kernel(), mi.sample(), mj.sample()) /
                           (static_cast<double>(mi.size()) * static_cast<double>(mj.size()));
      d(i, j) = d(j, i) = self[i] + self[j] - 2.0 * cross;
    }
  }
  return d;
}

Matrix marginal_gram(const Matrix& dist_kernel, const std::vector<Index>& domain_of, const Vector& points,
                     const KernelSpec& k_x) {
  Matrix g = gram(k_x, points);
  const Index t = points.size();
  for (Index b = 0; b < t; ++b)
    for (Index a = 0; a < t; ++a)
      g(a, b) *= dist_kernel(domain_of[static_cast<std::size_t>(a)], domain_of[static_cast<std::size_t>(b)]);
  return g;
}

MarginalTransferModel marginal_transfer_fit(const std::vector<LabeledSample>& domains,
                                            const KernelSpec& embed_kernel, const KernelSpec& k_m,
                                            const KernelSpec& k_x, double lambda, Index max_points) {
  std::vector<EmpiricalEmbedding> ms;
  ms.reserve(domains.size());
  for (const auto& d : domains) ms.push_back(embed(d.xs, embed_kernel));
  return marginal_transfer_fit(domains, ms, k_m, k_x, lambda, max_points);
}

MarginalTransferModel marginal_transfer_fit(const std::vector<LabeledSample>& domains,
                                            const std::vector<EmpiricalEmbedding>& embeddings,
                                            const KernelSpec& k_m, const KernelSpec& k_x, double lambda,
                                            Index max_points) {
  if (domains.empty()) throw InvalidArgument("marginal_transfer_fit: no domains");
  if (domains.size() != embeddings.size()) throw InvalidArgument("marginal_transfer_fit: embedding count mismatch");
  if (!(lambda > 0.0)) throw InvalidArgument("marginal_transfer_fit: lambda must be positive");
  if (k_m.family == KernelFamily::periodic) throw InvalidArgument("distribution kernel must be gaussian or constant");
  const LabeledSample all = pool(domains);
  const Index t = all.xs.size();
  if (t < 1) throw InvalidArgument("marginal_transfer_fit: no data");
  if (t > max_points)
    throw InvalidArgument("marginal_transfer_fit: " + std::to_string(t) + " pooled points exceed the cap of " +
                          std::to_string(max_points));

  MarginalTransferModel model;
  model.embedding_kernel = embeddings.front().kernel();
  model.distribution_kernel = k_m;
  model.input_kernel = k_x;
  model.lambda = lambda;
  model.embeddings = embeddings;
  model.points = all.xs;
  for (std::size_t i = 0; i < domains.size(); ++i)
    for (Index j = 0; j < domains[i].xs.size(); ++j) model.domain_of.push_back(static_cast<Index>(i));

  const Matrix d2 = mmd_matrix(embeddings);
  const Matrix km = d2.unaryExpr([&](double v) { return distribution_kernel(k_m, v); });
  Matrix g = marginal_gram(km, model.domain_of, model.points, k_x);
  const double unit = g.trace() / static_cast<double>(t);
  g.diagonal().array() += lambda;
  model.weights = SpdFactor(std::move(g), unit).solve(all.ys);
  return model;
}

Vector marginal_domain_weights(const MarginalTransferModel& model, const EmpiricalEmbedding& target) {
  Vector w(static_cast<Index>(model.embeddings.size()));
  for (std::size_t i = 0; i < model.embeddings.size(); ++i)
    w[static_cast<Index>(i)] = distribution_kernel(model.distribution_kernel, mmd_sq(model.embeddings[i], target));
  return w;
}

Vector marginal_transfer_predict(const MarginalTransferModel& model, const Vector& target_sample,
                                 const Vector& eval_points) {
  if (target_sample.size() == 0) throw InvalidArgument("marginal_transfer_predict: empty target sample");
  const Vector dom = marginal_domain_weights(model, embed(target_sample, model.embedding_kernel));
  Vector scaled(model.weights.size());
  for (Index a = 0; a < scaled.size(); ++a) scaled[a] = model.weights[a] * dom[model.domain_of[static_cast<std::size_t>(a)]];
  return cross_gram(model.input_kernel, eval_points, model.points) * scaled;
}

}  // namespace funcgen
