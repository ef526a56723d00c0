#include "funcgen/modelselect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "funcgen/error.hpp"

namespace funcgen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_lambdas(const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw InvalidArgument("search grid: no lambda candidates");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw InvalidArgument("search grid: lambdas must be positive");
    if (i > 0 && lambdas[i] > lambdas[i - 1]) throw InvalidArgument("search grid: lambdas must be sorted descending");
  }
}

std::vector<Index> complement(Index n, const std::vector<Index>& held_out) {
  std::vector<char> out(static_cast<std::size_t>(n), 0);
  for (const Index i : held_out) out[static_cast<std::size_t>(i)] = 1;
  std::vector<Index> rest;
  rest.reserve(static_cast<std::size_t>(n) - held_out.size());
  for (Index i = 0; i < n; ++i)
    if (!out[static_cast<std::size_t>(i)]) rest.push_back(i);
  return rest;
}

Vector take(const Vector& v, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a) out[static_cast<Index>(a)] = v[idx[a]];
  return out;
}

Matrix take(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t b = 0; b < cols.size(); ++b)
    for (std::size_t a = 0; a < rows.size(); ++a) out(static_cast<Index>(a), static_cast<Index>(b)) = m(rows[a], cols[b]);
  return out;
}

// Mean of fold scores; any non-finite fold makes the candidate ineligible.
void finish_report(CvReport& report) {
  const Index folds = report.fold_scores.cols();
  report.mean_scores.resize(report.candidates.size());
  for (std::size_t c = 0; c < report.candidates.size(); ++c) {
    double s = 0.0;
    for (Index f = 0; f < folds; ++f) s += report.fold_scores(static_cast<Index>(c), f);
    report.mean_scores[c] = std::isfinite(s) ? s / static_cast<double>(folds) : kInf;
  }
  report.chosen = select_candidate(report.candidates, report.mean_scores);
}

}  // namespace

void SearchGrid::validate() const {
  if (kernels.empty()) throw InvalidArgument("search grid: no kernel candidates");
  for (const auto& k : kernels) k.validate();
  validate_lambdas(lambdas);
}

void MarginalGrid::validate() const {
  if (embedding_kernels.empty() || distribution_kernels.empty() || input_kernels.empty())
    throw InvalidArgument("marginal grid: empty kernel list");
  for (const auto& k : distribution_kernels)
    if (k.family == KernelFamily::periodic) throw InvalidArgument("distribution kernel must be gaussian or constant");
  validate_lambdas(lambdas);
}

std::size_t select_candidate(const std::vector<CvCandidate>& candidates, const std::vector<double>& mean_scores) {
  if (candidates.empty() || candidates.size() != mean_scores.size())
    throw InvalidArgument("select_candidate: empty or mismatched candidate list");
  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    const double s = mean_scores[c];
    const double b = mean_scores[best];
    if (s < b) {
      best = c;
    } else if (s == b) {
      const auto& cc = candidates[c];
      const auto& cb = candidates[best];
      if (cc.lambda > cb.lambda || (cc.lambda == cb.lambda && cc.kernel_rank < cb.kernel_rank)) best = c;
    }
  }
  return best;
}

std::vector<std::vector<Index>> kfold_assign(Index n, int folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("kfold_assign: need at least two folds");
  if (n < folds) throw InvalidArgument("kfold_assign: fewer items than folds");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(folds));
  const Index base = n / folds;
  const Index extra = n % folds;
  Index at = 0;
  for (int f = 0; f < folds; ++f) {
    const Index len = base + (f < extra ? 1 : 0);
    auto& fold = out[static_cast<std::size_t>(f)];
    fold.assign(perm.begin() + at, perm.begin() + at + len);
    std::sort(fold.begin(), fold.end());
    at += len;
  }
  return out;
}

KrrSelection cv_krr(const Vector& xs, const Vector& ys, const SearchGrid& grid, int folds, std::uint64_t seed) {
  grid.validate();
  if (xs.size() != ys.size()) throw InvalidArgument("cv_krr: xs and ys differ in length");
  if (xs.size() < folds) throw InvalidArgument("cv_krr: fewer points than folds");
  const auto assignment = kfold_assign(xs.size(), folds, seed);

  CvReport report;
  for (std::size_t k = 0; k < grid.kernels.size(); ++k)
    for (const double lam : grid.lambdas) report.candidates.push_back({{grid.kernels[k]}, lam, k});
  report.fold_scores = Matrix::Constant(static_cast<Index>(report.candidates.size()), folds, kInf);

  const Index nl = static_cast<Index>(grid.lambdas.size());
  for (int f = 0; f < folds; ++f) {
    const auto& val = assignment[static_cast<std::size_t>(f)];
    const auto train = complement(xs.size(), val);
    const Vector x_tr = take(xs, train);
    const Vector y_tr = take(ys, train);
    const Vector x_va = take(xs, val);
    const Vector y_va = take(ys, val);
    for (std::size_t k = 0; k < grid.kernels.size(); ++k) {
      const KernelSpec& kern = grid.kernels[k];
      const Matrix g = gram(kern, x_tr);
      const Matrix cross = cross_gram(kern, x_va, x_tr);
      const double unit = g.trace() / static_cast<double>(g.rows());
      for (Index l = 0; l < nl; ++l) {
        try {
          Matrix system = g;
          system.diagonal().array() += grid.lambdas[static_cast<std::size_t>(l)];
          const Vector w = SpdFactor(std::move(system), unit).solve(y_tr);
          report.fold_scores(static_cast<Index>(k) * nl + l, f) = (cross * w - y_va).squaredNorm() /
                                                                   static_cast<double>(val.size());
        } catch (const NumericalError&) {
          // the candidate stays at +inf
        }
      }
    }
  }
  finish_report(report);
  const auto& best = report.candidates[report.chosen];
  return {best.kernels.front(), best.lambda, std::move(report)};
}

std::string to_string(SlopeScoring s) { return s == SlopeScoring::grid ? "grid" : "sample"; }

SlopeScoring slope_scoring_from_string(const std::string& s) {
  if (s == "grid") return SlopeScoring::grid;
  if (s == "sample") return SlopeScoring::sample;
  throw InvalidArgument("unknown slope scoring '" + s + "'");
}

SlopeSelection cv_slope(const std::vector<EmpiricalEmbedding>& ms, const std::vector<RkhsFunction>& fs,
                        const SearchGrid& grid, int folds, const Quadrature& q, std::uint64_t seed,
                        SlopeScoring scoring, bool centered) {
  grid.validate();
  const Index n = static_cast<Index>(ms.size());
  if (static_cast<Index>(fs.size()) != n) throw InvalidArgument("cv_slope: embeddings and outputs differ in count");
  if (n < folds) throw InvalidArgument("cv_slope: fewer domains than folds");
  for (const auto& m : ms)
    if (!(m.kernel() == ms.front().kernel())) throw ConfigError("cv_slope: all embeddings must share one kernel");
  const auto assignment = kfold_assign(n, folds, seed);

  // Validation points per held-out domain and every output evaluated there.
  std::vector<Vector> points(static_cast<std::size_t>(n));
  std::vector<Matrix> outputs(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Vector& p = scoring == SlopeScoring::grid ? q.nodes() : ms[static_cast<std::size_t>(i)].sample();
    points[static_cast<std::size_t>(i)] = p;
    Matrix out(n, p.size());
    for (Index j = 0; j < n; ++j) out.row(j) = krr_eval(fs[static_cast<std::size_t>(j)], p).transpose();
    outputs[static_cast<std::size_t>(i)] = std::move(out);
  }

  CvReport report;
  for (std::size_t k = 0; k < grid.kernels.size(); ++k)
    for (const double lam : grid.lambdas) report.candidates.push_back({{grid.kernels[k]}, lam, k});
  report.fold_scores = Matrix::Constant(static_cast<Index>(report.candidates.size()), folds, kInf);

  const Matrix grid_values = embeddings_on_grid(ms, q);
  const Index nl = static_cast<Index>(grid.lambdas.size());
  for (std::size_t k = 0; k < grid.kernels.size(); ++k) {
    const CouplingBasis basis(grid_values, grid.kernels[k], q);
    const Matrix h = basis.coupling_matrix();
    for (int f = 0; f < folds; ++f) {
      const auto& val = assignment[static_cast<std::size_t>(f)];
      const auto train = complement(n, val);
      const Index nt = static_cast<Index>(train.size());
      const Matrix h_tr = take(h, train, train);
      const Matrix h_tv = take(h, train, val);
      const double unit = std::max(h_tr.trace() / static_cast<double>(nt), 1e-300);
      for (Index l = 0; l < nl; ++l) {
        try {
          Matrix system = h_tr;
          system.diagonal().array() += static_cast<double>(nt) * grid.lambdas[static_cast<std::size_t>(l)];
          const Matrix alpha = SpdFactor(std::move(system), unit).solve(h_tv);
          double score = 0.0;
          for (std::size_t v = 0; v < val.size(); ++v) {
            const Index i = val[v];
            const Matrix& all = outputs[static_cast<std::size_t>(i)];
            Matrix f_tr(nt, all.cols());
            for (Index a = 0; a < nt; ++a) f_tr.row(a) = all.row(train[static_cast<std::size_t>(a)]);
            Vector pred;
            if (centered) {
              const RowVector mean = f_tr.colwise().mean();
              f_tr.rowwise() -= mean;
              pred = f_tr.transpose() * alpha.col(static_cast<Index>(v)) + mean.transpose();
            } else {
              pred = f_tr.transpose() * alpha.col(static_cast<Index>(v));
            }
            const Vector truth = all.row(i).transpose();
            if (scoring == SlopeScoring::grid) {
              const double d = l2_grid_distance(truth, pred, q);
              score += d * d;
            } else {
              score += (truth - pred).squaredNorm() / static_cast<double>(truth.size());
            }
          }
          report.fold_scores(static_cast<Index>(k) * nl + l, f) = score / static_cast<double>(val.size());
        } catch (const NumericalError&) {
        }
      }
    }
  }
  finish_report(report);
  const auto& best = report.candidates[report.chosen];
  return {best.kernels.front(), best.lambda, std::move(report)};
}

MarginalSelection cv_marginal_transfer(const std::vector<LabeledSample>& domains, const MarginalGrid& grid,
                                       int folds, std::uint64_t seed, Index max_points) {
  grid.validate();
  const Index n = static_cast<Index>(domains.size());
  if (n < folds) throw InvalidArgument("cv_marginal_transfer: fewer domains than folds");
  const LabeledSample all = pool(domains);
  const Index total = all.xs.size();
  if (total > max_points)
    throw InvalidArgument("cv_marginal_transfer: " + std::to_string(total) + " pooled points exceed the cap of " +
                          std::to_string(max_points));
  std::vector<Index> domain_of;
  std::vector<std::vector<Index>> points_of(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < domains[static_cast<std::size_t>(i)].xs.size(); ++j) {
      points_of[static_cast<std::size_t>(i)].push_back(static_cast<Index>(domain_of.size()));
      domain_of.push_back(i);
    }
  const auto assignment = kfold_assign(n, folds, seed);

  CvReport report;
  const std::size_t ne = grid.embedding_kernels.size();
  const std::size_t nm = grid.distribution_kernels.size();
  const std::size_t nx = grid.input_kernels.size();
  const std::size_t nl = grid.lambdas.size();
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t m = 0; m < nm; ++m)
      for (std::size_t x = 0; x < nx; ++x)
        for (const double lam : grid.lambdas)
          report.candidates.push_back(
              {{grid.embedding_kernels[e], grid.distribution_kernels[m], grid.input_kernels[x]}, lam, (e * nm + m) * nx + x});
  report.fold_scores = Matrix::Constant(static_cast<Index>(report.candidates.size()), folds, kInf);

  // Per fold: pooled indices of training and held-out points.
  std::vector<std::vector<Index>> train_pts(static_cast<std::size_t>(folds)), val_pts(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    const auto& val = assignment[static_cast<std::size_t>(f)];
    for (const Index i : complement(n, val))
      for (const Index p : points_of[static_cast<std::size_t>(i)]) train_pts[static_cast<std::size_t>(f)].push_back(p);
    for (const Index i : val)
      for (const Index p : points_of[static_cast<std::size_t>(i)]) val_pts[static_cast<std::size_t>(f)].push_back(p);
  }

  for (std::size_t e = 0; e < ne; ++e) {
    std::vector<EmpiricalEmbedding> ms;
    for (const auto& d : domains) ms.push_back(embed(d.xs, grid.embedding_kernels[e]));
    const Matrix d2 = mmd_matrix(ms);
    for (std::size_t x = 0; x < nx; ++x) {
      const Matrix gx = gram(grid.input_kernels[x], all.xs);
      for (std::size_t m = 0; m < nm; ++m) {
        const KernelSpec& km_spec = grid.distribution_kernels[m];
        const Matrix km = d2.unaryExpr([&](double v) { return distribution_kernel(km_spec, v); });
        Matrix kbar = gx;
        for (Index b = 0; b < total; ++b)
          for (Index a = 0; a < total; ++a)
            kbar(a, b) *= km(domain_of[static_cast<std::size_t>(a)], domain_of[static_cast<std::size_t>(b)]);
        const std::size_t base = ((e * nm + m) * nx + x) * nl;
        for (int f = 0; f < folds; ++f) {
          const auto& tr = train_pts[static_cast<std::size_t>(f)];
          const auto& va = val_pts[static_cast<std::size_t>(f)];
          const Matrix k_tr = take(kbar, tr, tr);
          const Matrix k_vt = take(kbar, va, tr);
          const Vector y_tr = take(all.ys, tr);
          const Vector y_va = take(all.ys, va);
          const double unit = k_tr.trace() / static_cast<double>(k_tr.rows());
          for (std::size_t l = 0; l < nl; ++l) {
            try {
              Matrix system = k_tr;
              system.diagonal().array() += grid.lambdas[l];
              const Vector w = SpdFactor(std::move(system), unit).solve(y_tr);
              report.fold_scores(static_cast<Index>(base + l), f) =
                  (k_vt * w - y_va).squaredNorm() / static_cast<double>(va.size());
            } catch (const NumericalError&) {
            }
          }
        }
      }
    }
  }
  finish_report(report);
  const auto& best = report.candidates[report.chosen];
  return {best.kernels[0], best.kernels[1], best.kernels[2], best.lambda, std::move(report)};
}

}  // namespace funcgen
