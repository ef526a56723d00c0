#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "funcgen/baselines.hpp"
#include "funcgen/funcreg.hpp"

namespace funcgen {

/// Kernel candidates x regularization candidates. Lambdas are kept in descending order.
struct SearchGrid {
  std::vector<KernelSpec> kernels;
  std::vector<double> lambdas;

  /// Throws InvalidArgument on an empty list, a non-positive lambda or unsorted lambdas.
  void validate() const;
  std::size_t size() const { return kernels.size() * lambdas.size(); }
};

/// One point of a search. Kernel-ridge and slope searches carry one kernel;
/// marginal transfer carries (embedding, distribution, input).
struct CvCandidate {
  std::vector<KernelSpec> kernels;
  double lambda = 1.0;
  std::size_t kernel_rank = 0;  // position of the kernel tuple in its grid; used for tie-breaking
};

struct CvReport {
  std::vector<CvCandidate> candidates;
  std::vector<double> mean_scores;
  Matrix fold_scores;  // candidates x folds
  std::size_t chosen = 0;
};

/// Minimum mean score; ties go to the larger lambda, then to the earlier kernel.
std::size_t select_candidate(const std::vector<CvCandidate>& candidates, const std::vector<double>& mean_scores);

/// Deterministic shuffle of 0..n-1 split into `folds` near-equal parts, each sorted ascending.
std::vector<std::vector<Index>> kfold_assign(Index n, int folds, std::uint64_t seed);

struct KrrSelection {
  KernelSpec kernel;
  double lambda = 1.0;
  CvReport report;
};

/// Point-level K-fold CV of kernel ridge regression, scored by mean squared validation error.
KrrSelection cv_krr(const Vector& xs, const Vector& ys, const SearchGrid& grid, int folds, std::uint64_t seed);

enum class SlopeScoring {
  grid,    // squared L2 distance on the quadrature grid over [0,1]
  sample,  // squared L2 distance under the held-out domain's empirical input law
};

std::string to_string(SlopeScoring s);
SlopeScoring slope_scoring_from_string(const std::string& s);

struct SlopeSelection {
  KernelSpec kernel;
  double lambda = 1.0;
  CvReport report;
};

/// Domain-level K-fold CV of the slope kernel and lambda. The held-out
/// domain's step-1 estimate is the validation target.
SlopeSelection cv_slope(const std::vector<EmpiricalEmbedding>& ms, const std::vector<RkhsFunction>& fs,
                        const SearchGrid& grid, int folds, const Quadrature& q, std::uint64_t seed,
                        SlopeScoring scoring = SlopeScoring::grid, bool centered = false);

struct MarginalGrid {
  std::vector<KernelSpec> embedding_kernels;
  std::vector<KernelSpec> distribution_kernels;
  std::vector<KernelSpec> input_kernels;
  std::vector<double> lambdas;

  void validate() const;
};

struct MarginalSelection {
  KernelSpec embedding_kernel;
  KernelSpec distribution_kernel;
  KernelSpec input_kernel;
  double lambda = 1.0;
  CvReport report;
};

/// Domain-level K-fold CV; held-out domains are predicted from their unlabeled
/// inputs and scored by mean squared error against their labels.
MarginalSelection cv_marginal_transfer(const std::vector<LabeledSample>& domains, const MarginalGrid& grid,
                                       int folds, std::uint64_t seed,
                                       Index max_points = kDefaultMarginalPointCap);

}  // namespace funcgen
