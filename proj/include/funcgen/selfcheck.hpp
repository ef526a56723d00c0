#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "funcgen/types.hpp"

namespace funcgen {

struct SelfCheckResult {
  std::string name;
  double value = 0.0;
  std::string requirement;
  bool passed = false;
};

/// Monte Carlo property checks: embedding concentration and boundedness, and the
/// moments of the synthetic environment.
std::vector<SelfCheckResult> run_selfcheck(std::uint64_t seed);

/// Variance of Normal(mu, var) truncated to [mu - h, mu + h], by midpoint quadrature.
double truncated_normal_variance(double mu, double var, double half_width, int nodes = 100000);

/// Monte Carlo mean over `reps` n-samples of ||m_x - m_ref||^2 in the RKHS of a
/// gaussian kernel; m_ref comes from one reference sample of `ref_size` points.
double embedding_deviation(Index n, int reps, Index ref_size, std::uint64_t seed, double* max_grid_value = nullptr);

}  // namespace funcgen
