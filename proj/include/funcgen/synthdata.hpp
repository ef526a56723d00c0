#pragma once

#include <cstdint>
#include <vector>

#include "funcgen/types.hpp"

namespace funcgen {

/// Meta-distribution over domains: each domain is a normal law with
/// mu ~ U[0.3, 0.7] and variance ~ U[0.025, 0.125] (pre-truncation parameter),
/// truncated to [mu - 0.3, mu + 0.3]; labels follow one shared rule plus
/// N(0, noise_var) noise.
struct Environment {
  double mean_lo = 0.3;
  double mean_hi = 0.7;
  double var_lo = 0.025;
  double var_hi = 0.125;
  double half_width = 0.3;
  double noise_var = 0.02;
  std::uint64_t master_seed = 0;
};

struct DomainSpec {
  double mu = 0.5;
  double var = 0.05;
  std::uint64_t seed = 0;
};

/// A generated domain. f_true holds the noiseless regression values at xs.
struct Domain {
  DomainSpec spec;
  Vector xs;
  Vector ys;
  Vector f_true;
};

/// Target domains are drawn from indices offset by this constant, so that
/// changing the number of source domains leaves targets untouched.
inline constexpr std::uint64_t kTargetIndexOffset = std::uint64_t{1} << 32;

std::uint64_t splitmix64(std::uint64_t x);

/// splitmix64(master + 0x9E3779B97F4A7C15 * (index + 1)).
std::uint64_t domain_seed(std::uint64_t master_seed, std::uint64_t index);

DomainSpec sample_domain_spec(const Environment& env, std::uint64_t index);

/// Rejection sampling from N(mu, var) restricted to [mu - 0.3, mu + 0.3].
Vector sample_inputs(const DomainSpec& spec, Index n, double half_width = 0.3);

/// 0.1 sin(3x / mu^2) + 0.9 - (1.7 (x - 0.5))^2.
double regression_target(double x, double mu);

Vector sample_labels(const DomainSpec& spec, const Vector& xs, double noise_var);

/// 0.9 - (1.7 (x - 0.5))^2.
double parabola_reference(double x);

Domain generate_domain(const Environment& env, std::uint64_t index, Index n);

std::vector<Domain> generate_sources(const Environment& env, Index count, Index n);
std::vector<Domain> generate_targets(const Environment& env, Index count, Index n);

}  // namespace funcgen
