#include "funcgen/synthdata.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "funcgen/error.hpp"

namespace funcgen {

namespace {

enum Stream : std::uint64_t { kSpecStream = 1, kInputStream = 2, kLabelStream = 3 };

std::mt19937_64 stream(std::uint64_t seed, Stream s) { return std::mt19937_64(splitmix64(seed ^ s)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t domain_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

DomainSpec sample_domain_spec(const Environment& env, std::uint64_t index) {
  DomainSpec spec;
  spec.seed = domain_seed(env.master_seed, index);
  auto rng = stream(spec.seed, kSpecStream);
  std::uniform_real_distribution<double> mean(env.mean_lo, env.mean_hi);
  std::uniform_real_distribution<double> var(env.var_lo, env.var_hi);
  spec.mu = mean(rng);
  spec.var = var(rng);
  return spec;
}

Vector sample_inputs(const DomainSpec& spec, Index n, double half_width) {
  if (n < 1) throw InvalidArgument("sample_inputs: n must be positive");
  auto rng = stream(spec.seed, kInputStream);
  std::normal_distribution<double> normal(spec.mu, std::sqrt(spec.var));
  const double lo = spec.mu - half_width;
  const double hi = spec.mu + half_width;
  Vector xs(n);
  for (Index j = 0; j < n; ++j) {
    int rejections = 0;
    double x = normal(rng);
    while (x < lo || x > hi) {
      if (++rejections > 1000) throw std::logic_error("sample_inputs: rejection cap exceeded");
      x = normal(rng);
    }
    xs[j] = x;
  }
  return xs;
}

double regression_target(double x, double mu) {
  if (mu == 0.0) throw InvalidArgument("regression_target: mu must be non-zero");
  return 0.1 * std::sin(3.0 * x / (mu * mu)) + parabola_reference(x);
}

Vector sample_labels(const DomainSpec& spec, const Vector& xs, double noise_var) {
  Vector ys(xs.size());
  if (noise_var > 0.0) {
    auto rng = stream(spec.seed, kLabelStream);
    std::normal_distribution<double> noise(0.0, std::sqrt(noise_var));
    for (Index j = 0; j < xs.size(); ++j) ys[j] = regression_target(xs[j], spec.mu) + noise(rng);
  } else {
    for (Index j = 0; j < xs.size(); ++j) ys[j] = regression_target(xs[j], spec.mu);
  }
  return ys;
}

double parabola_reference(double x) {
  const double u = 1.7 * (x - 0.5);
  return 0.9 - u * u;
}

Domain generate_domain(const Environment& env, std::uint64_t index, Index n) {
  Domain d;
  d.spec = sample_domain_spec(env, index);
  d.xs = sample_inputs(d.spec, n, env.half_width);
  d.ys = sample_labels(d.spec, d.xs, env.noise_var);
  d.f_true = d.xs.unaryExpr([mu = d.spec.mu](double x) { return regression_target(x, mu); });
  return d;
}

std::vector<Domain> generate_sources(const Environment& env, Index count, Index n) {
  std::vector<Domain> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) out.push_back(generate_domain(env, static_cast<std::uint64_t>(i), n));
  return out;
}

std::vector<Domain> generate_targets(const Environment& env, Index count, Index n) {
  std::vector<Domain> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i)
    out.push_back(generate_domain(env, kTargetIndexOffset + static_cast<std::uint64_t>(i), n));
  return out;
}

}  // namespace funcgen
