#include "funcgen/selfcheck.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "funcgen/embedding.hpp"
#include "funcgen/experiment.hpp"
#include "funcgen/synthdata.hpp"

namespace funcgen {

namespace {

const DomainSpec kReferenceDomain{0.5, 0.075, 0};

std::string bound_text(const char* fmt, double a, double b = 0.0) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

double sample_mean(const Vector& v) { return v.mean(); }

double sample_variance(const Vector& v) {
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

}  // namespace

double truncated_normal_variance(double mu, double var, double half_width, int nodes) {
  const double h = 2.0 * half_width / nodes;
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (int a = 0; a < nodes; ++a) {
    const double x = mu - half_width + (a + 0.5) * h;
    const double p = std::exp(-(x - mu) * (x - mu) / (2.0 * var));
    z += p;
    m1 += p * x;
    m2 += p * x * x;
  }
  m1 /= z;
  return m2 / z - m1 * m1;
}

double embedding_deviation(Index n, int reps, Index ref_size, std::uint64_t seed, double* max_grid_value) {
  const KernelSpec k = KernelSpec::gaussian(0.1);
  DomainSpec ref_spec = kReferenceDomain;
  ref_spec.seed = derive_seed(seed, 0x524546ULL, 0);
  const Vector ref = sample_inputs(ref_spec, ref_size);
  const double rr = static_cast<double>(ref_size);
  const double ref_self = kernel_self_sum(k, ref) / (rr * rr);
  const Quadrature q(1000);
  double total = 0.0;
  double max_value = 0.0;
  for (int r = 0; r < reps; ++r) {
    DomainSpec s = kReferenceDomain;
    s.seed = derive_seed(seed, 0x4D43ULL + static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r));
    const Vector xs = sample_inputs(s, n);
    const double nn = static_cast<double>(n);
    // Same three terms as mmd_sq, with the reference self-term computed once.
    const double d = kernel_self_sum(k, xs) / (nn * nn) + ref_self - 2.0 * kernel_sum(k, xs, ref) / (nn * rr);
    total += d;
    max_value = std::max(max_value, embed_on_grid(embed(xs, k), q).cwiseAbs().maxCoeff());
  }
  if (max_grid_value) *max_grid_value = max_value;
  return total / reps;
}

std::vector<SelfCheckResult> run_selfcheck(std::uint64_t seed) {
  std::vector<SelfCheckResult> out;
  double max_value = 0.0;
  for (const Index n : {Index{10}, Index{100}}) {
    double mv = 0.0;
    const double dev = embedding_deviation(n, 200, 100000, seed, &mv);
    max_value = std::max(max_value, mv);
    const double bound = 1.5 / static_cast<double>(n);
    out.push_back({"embedding concentration n=" + std::to_string(n), dev, bound_text("<= %.4g", bound), dev <= bound});
  }
  out.push_back({"embedding uniform bound", max_value, "<= 1", max_value <= 1.0});

  DomainSpec spec{0.5, 0.025, derive_seed(seed, 0x4E4F495345ULL, 0)};
  const Vector xs = Vector::Constant(100000, 0.5);
  const Vector ys = sample_labels(spec, xs, 0.02);
  const Vector resid = ys.unaryExpr([](double y) { return y - regression_target(0.5, 0.5); });
  const double nv = sample_variance(resid);
  out.push_back({"label noise variance", nv, "0.02 +- 0.002", std::abs(nv - 0.02) <= 0.002});

  Environment env;
  env.master_seed = seed;
  double mu_sum = 0.0;
  for (std::uint64_t i = 0; i < 10000; ++i) mu_sum += sample_domain_spec(env, i).mu;
  const double mu_mean = mu_sum / 10000.0;
  out.push_back({"domain mean of mu", mu_mean, "in [0.49, 0.51]", mu_mean >= 0.49 && mu_mean <= 0.51});

  const Vector narrow = sample_inputs(spec, 100000);
  const double tm = sample_mean(narrow);
  out.push_back({"truncated input mean", tm, "0.5 +- 0.005", std::abs(tm - 0.5) <= 0.005});

  DomainSpec wide{0.5, 0.125, derive_seed(seed, 0x57494445ULL, 0)};
  const Vector wx = sample_inputs(wide, 100000);
  const double wv = sample_variance(wx);
  const double oracle = truncated_normal_variance(0.5, 0.125, 0.3);
  // Standard error of a sample variance for a law supported on a width-0.6 window.
  const double tol = 5.0 * std::sqrt(2.0 / 100000.0) * oracle;
  out.push_back({"truncated input variance", wv, bound_text("%.6g +- %.2g", oracle, tol),
                 wv < 0.125 && std::abs(wv - oracle) <= tol});
  return out;
}

}  // namespace funcgen
