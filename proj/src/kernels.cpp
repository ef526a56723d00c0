#include "funcgen/kernels.hpp"

#include <cmath>
#include <numbers>

#include "funcgen/error.hpp"

namespace funcgen {

namespace {

void require_finite(PointRef x) {
  if (!x.allFinite()) throw InvalidArgument("eval_kernel: non-finite input");
}

// Kernel value as a function of the squared distance (gaussian) or absolute
// 1-D distance (periodic).
inline double gaussian_of_sq(double sq, double l) { return std::exp(-sq / (2.0 * l * l)); }

inline double periodic_of_abs(double d, double l, double p) {
  const double s = std::sin(std::numbers::pi * d / p);
  return std::exp(-2.0 * s * s / (l * l));
}

inline double eval_1d(const KernelSpec& k, double x, double y) {
  switch (k.family) {
    case KernelFamily::gaussian: {
      const double d = x - y;
      return gaussian_of_sq(d * d, k.lengthscale);
    }
    case KernelFamily::periodic:
      return periodic_of_abs(std::abs(x - y), k.lengthscale, k.period);
    case KernelFamily::constant:
      return 1.0;
  }
  return 0.0;
}

}  // namespace

KernelSpec KernelSpec::gaussian(double l) {
  KernelSpec k{KernelFamily::gaussian, l, 1.0};
  k.validate();
  return k;
}

KernelSpec KernelSpec::periodic(double l, double p) {
  KernelSpec k{KernelFamily::periodic, l, p};
  k.validate();
  return k;
}

KernelSpec KernelSpec::constant() { return KernelSpec{KernelFamily::constant, 1.0, 1.0}; }

void KernelSpec::validate() const {
  if (family == KernelFamily::constant) return;
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale))
    throw InvalidArgument("kernel lengthscale must be positive, got " + std::to_string(lengthscale));
  if (family == KernelFamily::periodic && (!(period > 0.0) || !std::isfinite(period)))
    throw InvalidArgument("kernel period must be positive, got " + std::to_string(period));
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::periodic: return "periodic";
    case KernelFamily::constant: return "constant";
  }
  return "?";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "periodic") return KernelFamily::periodic;
  if (name == "constant") return KernelFamily::constant;
  throw InvalidArgument("unknown kernel family '" + name + "'");
}

std::string describe(const KernelSpec& k) {
  char buf[96];
  switch (k.family) {
    case KernelFamily::gaussian:
      std::snprintf(buf, sizeof buf, "gaussian(l=%g)", k.lengthscale);
      break;
    case KernelFamily::periodic:
      std::snprintf(buf, sizeof buf, "periodic(l=%g,p=%g)", k.lengthscale, k.period);
      break;
    case KernelFamily::constant:
      std::snprintf(buf, sizeof buf, "constant");
      break;
  }
  return buf;
}

double eval_kernel(const KernelSpec& k, PointRef x, PointRef y) {
  require_finite(x);
  require_finite(y);
  if (x.size() != y.size()) throw InvalidArgument("eval_kernel: dimension mismatch");
  if (x.size() == 0) throw InvalidArgument("eval_kernel: zero-dimensional points");
  if (x.size() == 1) return eval_1d(k, x[0], y[0]);
  switch (k.family) {
    case KernelFamily::gaussian:
      return gaussian_of_sq((x - y).squaredNorm(), k.lengthscale);
    case KernelFamily::periodic:
      throw InvalidArgument("periodic kernel is defined for d = 1 only");
    case KernelFamily::constant:
      return 1.0;
  }
  return 0.0;
}

double eval_kernel(const KernelSpec& k, double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) throw InvalidArgument("eval_kernel: non-finite input");
  return eval_1d(k, x, y);
}

Matrix gram(const KernelSpec& k, const Points& xs) {
  if (xs.rows() == 0) throw InvalidArgument("gram: empty point set");
  if (!xs.allFinite()) throw InvalidArgument("gram: non-finite input");
  const Index n = xs.rows();
  Matrix g(n, n);
  if (xs.cols() == 1) {
    const auto x = xs.col(0);
    for (Index j = 0; j < n; ++j) {
      g(j, j) = eval_1d(k, x[j], x[j]);
      for (Index i = 0; i < j; ++i) g(i, j) = eval_1d(k, x[i], x[j]);
    }
  } else {
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i <= j; ++i) g(i, j) = eval_kernel(k, xs.row(i), xs.row(j));
  }
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i) g(j, i) = g(i, j);
  return g;
}

Matrix cross_gram(const KernelSpec& k, const Points& xs, const Points& ys) {
  if (xs.cols() != ys.cols()) throw InvalidArgument("cross_gram: dimension mismatch");
  if (!xs.allFinite() || !ys.allFinite()) throw InvalidArgument("cross_gram: non-finite input");
  Matrix g(xs.rows(), ys.rows());
  if (xs.cols() == 1) {
    const auto x = xs.col(0);
    const auto y = ys.col(0);
    for (Index j = 0; j < ys.rows(); ++j)
      for (Index i = 0; i < xs.rows(); ++i) g(i, j) = eval_1d(k, x[i], y[j]);
  } else {
    for (Index j = 0; j < ys.rows(); ++j)
      for (Index i = 0; i < xs.rows(); ++i) g(i, j) = eval_kernel(k, xs.row(i), ys.row(j));
  }
  return g;
}

double kernel_sum(const KernelSpec& k, const Vector& xs, const Vector& ys) {
  if (k.family == KernelFamily::constant) return static_cast<double>(xs.size()) * static_cast<double>(ys.size());
  double total = 0.0;
  if (k.family == KernelFamily::gaussian) {
    const double scale = -1.0 / (2.0 * k.lengthscale * k.lengthscale);
    for (Index j = 0; j < ys.size(); ++j) total += ((xs.array() - ys[j]).square() * scale).exp().sum();
    return total;
  }
  for (Index j = 0; j < ys.size(); ++j) {
    double col = 0.0;
    for (Index i = 0; i < xs.size(); ++i) col += eval_1d(k, xs[i], ys[j]);
    total += col;
  }
  return total;
}

double kernel_self_sum(const KernelSpec& k, const Vector& xs) {
  if (k.family == KernelFamily::constant) return static_cast<double>(xs.size()) * static_cast<double>(xs.size());
  double off = 0.0;
  double diag = 0.0;
  if (k.family == KernelFamily::gaussian) {
    const double scale = -1.0 / (2.0 * k.lengthscale * k.lengthscale);
    for (Index j = 1; j < xs.size(); ++j) off += ((xs.head(j).array() - xs[j]).square() * scale).exp().sum();
    return static_cast<double>(xs.size()) + 2.0 * off;
  }
  for (Index j = 0; j < xs.size(); ++j) {
    diag += eval_1d(k, xs[j], xs[j]);
    double col = 0.0;
    for (Index i = 0; i < j; ++i) col += eval_1d(k, xs[i], xs[j]);
    off += col;
  }
  return diag + 2.0 * off;
}

double kernel_bound(const KernelSpec&) { return 1.0; }

}  // namespace funcgen
