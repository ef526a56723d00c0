#pragma once

#include <string>

#include "funcgen/types.hpp"

namespace funcgen {

enum class KernelFamily { gaussian, periodic, constant };

/// A positive-definite kernel on [0,1]^d.
///
///   gaussian:  exp(-|x-y|^2 / (2 l^2))
///   periodic:  exp(-2 sin^2(pi |x-y| / p) / l^2)      (d = 1 only)
///   constant:  1
///
/// All three families have unit diagonal.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double lengthscale = 1.0;
  double period = 1.0;

  static KernelSpec gaussian(double l);
  static KernelSpec periodic(double l, double p);
  static KernelSpec constant();

  /// Throws InvalidArgument when l <= 0 or p <= 0 (periodic).
  void validate() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);
std::string describe(const KernelSpec& k);

double eval_kernel(const KernelSpec& k, PointRef x, PointRef y);
double eval_kernel(const KernelSpec& k, double x, double y);

/// Symmetric Gram matrix over the rows of xs.
Matrix gram(const KernelSpec& k, const Points& xs);

/// Rectangular kernel matrix: result(i, j) = k(xs_i, ys_j).
Matrix cross_gram(const KernelSpec& k, const Points& xs, const Points& ys);

/// sum_ij k(x_i, y_j) for one-dimensional samples, without materializing the matrix.
double kernel_sum(const KernelSpec& k, const Vector& xs, const Vector& ys);
/// sum_ij k(x_i, x_j), using symmetry.
double kernel_self_sum(const KernelSpec& k, const Vector& xs);

/// sup_x |k(x, x)|.
double kernel_bound(const KernelSpec& k);

}  // namespace funcgen
