#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "funcgen/error.hpp"
#include "funcgen/ridge.hpp"
#include "oracles.hpp"

using namespace funcgen;

namespace {

Vector uniform(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double train_mse(const RkhsFunction& f, const Vector& xs, const Vector& ys) {
  return (krr_eval(f, xs) - ys).squaredNorm() / static_cast<double>(xs.size());
}

}  // namespace

TEST_CASE("one-point fits") {
  const KernelSpec k = KernelSpec::gaussian(1.0);
  const Vector x = Vector::Zero(1), y = Vector::Ones(1);
  const RkhsFunction f = krr_fit(x, y, k, 1.0);
  CHECK(f.weights()[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(krr_fit(x, y, k, 1e-12)(0.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("strong shrinkage drives the fit to zero") {
  std::mt19937_64 rng(1);
  const Vector xs = uniform(30, rng);
  const Vector ys = xs.array().sin() + 2.0;
  const RkhsFunction f = krr_fit(xs, ys, KernelSpec::gaussian(0.2), 1e9);
  const Vector grid = Vector::LinSpaced(101, 0.0, 1.0);
  CHECK(krr_eval(f, grid).cwiseAbs().maxCoeff() <= 1e-6 * ys.cwiseAbs().maxCoeff());
}

TEST_CASE("evaluation examples and RKHS norms") {
  const KernelSpec k = KernelSpec::gaussian(1.0);
  const RkhsFunction zero(k);
  const Vector pts = (Vector(2) << 0.2, 0.7).finished();
  CHECK(krr_eval(zero, pts) == Vector::Zero(2));
  CHECK(rkhs_norm_sq(zero) == 0.0);

  const RkhsFunction f(k, Points::Constant(1, 1, 0.5), Vector::Constant(1, 2.0));
  CHECK(krr_eval(f, Vector::Constant(1, 0.5))[0] == 2.0);
  CHECK(krr_eval(f, Vector::Constant(1, 1.0))[0] == doctest::Approx(1.764993805169191).epsilon(1e-14));
  CHECK(rkhs_norm_sq(f) == 4.0);
  CHECK(rkhs_norm_sq(RkhsFunction(KernelSpec::periodic(0.3, 2.0), Points::Constant(1, 1, 0.5),
                                  Vector::Constant(1, 2.0))) == 4.0);

  Points c(2, 1);
  c << 0.0, 1.0;
  CHECK(rkhs_norm_sq(RkhsFunction(k, c, Vector::Ones(2))) == doctest::Approx(3.2130613194252668).epsilon(1e-14));
}

TEST_CASE("effective dimension examples") {
  CHECK(effective_dimension(Matrix::Ones(1, 1), 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(effective_dimension(Matrix::Identity(2, 2), 1e-12) == doctest::Approx(2.0).epsilon(1e-11));
  // Eigenvalues {2, 1} in a rotated basis.
  const double s = std::sqrt(0.5);
  Matrix q(2, 2);
  q << s, -s, s, s;
  const Matrix K = q * Eigen::Vector2d(2.0, 1.0).asDiagonal() * q.transpose();
  CHECK(std::abs(effective_dimension(K, 2.0) - 5.0 / 6.0) <= 1e-12);
}

TEST_CASE("effective dimension decreases and is bounded by rank") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const Vector xs = uniform(15, rng);
    const Matrix K = gram(KernelSpec::gaussian(0.05 + 0.05 * t), xs);
    const Index rank = Eigen::FullPivLU<Matrix>(K).rank();
    double prev = std::numeric_limits<double>::infinity();
    for (int e = -8; e <= 2; ++e) {
      const double g = effective_dimension(K, std::pow(10.0, e));
      CHECK(g < prev);
      CHECK(g <= static_cast<double>(rank) + 1e-12);
      prev = g;
    }
  }
}

TEST_CASE("weights match a Gauss-Jordan solve") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> size(1, 20);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const Index n = size(rng);
    const double l = 0.05 + u(rng);
    const double lambda = std::pow(10.0, -3.0 + 3.0 * u(rng));
    const Vector xs = uniform(n, rng), ys = uniform(n, rng);
    const RkhsFunction f = krr_fit(xs, ys, KernelSpec::gaussian(l), lambda);
    const auto w = oracle::krr_weights({xs.begin(), xs.end()}, {ys.begin(), ys.end()}, l, lambda);
    CHECK(oracle::max_rel_err({f.weights().begin(), f.weights().end()}, w) <= 1e-8);
  }
}

TEST_CASE("noiseless labels are recovered with tiny lambda") {
  std::mt19937_64 rng(9);
  const KernelSpec k = KernelSpec::gaussian(0.3);
  const RkhsFunction truth(k, uniform(5, rng), (Vector(5) << 1.0, -0.5, 0.3, 0.8, -1.2).finished());
  const Vector xs = uniform(50, rng);
  const Vector ys = krr_eval(truth, xs);
  const RkhsFunction f = krr_fit(xs, ys, k, 1e-8);
  CHECK((krr_eval(f, xs) - ys).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("regularization path is monotone") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 0.1);
  const Vector xs = uniform(40, rng);
  Vector ys = (6.0 * xs.array()).sin();
  for (auto& y : ys) y += noise(rng);
  for (const auto& k : {KernelSpec::gaussian(0.1), KernelSpec::periodic(1.0, 1.0)}) {
    double prev_res = -1.0, prev_norm = std::numeric_limits<double>::infinity();
    for (int e = -5; e <= 1; ++e) {
      const RkhsFunction f = krr_fit(xs, ys, k, std::pow(10.0, e));
      const double res = train_mse(f, xs, ys), norm = rkhs_norm_sq(f);
      CHECK(res >= prev_res - 1e-12);
      CHECK(norm <= prev_norm + 1e-12);
      prev_res = res;
      prev_norm = norm;
    }
  }
}

TEST_CASE("jitter rescues a singular system and gives up past its cap") {
  // Two identical points with a vanishing ridge: K + lambda I is numerically singular.
  const Vector xs = Vector::Constant(3, 0.4);
  const Vector ys = Vector::Ones(3);
  const RkhsFunction f = krr_fit(xs, ys, KernelSpec::gaussian(1.0), 1e-300);
  CHECK(std::isfinite(f(0.4)));
  CHECK(f(0.4) == doctest::Approx(1.0).epsilon(1e-4));

  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(SpdFactor(bad, 1.0), NumericalError);
}

TEST_CASE("fitting errors") {
  const Vector xs = Vector::Zero(2);
  CHECK_THROWS_AS(krr_fit(xs, Vector::Zero(3), KernelSpec::gaussian(1.0), 1.0), InvalidArgument);
  CHECK_THROWS_AS(krr_fit(xs, Vector::Zero(2), KernelSpec::gaussian(1.0), 0.0), InvalidArgument);
  CHECK_THROWS_AS(krr_fit(xs, Vector::Zero(2), KernelSpec::gaussian(1.0), -1.0), InvalidArgument);
}
