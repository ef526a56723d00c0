#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "funcgen/embedding.hpp"
#include "funcgen/error.hpp"
#include "funcgen/synthdata.hpp"
#include "oracles.hpp"

using namespace funcgen;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (const double x : v) out[i++] = x;
  return out;
}

std::vector<EmpiricalEmbedding> random_embeddings(int count, Index n, const KernelSpec& k, std::uint64_t seed) {
  std::vector<EmpiricalEmbedding> out;
  for (int i = 0; i < count; ++i) {
    Environment env;
    env.master_seed = seed;
    const DomainSpec spec = sample_domain_spec(env, static_cast<std::uint64_t>(i));
    out.push_back(embed(sample_inputs(spec, n), k));
  }
  return out;
}

}  // namespace

TEST_CASE("quadrature nodes and weights") {
  const Quadrature q(4);
  CHECK(q.nodes() == vec({0.125, 0.375, 0.625, 0.875}));
  CHECK(q.weight() == 0.25);
  const Quadrature big(1000);
  double total = 0.0;
  for (Index a = 0; a < big.size(); ++a) total += big.weight();
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(Quadrature(0), InvalidArgument);
}

TEST_CASE("embedding evaluation") {
  const KernelSpec k = KernelSpec::gaussian(1.0);
  const EmpiricalEmbedding single = embed(vec({0.4}), k);
  CHECK(single(0.4) == 1.0);
  CHECK(single(0.9) == eval_kernel(k, 0.9, 0.4));
  const EmpiricalEmbedding flat = embed(vec({0.2, 0.8}), KernelSpec::constant());
  for (const double s : {0.0, 0.3, 1.0}) CHECK(flat(s) == 1.0);
  CHECK(embed(vec({0.0, 1.0}), k)(0.5) == doctest::Approx(std::exp(-0.125)).epsilon(1e-15));
  CHECK_THROWS_AS(embed(Vector(0), k), InvalidArgument);
}

TEST_CASE("embeddings on grids") {
  const KernelSpec k = KernelSpec::gaussian(1.0);
  CHECK(embed_on_grid(embed(vec({0.3, 0.6}), KernelSpec::constant()), Quadrature(7)) == Vector::Ones(7));
  CHECK(embed_on_grid(embed(vec({0.5}), k), Quadrature(1)) == Vector::Ones(1));
  const Vector two = embed_on_grid(embed(vec({0.0}), k), Quadrature(2));
  CHECK(two[0] == doctest::Approx(std::exp(-0.03125)).epsilon(1e-15));
  CHECK(two[1] == doctest::Approx(std::exp(-0.28125)).epsilon(1e-15));
}

TEST_CASE("coupling matrix closed forms") {
  const KernelSpec c = KernelSpec::constant();
  const auto one = embed(vec({0.4}), c);
  const Matrix h1 = coupling_matrix({one}, c, Quadrature(10));
  CHECK(h1(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  const Matrix h2 = coupling_matrix({one, embed(vec({0.1, 0.9}), c)}, c, Quadrature(13));
  CHECK((h2 - Matrix::Ones(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(coupling_vector(one, {one}, c, Quadrature(10))[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("coupling matrix matches a direct double sum") {
  const KernelSpec ke = KernelSpec::gaussian(0.1), ks = KernelSpec::gaussian(0.2);
  const auto ms = random_embeddings(4, 30, ke, 8);
  const Quadrature q(25);
  const Matrix h = coupling_matrix(ms, ks, q);
  const double w = q.weight();
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 4; ++j) {
      double ref = 0.0;
      for (Index a = 0; a < q.size(); ++a)
        for (Index b = 0; b < q.size(); ++b)
          ref += w * w * ms[i](q.nodes()[a]) * oracle::gaussian(q.nodes()[a], q.nodes()[b], 0.2) * ms[j](q.nodes()[b]);
      CHECK(h(i, j) == doctest::Approx(ref).epsilon(1e-12));
      CHECK(h(i, j) == h(j, i));
    }
  }
}

TEST_CASE("coupling vector of a training embedding reproduces its row exactly") {
  const KernelSpec ke = KernelSpec::gaussian(0.1);
  const auto ms = random_embeddings(5, 40, ke, 3);
  for (const auto& ks : {KernelSpec::gaussian(0.01), KernelSpec::gaussian(1.0), KernelSpec::periodic(1.0, 1.0)}) {
    const Quadrature q(200);
    const Matrix h = coupling_matrix(ms, ks, q);
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const Vector v = coupling_vector(ms[i], ms, ks, q);
      const Index ii = static_cast<Index>(i);
      CHECK(v[ii] == h(ii, ii));
      for (Index j = 0; j < h.rows(); ++j) CHECK(v[j] == doctest::Approx(h(ii, j)).epsilon(1e-13));
    }
  }
  const CouplingBasis basis(embeddings_on_grid(ms, Quadrature(50)), KernelSpec::gaussian(0.3), Quadrature(50));
  CHECK(basis.coupling_vector(Vector::Zero(50)) == Vector::Zero(5));
}

TEST_CASE("coupling matrix is positive semidefinite") {
  for (const double l : {0.01, 0.1, 1.0, 10.0}) {
    const auto ms = random_embeddings(12, 50, KernelSpec::gaussian(0.1), 17);
    const Matrix h = coupling_matrix(ms, KernelSpec::gaussian(l), Quadrature(300));
    const double lo = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    CHECK(lo >= -1e-8 * h.trace());
  }
}

TEST_CASE("grid refinement") {
  const auto ms = random_embeddings(6, 100, KernelSpec::gaussian(0.1), 21);
  for (const double l : {0.01, 0.1, 1.0, 10.0}) {
    const Matrix h500 = coupling_matrix(ms, KernelSpec::gaussian(l), Quadrature(500));
    const Matrix h1000 = coupling_matrix(ms, KernelSpec::gaussian(l), Quadrature(1000));
    CHECK(((h500 - h1000).array() / h1000.array()).abs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("L2 grid distance") {
  const Quadrature q(1000);
  const Vector t = q.nodes();
  CHECK(l2_grid_distance(t, t, q) == 0.0);
  CHECK(l2_grid_distance(Vector::Ones(1000), Vector::Zero(1000), q) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(l2_grid_distance(t, Vector::Zero(1000), q) - std::sqrt(1.0 / 3.0)) <= 1e-6);
  CHECK_THROWS_AS(l2_grid_distance(t, Vector::Zero(999), q), InvalidArgument);
}

TEST_CASE("squared MMD") {
  const KernelSpec k = KernelSpec::gaussian(1.0);
  const auto a = embed(vec({0.1, 0.5, 0.7}), k);
  CHECK(std::abs(mmd_sq(a, a)) <= 1e-12);
  CHECK(std::abs(mmd_sq(embed(vec({0.0}), k), embed(vec({0.0}), k))) <= 1e-15);
  CHECK(mmd_sq(embed(vec({0.0}), k), embed(vec({1.0}), k)) == doctest::Approx(2.0 - 2.0 * std::exp(-0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(mmd_sq(a, embed(vec({0.1}), KernelSpec::gaussian(2.0))), InvalidArgument);

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    Vector x(7), y(11);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = u(rng);
    CHECK(mmd_sq(embed(x, k), embed(y, k)) >= -1e-12);
  }
}

TEST_CASE("embeddings are bounded by the kernel bound") {
  const Quadrature q(1000);
  for (const auto& k : {KernelSpec::gaussian(0.01), KernelSpec::gaussian(0.1), KernelSpec::periodic(1.0, 1.0)})
    for (const auto& m : random_embeddings(10, 100, k, 2)) CHECK(embed_on_grid(m, q).cwiseAbs().maxCoeff() <= 1.0);
}
