#include <doctest.h>

#include <cmath>
#include <random>

#include "support/test_util.hpp"
#include "vsl/vectors.hpp"

using namespace vsl;
using vsl_test::random_sparse;
using vsl_test::random_vector;

namespace {

DenseVector make(std::initializer_list<double> values) {
  DenseVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("lp_distance basic values") {
  const DenseVector x = make({1.0, 0.0});
  const DenseVector y = make({0.0, 1.0});
  CHECK(lp_distance(x, x, 2.0) == 0.0);
  CHECK(lp_distance(x, y, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(lp_distance(x, y, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lp_distance(x, y, 2.0) == lp_distance(y, x, 2.0));
}

TEST_CASE("lp_distance rejects bad input") {
  const DenseVector x = make({1.0, 0.0});
  CHECK_THROWS_AS(lp_distance(x, make({1.0}), 2.0), std::invalid_argument);
  CHECK_THROWS_AS(lp_distance(x, x, 0.5), std::invalid_argument);
  DenseVector bad = x;
  bad[0] = std::nan("");
  CHECK_THROWS_AS(lp_distance(x, bad, 2.0), std::invalid_argument);
}

TEST_CASE("lp triangle inequality on random triples") {
  std::mt19937_64 rng(11);
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    for (int it = 0; it < 200; ++it) {
      const DenseVector a = random_vector(rng, 16);
      const DenseVector b = random_vector(rng, 16);
      const DenseVector c = random_vector(rng, 16);
      CHECK(lp_distance(a, c, p) <=
            lp_distance(a, b, p) + lp_distance(b, c, p) + 1e-9);
    }
  }
}

TEST_CASE("cosine_distance basic values") {
  const DenseVector x = make({1.0, 0.0});
  CHECK(cosine_distance(x, x) == 0.0);
  CHECK(cosine_distance(x, make({-1.0, 0.0})) == doctest::Approx(2.0));
  CHECK(cosine_distance(x, make({0.0, 1.0})) == doctest::Approx(1.0));
  CHECK_THROWS_AS(cosine_distance(x, make({0.0, 0.0})), std::invalid_argument);
}

TEST_CASE("cosine_distance range and scale invariance") {
  std::mt19937_64 rng(12);
  for (int it = 0; it < 300; ++it) {
    const DenseVector a = random_vector(rng, 8);
    const DenseVector b = random_vector(rng, 8);
    const double d = cosine_distance(a, b);
    CHECK(d >= 0.0);
    CHECK(d <= 2.0);
    CHECK(cosine_distance(a, DenseVector(3.7 * a)) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("normalize") {
  const DenseVector v = normalize(make({3.0, 4.0}), 2.0);
  CHECK(v[0] == doctest::Approx(0.6));
  CHECK(v[1] == doctest::Approx(0.8));

  const DenseVector u = normalize(v, 2.0);  // already unit norm
  CHECK((u - v).norm() < 1e-6);

  const DenseVector w = normalize(make({2.0, 2.0}), 1.0);
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK(w[1] == doctest::Approx(0.5));

  CHECK_THROWS_AS(normalize(make({0.0, 0.0}), 2.0), std::invalid_argument);

  std::mt19937_64 rng(13);
  for (double p : {1.0, 1.5, 2.0}) {
    const DenseVector r = normalize(random_vector(rng, 32), p);
    CHECK(lp_norm(r, p) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("split_signed definition") {
  const DenseVector out = split_signed(make({1.0, -2.0}));
  REQUIRE(out.size() == 4);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 0.0);
  CHECK(out[3] == 2.0);

  const DenseVector nonneg = make({0.5, 2.0, 0.0});
  const DenseVector split = split_signed(nonneg);
  CHECK(split.head(3) == nonneg);
  CHECK(split.tail(3).isZero(0.0));
}

TEST_CASE("split_signed preserves lp norms") {
  std::mt19937_64 rng(14);
  for (double p : {1.0, 1.5, 2.0}) {
    for (int it = 0; it < 100; ++it) {
      const DenseVector x = random_vector(rng, 24);
      CHECK(lp_norm(split_signed(x), p) == doctest::Approx(lp_norm(x, p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("split_signed is bi-Lipschitz over random pairs") {
  std::mt19937_64 rng(15);
  for (double p : {1.0, 1.5, 2.0}) {
    const double lower = std::pow(2.0, -(1.0 - 1.0 / p));
    const double upper = std::pow(2.0, 1.0 / p);
    for (int it = 0; it < 1000; ++it) {
      const DenseVector x = random_vector(rng, 12);
      const DenseVector y = random_vector(rng, 12);
      const double base = lp_distance(x, y, p);
      const double mapped = lp_distance(split_signed(x), split_signed(y), p);
      CHECK(mapped >= lower * base - 1e-9);
      CHECK(mapped <= upper * base + 1e-9);
    }
  }
}

TEST_CASE("sparse_lp_distance basics") {
  SparseVector x;
  x.dim = 10;
  x.indices = {1, 4};
  x.values = {2.0, 1.0};
  SparseVector y;
  y.dim = 10;
  y.indices = {2, 7};
  y.values = {3.0, 4.0};

  CHECK(sparse_lp_distance(x, x, 2.0) == 0.0);
  // Disjoint supports: Pythagorean combination of the two norms.
  const double expected = std::sqrt(std::pow(sparse_lp_norm(x, 2.0), 2) +
                                    std::pow(sparse_lp_norm(y, 2.0), 2));
  CHECK(sparse_lp_distance(x, y, 2.0) == doctest::Approx(expected).epsilon(1e-12));

  SparseVector z = y;
  z.dim = 11;
  CHECK_THROWS_AS(sparse_lp_distance(x, z, 2.0), std::invalid_argument);
}

TEST_CASE("sparse_lp_distance matches the dense oracle") {
  std::mt19937_64 rng(16);
  for (double p : {1.0, 1.5, 2.0}) {
    for (int it = 0; it < 200; ++it) {
      const SparseVector x = random_sparse(rng, 40, 7);
      const SparseVector y = random_sparse(rng, 40, 12);
      const double direct = sparse_lp_distance(x, y, p);
      const double via_dense = lp_distance(densify(x), densify(y), p);
      CHECK(direct == doctest::Approx(via_dense).epsilon(1e-9));
    }
  }
}

TEST_CASE("check_sparse invariants") {
  SparseVector ok;
  ok.dim = 5;
  ok.indices = {0, 3};
  ok.values = {1.0, 2.0};
  CHECK_NOTHROW(check_sparse(ok));

  SparseVector unsorted = ok;
  unsorted.indices = {3, 0};
  CHECK_THROWS_AS(check_sparse(unsorted), DataError);

  SparseVector zero_value = ok;
  zero_value.values = {1.0, 0.0};
  CHECK_THROWS_AS(check_sparse(zero_value), DataError);

  SparseVector out_of_range = ok;
  out_of_range.indices = {0, 5};
  CHECK_THROWS_AS(check_sparse(out_of_range), DataError);
}

TEST_CASE("matrix round trip") {
  std::mt19937_64 rng(17);
  std::vector<DenseVector> points;
  for (int i = 0; i < 9; ++i) points.push_back(random_vector(rng, 6));
  const PointMatrix m = to_matrix(points);
  const auto back = to_vectors(m);
  REQUIRE(back.size() == points.size());
  for (std::size_t i = 0; i < points.size(); ++i) CHECK(back[i] == points[i]);
}
