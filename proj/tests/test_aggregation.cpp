#include <doctest.h>

#include <cmath>
#include <random>

#include "support/test_util.hpp"
#include "vsl/aggregation.hpp"

using namespace vsl;
using vsl_test::dans_inequality_holds;
using vsl_test::random_vector;

namespace {

DenseVector make(std::initializer_list<double> values) {
  DenseVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

MultiVectorProblem random_problem(std::mt19937_64& rng, int n_queries, int n_docs,
                                  int k, int dim, Metric metric) {
  MultiVectorProblem problem;
  problem.metric = metric;
  for (int i = 0; i < n_queries; ++i) {
    VectorSet set;
    for (int j = 0; j < k; ++j) set.push_back(random_vector(rng, dim));
    problem.queries.push_back(std::move(set));
  }
  for (int i = 0; i < n_docs; ++i) {
    VectorSet set;
    for (int j = 0; j < 3; ++j) set.push_back(random_vector(rng, dim));
    problem.documents.push_back(std::move(set));
  }
  return problem;
}

}  // namespace

TEST_CASE("chamfer basics") {
  const Metric l2 = Metric::lp(2.0);
  const VectorSet a = {make({1.0, 0.0}), make({0.0, 1.0})};
  const VectorSet b = {make({1.0, 0.0})};

  // Singletons reduce to the primitive distance.
  CHECK(chamfer({make({1.0, 0.0})}, b, l2) == doctest::Approx(0.0));
  CHECK(chamfer(a, b, l2) == doctest::Approx(std::sqrt(2.0)));

  const VectorSet antipodal = {make({1.0, 0.0}), make({-1.0, 0.0})};
  CHECK(chamfer({make({1.0, 0.0})}, antipodal, Metric::cosine()) ==
        doctest::Approx(0.0));

  CHECK_THROWS_AS(chamfer({}, b, l2), std::invalid_argument);
  CHECK_THROWS_AS(chamfer(a, {make({1.0, 0.0, 0.0})}, l2), std::invalid_argument);
}

TEST_CASE("chamfer is asymmetric in general") {
  const Metric l2 = Metric::lp(2.0);
  const VectorSet a = {make({0.0, 0.0}), make({4.0, 0.0})};
  const VectorSet b = {make({1.0, 0.0})};
  CHECK(chamfer(a, b, l2) == doctest::Approx(4.0));
  CHECK(chamfer(b, a, l2) == doctest::Approx(1.0));
}

TEST_CASE("chamfer bounds and singleton reduction") {
  std::mt19937_64 rng(21);
  const Metric l2 = Metric::lp(2.0);
  for (int it = 0; it < 50; ++it) {
    VectorSet a, b;
    for (int i = 0; i < 4; ++i) a.push_back(random_vector(rng, 8));
    for (int i = 0; i < 6; ++i) b.push_back(random_vector(rng, 8));

    double max_pair = 0.0;
    for (const auto& qa : a)
      for (const auto& qb : b) max_pair = std::max(max_pair, lp_distance(qa, qb, 2.0));
    const double value = chamfer(a, b, l2);
    CHECK(value >= 0.0);
    CHECK(value <= static_cast<double>(a.size()) * max_pair + 1e-12);

    double best = lp_distance(a[0], b[0], 2.0);
    for (const auto& qb : b) best = std::min(best, lp_distance(a[0], qb, 2.0));
    CHECK(chamfer({a[0]}, b, l2) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("avg_pool basics and symmetry") {
  const Metric l2 = Metric::lp(2.0);
  const Metric cos = Metric::cosine();
  CHECK(avg_pool({make({1.0, 0.0})}, {make({0.0, 1.0})}, l2) ==
        doctest::Approx(std::sqrt(2.0)));

  // The cancellation pair: distances 0 and 2 average to 1.
  CHECK(avg_pool({make({1.0, 0.0})}, {make({1.0, 0.0}), make({-1.0, 0.0})}, cos) ==
        doctest::Approx(1.0));

  CHECK(avg_pool({make({1.0, 0.0}), make({0.0, 1.0})}, {make({1.0, 0.0})}, l2) ==
        doctest::Approx(std::sqrt(2.0) / 2.0));

  std::mt19937_64 rng(22);
  for (int it = 0; it < 50; ++it) {
    VectorSet a, b;
    for (int i = 0; i < 3; ++i) a.push_back(random_vector(rng, 8));
    for (int i = 0; i < 5; ++i) b.push_back(random_vector(rng, 8));
    CHECK(avg_pool(a, b, l2) == avg_pool(b, a, l2));
  }
}

TEST_CASE("induced_instance dedups bitwise") {
  const DenseVector shared = make({1.0, 2.0});
  MultiVectorProblem problem;
  problem.metric = Metric::lp(2.0);
  problem.queries = {{shared, make({0.0, 1.0})}, {shared, make({3.0, 1.0})}};
  problem.documents = {{make({5.0, 5.0})}};

  const auto [queries, docs] = induced_instance(problem);
  CHECK(queries.size() == 3);  // shared vector appears once
  CHECK(docs.size() == 1);

  MultiVectorProblem disjoint;
  disjoint.metric = Metric::lp(2.0);
  disjoint.queries = {{make({1.0, 0.0}), make({2.0, 0.0})},
                      {make({3.0, 0.0}), make({4.0, 0.0})}};
  disjoint.documents = {{make({9.0, 0.0})}};
  CHECK(induced_instance(disjoint).first.size() == 4);

  MultiVectorProblem singleton;
  singleton.metric = Metric::lp(2.0);
  singleton.queries = {{make({1.0, 0.0})}};
  singleton.documents = {{make({0.0, 1.0})}};
  const auto [q1, d1] = induced_instance(singleton);
  CHECK(q1.size() == 1);
  CHECK(d1.size() == 1);
  CHECK(q1[0] == singleton.queries[0][0]);
}

TEST_CASE("agg_distance_matrix matches per-pair recomputation") {
  std::mt19937_64 rng(23);
  MultiVectorProblem problem = random_problem(rng, 10, 50, 2, 6, Metric::lp(2.0));

  for (Aggregation agg : {Aggregation::chamfer, Aggregation::avg_pool}) {
    const Eigen::MatrixXd matrix = agg_distance_matrix(problem, agg, 2);
    REQUIRE(matrix.rows() == 10);
    REQUIRE(matrix.cols() == 50);
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
      for (Eigen::Index j = 0; j < matrix.cols(); ++j)
        CHECK(matrix(i, j) ==
              aggregate(agg, problem.queries[static_cast<std::size_t>(i)],
                        problem.documents[static_cast<std::size_t>(j)],
                        problem.metric));
  }

  MultiVectorProblem tiny;
  tiny.metric = Metric::lp(2.0);
  tiny.queries = {{make({0.0, 0.0})}};
  tiny.documents = {{make({3.0, 4.0})}};
  const Eigen::MatrixXd cell = agg_distance_matrix(tiny, Aggregation::chamfer);
  REQUIRE(cell.rows() == 1);
  REQUIRE(cell.cols() == 1);
  CHECK(cell(0, 0) == doctest::Approx(5.0));

  // Identical documents give constant rows.
  MultiVectorProblem constant = random_problem(rng, 4, 1, 2, 6, Metric::lp(2.0));
  constant.documents = {constant.documents[0], constant.documents[0],
                        constant.documents[0]};
  const Eigen::MatrixXd rows = agg_distance_matrix(constant, Aggregation::avg_pool);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    CHECK(rows(i, 0) == rows(i, 1));
    CHECK(rows(i, 1) == rows(i, 2));
  }
}

TEST_CASE("positive-sequence sum ratio bound on random sequences") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> positive(0.01, 5.0);
  for (int it = 0; it < 1000; ++it) {
    std::vector<double> a(8), b(8);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = positive(rng);
      b[i] = positive(rng);
    }
    CHECK(dans_inequality_holds(a, b));
  }
}

TEST_CASE("sum ratio bound over per-query chamfer terms") {
  std::mt19937_64 rng(25);
  const Metric l2 = Metric::lp(2.0);
  for (int it = 0; it < 100; ++it) {
    VectorSet q, d1, d2;
    for (int i = 0; i < 5; ++i) q.push_back(random_vector(rng, 8));
    for (int i = 0; i < 4; ++i) d1.push_back(random_vector(rng, 8));
    for (int i = 0; i < 4; ++i) d2.push_back(random_vector(rng, 8));
    // Chamfer(Q,D1)/Chamfer(Q,D2) is bracketed by the per-term ratios.
    CHECK(dans_inequality_holds(chamfer_terms(q, d1, l2), chamfer_terms(q, d2, l2)));
  }
}

TEST_CASE("check_problem rejects malformed problems") {
  MultiVectorProblem problem;
  problem.metric = Metric::lp(2.0);
  problem.queries = {{make({1.0, 0.0})}, {make({1.0, 0.0}), make({0.0, 1.0})}};
  problem.documents = {{make({1.0, 0.0})}};
  CHECK_THROWS_AS(check_problem(problem), std::invalid_argument);  // unequal k

  MultiVectorProblem ragged;
  ragged.metric = Metric::lp(2.0);
  ragged.queries = {{make({1.0, 0.0})}};
  ragged.documents = {{make({1.0, 0.0, 0.0})}};
  CHECK_THROWS_AS(check_problem(ragged), std::invalid_argument);
}
