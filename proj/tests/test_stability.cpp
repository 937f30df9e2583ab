#include <doctest.h>

#include <cmath>
#include <random>

#include "support/test_util.hpp"
#include "vsl/generators.hpp"
#include "vsl/stability.hpp"

using namespace vsl;
using vsl_test::random_vector;

TEST_CASE("relvar hand values") {
  CHECK(relvar(std::vector<double>{2.0, 2.0, 2.0}) == 0.0);
  CHECK(relvar(std::vector<double>{1.0, 3.0}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(relvar(std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(relvar(std::vector<double>{0.0, 0.0}), DataError);
  CHECK_THROWS_AS(relvar(std::vector<double>{1.0, -1.0}), DataError);
}

TEST_CASE("relvar of pooled iid gaussian distances decays with dimension") {
  // Monte Carlo oracle: 1000 independent pairs per dimension.
  std::mt19937_64 rng(31);
  const auto pooled_relvar = [&](int m) {
    std::vector<double> distances(1000);
    for (auto& d : distances)
      d = lp_distance(random_vector(rng, m), random_vector(rng, m), 2.0);
    return relvar(distances);
  };
  const double low_dim = pooled_relvar(64);
  const double high_dim = pooled_relvar(4096);
  CHECK(high_dim < low_dim / 10.0);
}

TEST_CASE("relvar is scale invariant") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> value(0.1, 9.0);
  std::vector<double> sample(200);
  for (auto& v : sample) v = value(rng);
  const double base = relvar(sample);
  for (double c : {0.001, 3.0, 1e6}) {
    std::vector<double> scaled = sample;
    for (auto& v : scaled) v *= c;
    CHECK(relvar(scaled) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("stability_ratio") {
  CHECK(stability_ratio(std::vector<double>{1.0, 2.0, 4.0}) == doctest::Approx(4.0));
  CHECK(stability_ratio(std::vector<double>{3.0, 3.0, 3.0}) == 1.0);
  CHECK_THROWS_AS(stability_ratio(std::vector<double>{1.0, 0.0}), DataError);
  CHECK_THROWS_AS(stability_ratio(std::vector<double>{}), std::invalid_argument);

  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> value(0.5, 7.0);
  std::vector<double> sample(50);
  for (auto& v : sample) v = value(rng);
  const double base = stability_ratio(sample);
  CHECK(base >= 1.0);
  std::vector<double> scaled = sample;
  for (auto& v : scaled) v *= 42.0;
  CHECK(stability_ratio(scaled) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("strong_stability_constant") {
  const auto make = [](double a, double b) {
    DenseVector v(2);
    v << a, b;
    return v;
  };
  // Per-query pools {1,3} and {1,2}: ratios 3 and 2, constant 2.
  const std::vector<DenseVector> queries = {make(0.0, 0.0), make(0.0, 1.0)};
  const std::vector<DenseVector> docs = {make(1.0, 0.0), make(3.0, 0.0)};
  const double q0 = stability_ratio(std::vector<double>{1.0, 3.0});
  const double q1 =
      stability_ratio(std::vector<double>{std::sqrt(2.0), std::sqrt(10.0)});
  const double expected = std::min(q0, q1);
  CHECK(strong_stability_constant(queries, docs, Metric::lp(2.0)) ==
        doctest::Approx(expected).epsilon(1e-12));

  // One query: its own ratio.
  const std::vector<DenseVector> lone_query = {queries[0]};
  CHECK(strong_stability_constant(lone_query, docs, Metric::lp(2.0)) ==
        doctest::Approx(q0).epsilon(1e-12));

  // A duplicate of the query in the database is an error, not infinity.
  const std::vector<DenseVector> duplicated = {docs[0]};
  CHECK_THROWS_AS(strong_stability_constant(duplicated, docs, Metric::lp(2.0)),
                  DataError);

  // The constant never exceeds any per-query ratio.
  std::mt19937_64 rng(34);
  std::vector<DenseVector> rq, rd;
  for (int i = 0; i < 6; ++i) rq.push_back(random_vector(rng, 8));
  for (int i = 0; i < 30; ++i) rd.push_back(random_vector(rng, 8));
  const double c = strong_stability_constant(rq, rd, Metric::lp(2.0));
  for (const auto& q : rq) {
    std::vector<double> pool;
    for (const auto& d : rd) pool.push_back(lp_distance(q, d, 2.0));
    CHECK(c <= stability_ratio(pool) + 1e-12);
  }
}

TEST_CASE("stability_sweep on the equal-component construction is dimension-free") {
  const DatasetGenerator generator = [](int dim) {
    auto all = gen_equal_component(600, dim, 7);
    SweepDataset data;
    data.queries.assign(all.begin(), all.begin() + 100);
    data.docs.assign(all.begin() + 100, all.end());
    return data;
  };
  const std::vector<int> dims = {16, 256, 4096};
  const auto reports = stability_sweep(
      generator, dims,
      [](const DenseVector& a, const DenseVector& b) { return lp_distance(a, b, 2.0); },
      "equal-component");
  REQUIRE(reports.size() == 3);
  double lo = reports[0].relvar, hi = reports[0].relvar;
  for (const auto& r : reports) {
    lo = std::min(lo, r.relvar);
    hi = std::max(hi, r.relvar);
  }
  CHECK(hi / lo < 2.0);
}

TEST_CASE("stability_sweep on iid gaussians decays, and is seed-deterministic") {
  const auto make_generator = [](std::uint64_t seed) {
    return DatasetGenerator([seed](int dim) {
      auto all = gen_iid_gaussian(550, dim, seed);
      SweepDataset data;
      data.queries.assign(all.begin(), all.begin() + 50);
      data.docs.assign(all.begin() + 50, all.end());
      return data;
    });
  };
  const std::vector<int> dims = {64, 1024};
  const PairDistance l2 = [](const DenseVector& a, const DenseVector& b) {
    return lp_distance(a, b, 2.0);
  };
  const auto first = stability_sweep(make_generator(99), dims, l2, "iid", 2);
  CHECK(first[1].relvar < first[0].relvar);
  CHECK(quantile(first[1].per_query_ratio, 0.5) <
        quantile(first[0].per_query_ratio, 0.5));

  // Same seed, different thread count: bitwise-identical reports.
  const auto second = stability_sweep(make_generator(99), dims, l2, "iid", 1);
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].relvar == second[i].relvar);
    CHECK(first[i].per_query_ratio == second[i].per_query_ratio);
  }

  const auto other_seed = stability_sweep(make_generator(100), dims, l2, "iid", 1);
  CHECK(other_seed[0].relvar != first[0].relvar);
}

TEST_CASE("stability_verdict") {
  const auto reports_from = [](std::vector<double> relvars) {
    std::vector<StabilityReport> reports;
    int dim = 16;
    for (double rv : relvars) {
      StabilityReport r;
      r.dimension = dim;
      r.relvar = rv;
      dim *= 4;
      reports.push_back(r);
    }
    return reports;
  };
  CHECK(stability_verdict(reports_from({0.20, 0.19, 0.21}), 0.01) ==
        Verdict::stable_evidence);
  CHECK(stability_verdict(reports_from({0.10, 0.01, 0.001}), 0.01) ==
        Verdict::unstable_evidence);
  CHECK_THROWS_AS(stability_verdict(reports_from({0.10}), 0.01),
                  std::invalid_argument);
  // A >10% bump breaks monotonicity even when the tail is tiny.
  CHECK(stability_verdict(reports_from({0.001, 0.01, 0.001}), 0.01) ==
        Verdict::stable_evidence);
}

TEST_CASE("make_stability_report drops emptied rows and pools the rest") {
  std::vector<std::vector<double>> per_query = {{1.0, 2.0}, {}, {2.0, 6.0}};
  const StabilityReport report = make_stability_report(32, "cell", per_query, 2);
  CHECK(report.n_queries == 3);
  REQUIRE(report.per_query_ratio.size() == 2);
  CHECK(report.per_query_ratio[0] == doctest::Approx(2.0));
  CHECK(report.per_query_ratio[1] == doctest::Approx(3.0));
  CHECK(report.relvar ==
        doctest::Approx(relvar(std::vector<double>{1.0, 2.0, 2.0, 6.0})));
  CHECK(report.config_label == "cell");
}

TEST_CASE("quantile") {
  const std::vector<double> sample = {4.0, 1.0, 3.0, 2.0};
  CHECK(quantile(sample, 0.0) == 1.0);
  CHECK(quantile(sample, 1.0) == 4.0);
  CHECK(quantile(sample, 0.5) == doctest::Approx(2.5));
  CHECK(quantile(std::vector<double>{5.0}, 0.5) == 5.0);
  CHECK_THROWS_AS(quantile(std::vector<double>{}, 0.5), std::invalid_argument);
}
