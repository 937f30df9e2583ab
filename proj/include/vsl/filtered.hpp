#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vsl/vectors.hpp"

namespace vsl {

using AttributeSet = std::set<std::string>;

struct FilteredPoint {
  DenseVector vector;
  AttributeSet attrs;
};

// subset_match: A_q is a subset of A_d.
// exact_match:  A_q equals A_d.
// range_match:  A_q encodes a numeric interval [lo, hi] that must contain
//               the document's single numeric attribute.
enum class FilterKind { subset_match, exact_match, range_match };

bool filter_match(const AttributeSet& q_attrs, const AttributeSet& d_attrs,
                  FilterKind kind);

// Additive mismatch penalty. Hard filtering (infinite alpha) is a
// distinguished mode, never a floating-point infinity: excluded points are
// dropped from distance pools rather than polluting the statistics.
struct Penalty {
  double alpha = 0.0;
  bool hard = false;

  static Penalty finite(double alpha);
  static Penalty infinite();
};

// delta(q, d) + alpha when the filters mismatch, delta(q, d) when they
// match; nullopt marks a point excluded by hard filtering.
std::optional<double> penalized_distance(const FilteredPoint& q,
                                         const FilteredPoint& d,
                                         const Metric& metric, FilterKind kind,
                                         const Penalty& penalty);

// Top-k by penalized distance ascending, ties broken by ascending index.
// Under hard filtering, excluded points never appear; fewer than k survivors
// returns all of them.
std::vector<std::pair<int, double>> filtered_search(
    const FilteredPoint& q, std::span<const FilteredPoint> db,
    const Metric& metric, FilterKind kind, const Penalty& penalty, int k);

}  // namespace vsl
