#include "vsl/filtered.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vsl {

namespace {

double parse_numeric_attr(const std::string& token) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &consumed);
  } catch (const std::exception&) {
    throw DataError("range filter: non-numeric attribute token '" + token + "'");
  }
  if (consumed != token.size())
    throw DataError("range filter: non-numeric attribute token '" + token + "'");
  return value;
}

bool range_match(const AttributeSet& q_attrs, const AttributeSet& d_attrs) {
  if (q_attrs.empty())
    throw DataError("range filter: query interval is empty");
  if (d_attrs.size() != 1)
    throw DataError("range filter: document must carry exactly one numeric attribute");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& token : q_attrs) {
    const double v = parse_numeric_attr(token);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double value = parse_numeric_attr(*d_attrs.begin());
  return lo <= value && value <= hi;
}

}  // namespace

bool filter_match(const AttributeSet& q_attrs, const AttributeSet& d_attrs,
                  FilterKind kind) {
  switch (kind) {
    case FilterKind::subset_match:
      return std::includes(d_attrs.begin(), d_attrs.end(), q_attrs.begin(),
                           q_attrs.end());
    case FilterKind::exact_match:
      return q_attrs == d_attrs;
    case FilterKind::range_match:
      return range_match(q_attrs, d_attrs);
  }
  throw std::logic_error("filter_match: unknown kind");
}

Penalty Penalty::finite(double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("Penalty: alpha must be >= 0");
  return Penalty{alpha, false};
}

Penalty Penalty::infinite() { return Penalty{0.0, true}; }

std::optional<double> penalized_distance(const FilteredPoint& q,
                                         const FilteredPoint& d,
                                         const Metric& metric, FilterKind kind,
                                         const Penalty& penalty) {
  const bool match = filter_match(q.attrs, d.attrs, kind);
  const double base = metric_distance(metric, q.vector, d.vector);
  if (match) return base;
  if (penalty.hard) return std::nullopt;
  return base + penalty.alpha;
}

std::vector<std::pair<int, double>> filtered_search(
    const FilteredPoint& q, std::span<const FilteredPoint> db,
    const Metric& metric, FilterKind kind, const Penalty& penalty, int k) {
  if (db.empty()) throw std::invalid_argument("filtered_search: empty database");
  if (k < 1) throw std::invalid_argument("filtered_search: k must be >= 1");

  std::vector<std::pair<int, double>> survivors;
  survivors.reserve(db.size());
  for (std::size_t i = 0; i < db.size(); ++i) {
    const auto dist = penalized_distance(q, db[i], metric, kind, penalty);
    if (dist) survivors.emplace_back(static_cast<int>(i), *dist);
  }
  std::sort(survivors.begin(), survivors.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second < b.second;
              return a.first < b.first;
            });
  if (survivors.size() > static_cast<std::size_t>(k)) survivors.resize(k);
  return survivors;
}

}  // namespace vsl
