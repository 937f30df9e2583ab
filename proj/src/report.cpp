#include "vsl/report.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <stdexcept>

namespace vsl {

std::string_view to_string(Statistic statistic) {
  switch (statistic) {
    case Statistic::relvar: return "relvar";
    case Statistic::ratio_median: return "ratio_median";
    case Statistic::ratio_p10: return "ratio_p10";
    case Statistic::recall_at_10: return "recall_at_10";
    case Statistic::c: return "c";
    case Statistic::nondegeneracy_rate: return "nondegeneracy_rate";
    case Statistic::cov_sum: return "cov_sum";
    case Statistic::rho: return "rho";
    case Statistic::gamma: return "gamma";
    case Statistic::pi_hat: return "pi_hat";
    case Statistic::tau: return "tau";
    case Statistic::X: return "X";
    case Statistic::Y: return "Y";
    case Statistic::gap: return "gap";
    case Statistic::relvar_bound: return "relvar_bound";
    case Statistic::p_mismatch: return "p_mismatch";
  }
  throw std::logic_error("to_string(Statistic): unknown value");
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::logic_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

namespace {

std::string csv_escape(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void write_csv(std::ostream& out, std::span<const ReportRow> rows,
               bool deterministic) {
  if (!deterministic) {
    const std::time_t now =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[64];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    out << "# generated " << stamp << "\n";
  }
  out << "config_label,dimension,statistic,value,n\n";
  for (const auto& row : rows) {
    out << csv_escape(row.config_label) << ',' << row.dimension << ','
        << to_string(row.statistic) << ',' << format_double(row.value) << ','
        << row.n << '\n';
  }
}

}  // namespace vsl
