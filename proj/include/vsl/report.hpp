#pragma once

#include <array>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace vsl {

// The published statistic vocabulary. Rows can only be built from this enum,
// so an unknown statistic name cannot reach a CSV.
enum class Statistic {
  relvar,
  ratio_median,
  ratio_p10,
  recall_at_10,
  c,
  nondegeneracy_rate,
  cov_sum,
  rho,
  gamma,
  pi_hat,
  tau,
  X,
  Y,
  gap,
  relvar_bound,
  p_mismatch,
};

inline constexpr std::array<Statistic, 16> kAllStatistics = {
    Statistic::relvar,       Statistic::ratio_median, Statistic::ratio_p10,
    Statistic::recall_at_10, Statistic::c,            Statistic::nondegeneracy_rate,
    Statistic::cov_sum,      Statistic::rho,          Statistic::gamma,
    Statistic::pi_hat,       Statistic::tau,          Statistic::X,
    Statistic::Y,            Statistic::gap,          Statistic::relvar_bound,
    Statistic::p_mismatch,
};

std::string_view to_string(Statistic statistic);

struct ReportRow {
  std::string config_label;
  int dimension = 0;
  Statistic statistic = Statistic::relvar;
  double value = 0.0;
  long n = 0;  // sample size behind the value
};

// RFC-4180 CSV: header always present, \n line endings, fields quoted when
// needed, doubles in shortest round-trip form. Without the deterministic
// flag a timestamp comment line precedes the header.
void write_csv(std::ostream& out, std::span<const ReportRow> rows,
               bool deterministic);

std::string format_double(double value);

}  // namespace vsl
