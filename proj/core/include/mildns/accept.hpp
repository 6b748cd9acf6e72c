#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mildns {

struct CriterionResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // worst observed value, compared against `allowed`
  double allowed = 0.0;
  std::string detail;      // free-form: fitted slopes, iteration counts, ...
  double seconds = 0.0;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  double seconds = 0.0;
  bool all_passed() const;
  int failures() const;
};

/// Runs every acceptance criterion at the given level ("quick" shrinks grids
/// and horizons, "full" uses the release sizes).  Never throws: a criterion
/// that raises is recorded as failed with the message in `detail`.
AcceptanceReport acceptance_suite(const std::string& level);

/// One line per criterion plus a summary; returns report.failures().
int print_report(const AcceptanceReport& report, std::ostream& os);

}  // namespace mildns
