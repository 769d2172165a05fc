#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "distort/distribution.hpp"
#include "distort/joint.hpp"

namespace distort {

// One computed-vs-expected comparison. Point expectations set
// expected_lo == expected_hi; one-sided bands use +/-infinity on the open
// side. A row passes when computed falls inside [lo - tol, hi + tol].
struct CaseRow {
  std::string label;
  double computed = 0.0;
  double expected_lo = 0.0;
  double expected_hi = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct CaseReport {
  std::string id;
  std::vector<CaseRow> rows;
  std::vector<std::string> notes;
  bool all_pass() const;
};

// Identifiers accepted by run_example.
std::vector<std::string> example_ids();

// Built-in single-risk tables, addressed as "<id><X|Y>": "3.1X", "3.1Y",
// "4.1X", ..., "4.3Y". Ids 3.2 and 3.3 reuse the 3.1 pair.
Distribution example_distribution(const std::string& tag);

// Built-in bivariate models: "4.1" (independent Bernoulli(0.02) pair),
// "4.2" (two indicator losses driven by one uniform variable), "4.3"
// (independent Uniform(0,1) pair).
JointModel example_joint(const std::string& id);

// Recompute one canned scenario and compare against its expected table.
CaseReport run_example(const std::string& id);

// Fixed-width text table: one line per comparison, notes at the end.
void write_case_report(const CaseReport& report, std::ostream& os);

}  // namespace distort
