#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ocsim::acceptance {

struct CriterionResult {
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// The twelve release-gate checks. Fast mode trims seed counts and horizons
// for local iteration; the full suite is what CI runs. Progress goes to
// `log`, results come back one entry per criterion.
std::vector<CriterionResult> run_suite(bool fast, std::ostream& log);

}  // namespace ocsim::acceptance
