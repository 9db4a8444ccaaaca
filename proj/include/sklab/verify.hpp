#pragma once

#include <string>

#include "sklab/kernel.hpp"
#include "sklab/parisi.hpp"

namespace sklab {

/// One numeric check: pass iff defect <= tolerance (tolerance already
/// scaled). Defects are signed; monotonicity checks report the worst
/// violation, which is negative when the property holds strictly.
struct CheckResult {
  std::string id;
  std::string detail;
  double defect = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Runs the full scalar/kernel/PDE lemma suite. Deterministic in seed.
/// tolerance_scale multiplies every stated tolerance.
std::vector<CheckResult> run_verify(std::uint64_t seed,
                                    double tolerance_scale = 1.0);

}  // namespace sklab
