#pragma once

// Executable acceptance criteria. Each case returns one or more metric
// reports with its tolerance fixed here, so the numbers printed by
// `harness run-acceptance` and by the test suite are the same.

#include <string>
#include <string_view>
#include <vector>

#include "nmstretch/eval.hpp"

namespace nmstretch::eval {

std::vector<std::string> acceptance_cases();

/// Runs every case whose name contains `filter` (all cases when empty), in
/// name order. Throws ConfigError if the filter matches nothing.
std::vector<MetricReport> run_acceptance(std::string_view filter = {});

}  // namespace nmstretch::eval
