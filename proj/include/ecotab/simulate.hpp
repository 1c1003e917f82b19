#pragma once

#include <cstdint>

#include "ecotab/io.hpp"
#include "ecotab/likelihood.hpp"

namespace ecotab {

// Design of the synthetic multi-unit study: per unit, row totals are
// multinomial with uniform probabilities, then each row is spread over the
// columns by the rows of pi; only the margins of the resulting table are kept.
struct SimulationConfig {
  int units = 60;
  int unit_total = 40;
  CondProbMatrix pi;
  std::uint64_t seed = 1;
};

struct SimulationResult {
  UnitsFile units;
  int rejections = 0;  // units resampled because a margin total was zero
};

SimulationResult simulate_units(const SimulationConfig& config);

// The built-in 3x3 truth matrix selected by `--pi table3` on the command line.
CondProbMatrix builtin_truth_pi();

}  // namespace ecotab
