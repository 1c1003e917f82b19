#include "ecotab/simulate.hpp"

#include <algorithm>
#include <string>

#include "ecotab/rng.hpp"

namespace ecotab {

SimulationResult simulate_units(const SimulationConfig& config) {
  const int R = config.pi.rows();
  const int C = config.pi.cols();
  if (config.units < 1 || config.unit_total < 1) {
    throw InputError("unit count and unit total must be positive");
  }
  Rng rng(config.seed);
  const std::vector<double> uniform_rows(static_cast<std::size_t>(R), 1.0 / R);

  SimulationResult out;
  out.units.rows = R;
  out.units.cols = C;

  const int width = std::max(3, static_cast<int>(std::to_string(config.units).size()));
  for (int h = 0; h < config.units; ++h) {
    // Resample the whole unit until every margin total is positive.
    for (;;) {
      const std::vector<int> rows = rng.multinomial(config.unit_total, uniform_rows);
      std::vector<int> cols(static_cast<std::size_t>(C), 0);
      for (int i = 0; i < R; ++i) {
        std::vector<double> p(static_cast<std::size_t>(C));
        for (int j = 0; j < C; ++j) p[static_cast<std::size_t>(j)] = config.pi.at(i, j);
        const std::vector<int> row_counts = rng.multinomial(rows[static_cast<std::size_t>(i)], p);
        for (int j = 0; j < C; ++j) cols[static_cast<std::size_t>(j)] += row_counts[static_cast<std::size_t>(j)];
      }
      const bool ok = std::all_of(rows.begin(), rows.end(), [](int v) { return v > 0; }) &&
                      std::all_of(cols.begin(), cols.end(), [](int v) { return v > 0; });
      if (!ok) {
        ++out.rejections;
        continue;
      }
      std::string id = std::to_string(h + 1);
      id.insert(0, static_cast<std::size_t>(width) - id.size(), '0');
      out.units.ids.push_back("u" + id);
      out.units.units.emplace_back(rows, cols);
      break;
    }
  }
  return out;
}

CondProbMatrix builtin_truth_pi() {
  return CondProbMatrix(3, 3,
                        {0.490, 0.280, 0.230,
                         0.300, 0.480, 0.220,
                         0.210, 0.320, 0.470});
}

}  // namespace ecotab
