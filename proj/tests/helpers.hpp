#pragma once

#include <functional>
#include <vector>

#include "ecotab/likelihood.hpp"
#include "ecotab/rng.hpp"
#include "ecotab/tables.hpp"

namespace ecotab::testing {

// Random composition of total into k strictly positive parts.
inline std::vector<int> random_composition(Rng& rng, int total, int k) {
  std::vector<int> cuts;
  cuts.push_back(0);
  while (static_cast<int>(cuts.size()) < k) {
    const int c = 1 + static_cast<int>(rng.uniform() * (total - 1));
    bool fresh = true;
    for (int v : cuts) fresh = fresh && v != c;
    if (fresh) cuts.push_back(c);
  }
  cuts.push_back(total);
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> parts(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) parts[static_cast<std::size_t>(i)] = cuts[static_cast<std::size_t>(i) + 1] - cuts[static_cast<std::size_t>(i)];
  return parts;
}

inline MarginPair random_margins(Rng& rng, int rows, int cols, int total) {
  return MarginPair(random_composition(rng, total, rows), random_composition(rng, total, cols));
}

inline ParamVector random_params(Rng& rng, int rows, int cols, double scale = 1.0) {
  ParamVector p(rows, cols);
  for (int k = 0; k < p.size(); ++k) p[k] = scale * (2.0 * rng.uniform() - 1.0);
  return p;
}

// Independent table counter: every row is expanded into all nonnegative
// compositions of its total, and combinations are kept when the column sums
// match. No pruning and no shared code with the enumeration under test.
inline long long brute_force_table_count(const MarginPair& m) {
  const int R = m.rows();
  const int C = m.cols();
  std::vector<std::vector<std::vector<int>>> row_choices(static_cast<std::size_t>(R));
  for (int i = 0; i < R; ++i) {
    std::vector<int> row(static_cast<std::size_t>(C), 0);
    std::function<void(int, int)> expand = [&](int j, int rem) {
      if (j == C - 1) {
        row[static_cast<std::size_t>(j)] = rem;
        row_choices[static_cast<std::size_t>(i)].push_back(row);
        return;
      }
      for (int v = 0; v <= rem; ++v) {
        row[static_cast<std::size_t>(j)] = v;
        expand(j + 1, rem - v);
      }
    };
    expand(0, m.row_total(i));
  }
  long long count = 0;
  std::vector<int> col_sum(static_cast<std::size_t>(C), 0);
  std::function<void(int)> combine = [&](int i) {
    if (i == R) {
      for (int j = 0; j < C; ++j) {
        if (col_sum[static_cast<std::size_t>(j)] != m.col_total(j)) return;
      }
      ++count;
      return;
    }
    for (const auto& row : row_choices[static_cast<std::size_t>(i)]) {
      bool feasible = true;
      for (int j = 0; j < C; ++j) {
        col_sum[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j)];
        if (col_sum[static_cast<std::size_t>(j)] > m.col_total(j)) feasible = false;
      }
      if (feasible) combine(i + 1);
      for (int j = 0; j < C; ++j) col_sum[static_cast<std::size_t>(j)] -= row[static_cast<std::size_t>(j)];
    }
  };
  combine(0);
  return count;
}

// Central finite difference of a scalar function of the packed parameters.
inline double central_difference(const std::function<double(const ParamVector&)>& f,
                                 const ParamVector& at, int k, double h = 1e-5) {
  ParamVector hi = at;
  ParamVector lo = at;
  hi[k] += h;
  lo[k] -= h;
  return (f(hi) - f(lo)) / (2.0 * h);
}

}  // namespace ecotab::testing
