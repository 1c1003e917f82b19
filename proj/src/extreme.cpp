#include "ecotab/extreme.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace ecotab {

namespace {

void check_permutation(const std::vector<int>& pi, int n, const char* side) {
  if (static_cast<int>(pi.size()) != n) {
    throw InputError(std::string(side) + " permutation has wrong length");
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : pi) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) {
      throw InputError(std::string(side) + " permutation is not a bijection");
    }
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

std::vector<int> invert(const std::vector<int>& pi) {
  std::vector<int> src(pi.size());
  for (std::size_t k = 0; k < pi.size(); ++k) src[static_cast<std::size_t>(pi[k])] = static_cast<int>(k);
  return src;
}

}  // namespace

PermutationPair PermutationPair::identity(int n_rows, int n_cols) {
  PermutationPair p;
  p.rows.resize(static_cast<std::size_t>(n_rows));
  p.cols.resize(static_cast<std::size_t>(n_cols));
  std::iota(p.rows.begin(), p.rows.end(), 0);
  std::iota(p.cols.begin(), p.cols.end(), 0);
  return p;
}

std::vector<int> PermutationPair::row_sources() const { return invert(rows); }
std::vector<int> PermutationPair::col_sources() const { return invert(cols); }

std::vector<int> ExtremeTable::permuted_entries() const {
  const int R = table.rows();
  const int C = table.cols();
  std::vector<int> out(static_cast<std::size_t>(R) * C, 0);
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) {
      out[static_cast<std::size_t>(perms.rows[i]) * C + perms.cols[j]] = table.at(i, j);
    }
  }
  return out;
}

ExtremeTable build_extreme(const MarginPair& margins, const PermutationPair& perms) {
  const int R = margins.rows();
  const int C = margins.cols();
  check_permutation(perms.rows, R, "row");
  check_permutation(perms.cols, C, "column");

  std::vector<int> tr(static_cast<std::size_t>(R));
  std::vector<int> tc(static_cast<std::size_t>(C));
  for (int k = 0; k < R; ++k) tr[static_cast<std::size_t>(perms.rows[k])] = margins.row_total(k);
  for (int k = 0; k < C; ++k) tc[static_cast<std::size_t>(perms.cols[k])] = margins.col_total(k);

  // Corner walk on the permuted margins. Cells skipped by a move stay zero.
  std::vector<int> z(static_cast<std::size_t>(R) * C, 0);
  std::vector<int> row_used(static_cast<std::size_t>(R), 0);
  std::vector<int> col_used(static_cast<std::size_t>(C), 0);
  int i = 0;
  int j = 0;
  while (i < R && j < C) {
    const int a = tr[static_cast<std::size_t>(i)] - row_used[static_cast<std::size_t>(i)];
    const int b = tc[static_cast<std::size_t>(j)] - col_used[static_cast<std::size_t>(j)];
    const int v = std::min(a, b);
    z[static_cast<std::size_t>(i) * C + j] = v;
    row_used[static_cast<std::size_t>(i)] += v;
    col_used[static_cast<std::size_t>(j)] += v;
    if (a < b) {
      ++i;  // row exhausted, rest of the row is zero
    } else if (a > b) {
      ++j;  // column exhausted, rest of the column is zero
    } else {
      ++i;
      ++j;
    }
  }

  const auto src_r = perms.row_sources();
  const auto src_c = perms.col_sources();
  std::vector<int> orig(static_cast<std::size_t>(R) * C, 0);
  for (int a = 0; a < R; ++a) {
    for (int b = 0; b < C; ++b) {
      orig[static_cast<std::size_t>(src_r[a]) * C + src_c[b]] = z[static_cast<std::size_t>(a) * C + b];
    }
  }
  return ExtremeTable{FreqTable(margins, std::move(orig)), perms};
}

std::vector<ExtremeTable> enumerate_extremes(const MarginPair& margins, std::size_t max_pairs) {
  const int R = margins.rows();
  const int C = margins.cols();
  double pairs = 1.0;
  for (int k = 2; k <= R; ++k) pairs *= k;
  for (int k = 2; k <= C; ++k) pairs *= k;
  if (pairs > static_cast<double>(max_pairs)) {
    throw BudgetError("permutation pair count exceeds budget of " + std::to_string(max_pairs), 0);
  }

  std::vector<ExtremeTable> out;
  std::set<std::vector<int>> seen;
  std::vector<int> pr(static_cast<std::size_t>(R));
  std::iota(pr.begin(), pr.end(), 0);
  do {
    std::vector<int> pc(static_cast<std::size_t>(C));
    std::iota(pc.begin(), pc.end(), 0);
    do {
      ExtremeTable z = build_extreme(margins, PermutationPair{pr, pc});
      if (seen.insert(z.table.entries()).second) out.push_back(std::move(z));
    } while (std::next_permutation(pc.begin(), pc.end()));
  } while (std::next_permutation(pr.begin(), pr.end()));
  return out;
}

XiLogOdds epsilon_complete(const FreqTable& z, const PermutationPair& perms, double xi) {
  if (!(xi > 0.0)) throw InputError("xi must be positive");
  const int R = z.rows();
  const int C = z.cols();
  check_permutation(perms.rows, R, "row");
  check_permutation(perms.cols, C, "column");

  std::vector<int> zp(static_cast<std::size_t>(R) * C, 0);
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) {
      zp[static_cast<std::size_t>(perms.rows[i]) * C + perms.cols[j]] = z.at(i, j);
    }
  }
  auto cell = [&](int i, int j) { return zp[static_cast<std::size_t>(i) * C + j]; };

  const int z11 = cell(0, 0);
  if (z11 == 0) throw InputError("not extreme-structured: permuted (1,1) cell is zero");

  XiLogOdds x;
  x.rows_ = R;
  x.cols_ = C;
  x.xi_ = xi;
  x.perms_ = perms;
  const std::size_t cells = static_cast<std::size_t>(R) * C;
  x.zero_mask_.assign(cells, 0);
  x.order_.assign(cells, 0);
  x.offset_.assign(cells, 0.0);
  x.entry_pow_.assign(cells, 0);
  x.entry_off_.assign(cells, 0.0);
  const double log_z11 = std::log(static_cast<double>(z11));

  // Completed log cell values. Zeros on the first row/column become eps.
  x.entry_off_[0] = log_z11;
  for (int j = 1; j < C; ++j) {
    const std::size_t k = static_cast<std::size_t>(j);
    if (cell(0, j) > 0) {
      x.entry_off_[k] = std::log(static_cast<double>(cell(0, j)));
    } else {
      x.entry_pow_[k] = 1;
    }
  }
  for (int i = 1; i < R; ++i) {
    const std::size_t k = static_cast<std::size_t>(i) * C;
    if (cell(i, 0) > 0) {
      x.entry_off_[k] = std::log(static_cast<double>(cell(i, 0)));
    } else {
      x.entry_pow_[k] = 1;
    }
  }

  // Interior cells: classify the anchor sub-table and fill zeros.
  for (int i = 1; i < R; ++i) {
    for (int j = 1; j < C; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * C + j;
      const int zi1 = cell(i, 0);
      const int z1j = cell(0, j);
      const int zij = cell(i, j);
      if (zij > 0) {
        const double log_zij = std::log(static_cast<double>(zij));
        x.entry_off_[k] = log_zij;
        if (z1j > 0 && zi1 > 0) {
          // fully observed odds ratio
          x.order_[k] = 0;
          x.offset_[k] = log_z11 + log_zij - std::log(static_cast<double>(zi1)) -
                         std::log(static_cast<double>(z1j));
        } else if (z1j == 0 && zi1 > 0) {
          x.order_[k] = 1;
          x.offset_[k] = log_z11 + log_zij - std::log(static_cast<double>(zi1));
        } else if (z1j > 0 && zi1 == 0) {
          x.order_[k] = 1;
          x.offset_[k] = log_z11 + log_zij - std::log(static_cast<double>(z1j));
        } else {
          x.order_[k] = 2;
          x.offset_[k] = log_z11 + log_zij;
        }
      } else {
        if (z1j == 0 && zi1 > 0) {
          // fill eps * z_i1 / z_11
          x.entry_pow_[k] = 1;
          x.entry_off_[k] = std::log(static_cast<double>(zi1)) - log_z11;
        } else if (z1j > 0 && zi1 == 0) {
          // fill eps * z_1j / z_11
          x.entry_pow_[k] = 1;
          x.entry_off_[k] = std::log(static_cast<double>(z1j)) - log_z11;
        } else if (z1j == 0 && zi1 == 0) {
          // fill eps^2 / z_11
          x.entry_pow_[k] = 2;
          x.entry_off_[k] = -log_z11;
        } else {
          throw InputError("not extreme-structured: zero cell (" + std::to_string(i + 1) + "," +
                           std::to_string(j + 1) + ") with positive anchors in permuted order");
        }
        // the fill cancels the anchors exactly
        x.zero_mask_[k] = 1;
      }
    }
  }
  // first row and column carry no log-odds
  for (int j = 0; j < C; ++j) x.zero_mask_[static_cast<std::size_t>(j)] = 1;
  for (int i = 0; i < R; ++i) x.zero_mask_[static_cast<std::size_t>(i) * C] = 1;
  return x;
}

XiLogOdds epsilon_complete(const ExtremeTable& z, double xi) {
  return epsilon_complete(z.table, z.perms, xi);
}

bool monotone_order_check(const FreqTable& z, const PermutationPair& perms) {
  XiLogOdds x;
  try {
    x = epsilon_complete(z, perms, 1.0);
  } catch (const InputError&) {
    return false;
  }
  const int R = x.rows();
  const int C = x.cols();
  for (int i = 1; i < R; ++i) {
    for (int j = 1; j < C; ++j) {
      if (x.order(i, j) != 2) continue;
      for (int h = i; h < R; ++h) {
        for (int k = j; k < C; ++k) {
          if (x.order(h, k) == 1) return false;
        }
      }
    }
  }
  return true;
}

bool monotone_order_check(const ExtremeTable& z) {
  return monotone_order_check(z.table, z.perms);
}

}  // namespace ecotab
