#pragma once

#include <cstddef>
#include <vector>

#include "ecotab/tables.hpp"

namespace ecotab {

// A relabeling of the row and column categories. pi[k] is the position the
// original category k moves to (0-based), so the permuted margins satisfy
// t[pi[k]] = m[k].
struct PermutationPair {
  std::vector<int> rows;
  std::vector<int> cols;

  static PermutationPair identity(int n_rows, int n_cols);
  std::vector<int> row_sources() const;  // inverse map: src[pos] = original index
  std::vector<int> col_sources() const;
};

// A Frechet upper-bound table for some relabeling of the categories.
// `table` is stored in the original category order together with the
// permutation pair that generated it.
struct ExtremeTable {
  FreqTable table;
  PermutationPair perms;

  // Entries rearranged into the permuted order in which the table has the
  // staircase structure.
  std::vector<int> permuted_entries() const;
};

inline constexpr std::size_t kDefaultPermBudget = 14'400;  // 5! * 5!

// Runs the corner walk on the permuted margins: at each cell the remaining
// row and column capacities are compared, the smaller one is committed, and
// ties close both. The result is mapped back to original category order.
ExtremeTable build_extreme(const MarginPair& margins, const PermutationPair& perms);

// One representative per distinct table over all R! * C! permutation pairs,
// in first-seen order with pairs visited lexicographically. Throws
// BudgetError when R! * C! exceeds max_pairs.
std::vector<ExtremeTable> enumerate_extremes(const MarginPair& margins,
                                             std::size_t max_pairs = kDefaultPermBudget);

// The log-odds structure of an extreme table completed with cell values of
// order epsilon, carried symbolically in xi = -log(epsilon). Everything is
// expressed in the permuted order of the generating pair; each lambda is
// order(i,j) * xi + offset(i,j).
class XiLogOdds {
 public:
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  double xi() const noexcept { return xi_; }
  const PermutationPair& perms() const noexcept { return perms_; }

  // lambda identically zero by structure (first row/column and filled cells).
  bool zero(int i, int j) const { return zero_mask_[idx(i, j)] != 0; }
  // xi-coefficient of lambda, in {0, 1, 2}.
  int order(int i, int j) const { return order_[idx(i, j)]; }
  // xi-free part of lambda.
  double offset(int i, int j) const { return offset_[idx(i, j)]; }
  // lambda value at the stored xi.
  double lambda(int i, int j) const { return order_[idx(i, j)] * xi_ + offset_[idx(i, j)]; }

  // Completed log cell value as a linear form log z(eps) = off - pow * xi,
  // with pow the power of epsilon in the fill (0 for positive cells).
  int entry_power(int i, int j) const { return entry_pow_[idx(i, j)]; }
  double entry_offset(int i, int j) const { return entry_off_[idx(i, j)]; }

 private:
  friend XiLogOdds epsilon_complete(const FreqTable&, const PermutationPair&, double);

  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * cols_ + j; }

  int rows_ = 0;
  int cols_ = 0;
  double xi_ = 0.0;
  PermutationPair perms_;
  std::vector<unsigned char> zero_mask_;
  std::vector<int> order_;
  std::vector<double> offset_;
  std::vector<int> entry_pow_;
  std::vector<double> entry_off_;
};

// Classifies every interior cell of the permuted table by the zero pattern
// of its anchor sub-table {(1,1),(1,j),(i,1),(i,j)} and fills zeros with the
// matching epsilon expression. epsilon itself is never materialized; the
// returned structure is exact in (order, offset) arithmetic. Throws
// InputError when the zero pattern cannot come from an extreme table.
XiLogOdds epsilon_complete(const ExtremeTable& z, double xi);
XiLogOdds epsilon_complete(const FreqTable& z, const PermutationPair& perms, double xi);

// True when the table classifies cleanly and the order-2 cells are
// down-right closed in permuted order (any cell south-east of an order-2
// cell has order 0 or 2).
bool monotone_order_check(const ExtremeTable& z);
bool monotone_order_check(const FreqTable& z, const PermutationPair& perms);

}  // namespace ecotab
