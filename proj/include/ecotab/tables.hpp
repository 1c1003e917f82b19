#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ecotab/errors.hpp"

namespace ecotab {

// Row and column totals of an R x C frequency table. All totals are strictly
// positive and the two sides share the same grand total.
class MarginPair {
 public:
  MarginPair(std::vector<int> row_totals, std::vector<int> col_totals);

  int rows() const noexcept { return static_cast<int>(row_totals_.size()); }
  int cols() const noexcept { return static_cast<int>(col_totals_.size()); }
  long long total() const noexcept { return total_; }
  int row_total(int i) const { return row_totals_[static_cast<std::size_t>(i)]; }
  int col_total(int j) const { return col_totals_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& row_totals() const noexcept { return row_totals_; }
  const std::vector<int>& col_totals() const noexcept { return col_totals_; }

  bool operator==(const MarginPair&) const = default;

 private:
  std::vector<int> row_totals_;
  std::vector<int> col_totals_;
  long long total_ = 0;
};

// A nonnegative integer table validated against its margins.
class FreqTable {
 public:
  // entries are row-major; throws InputError if the sums do not reproduce
  // the margins or any entry is negative.
  FreqTable(MarginPair margins, std::vector<int> entries);

  int rows() const noexcept { return margins_.rows(); }
  int cols() const noexcept { return margins_.cols(); }
  int at(int i, int j) const { return entries_[static_cast<std::size_t>(i) * cols() + j]; }
  const std::vector<int>& entries() const noexcept { return entries_; }
  const MarginPair& margins() const noexcept { return margins_; }

  bool operator==(const FreqTable&) const = default;

 private:
  MarginPair margins_;
  std::vector<int> entries_;
};

// Non-owning view of one table during streaming enumeration. The span points
// into walker-owned storage and is only valid inside the visitor call.
struct TableView {
  const MarginPair& margins;
  std::span<const int> entries;  // row-major

  int rows() const noexcept { return margins.rows(); }
  int cols() const noexcept { return margins.cols(); }
  int at(int i, int j) const { return entries[static_cast<std::size_t>(i) * cols() + j]; }
};

inline constexpr std::size_t kDefaultTableLimit = 5'000'000;

namespace detail {

// Depth-first walk over all nonnegative integer tables with the given
// margins, in lexicographic order of the row-major entry sequence (the (1,1)
// cell varies slowest). Free cells are the first R-1 rows by the first C-1
// columns; the last cell of each row and the whole last row are forced.
// At a free cell the admissible values are
//   [max(0, rowRem - capRight), min(rowRem, colRem)]
// where capRight is the total remaining capacity of the columns to the
// right, so no dead branch is ever entered.
template <typename Emit>
void walk_tables(const MarginPair& m, Emit&& emit) {
  const int R = m.rows();
  const int C = m.cols();
  std::vector<int> cells(static_cast<std::size_t>(R) * C, 0);
  std::vector<int> col_rem(m.col_totals());
  std::vector<int> suffix(static_cast<std::size_t>(R) * (C + 1), 0);
  const TableView view{m, cells};

  auto rec = [&](auto&& self, int i, int j, int row_rem) -> void {
    if (i == R - 1) {
      for (int k = 0; k < C; ++k) cells[static_cast<std::size_t>(R - 1) * C + k] = col_rem[k];
      emit(view);
      return;
    }
    int* suf = &suffix[static_cast<std::size_t>(i) * (C + 1)];
    if (j == 0) {
      suf[C] = 0;
      for (int k = C - 1; k >= 0; --k) suf[k] = suf[k + 1] + col_rem[k];
    }
    const std::size_t cell = static_cast<std::size_t>(i) * C + j;
    if (j == C - 1) {
      cells[cell] = row_rem;
      col_rem[j] -= row_rem;
      self(self, i + 1, 0, m.row_total(i + 1));
      col_rem[j] += row_rem;
      return;
    }
    const int lo = std::max(0, row_rem - suf[j + 1]);
    const int hi = std::min(row_rem, col_rem[j]);
    for (int v = lo; v <= hi; ++v) {
      cells[cell] = v;
      col_rem[j] -= v;
      self(self, i, j + 1, row_rem - v);
      col_rem[j] += v;
    }
  };
  rec(rec, 0, 0, m.row_total(0));
}

}  // namespace detail

// Streams every table compatible with the margins, in the order
// enumerate_tables uses, threading an accumulator through the visitor
// without materializing the collection. Visitor exceptions propagate.
template <typename Acc, typename Fn>
Acc fold_tables(const MarginPair& margins, Acc acc, Fn&& fn) {
  detail::walk_tables(margins, [&](const TableView& t) { fn(t, acc); });
  return acc;
}

// The materialized collection of all tables with a common MarginPair,
// stored as one flat array in enumeration order.
class TableCollection {
 public:
  TableCollection(MarginPair margins, std::vector<int> flat, std::size_t count)
      : margins_(std::move(margins)), flat_(std::move(flat)), count_(count) {}

  const MarginPair& margins() const noexcept { return margins_; }
  std::size_t size() const noexcept { return count_; }

  std::span<const int> entries(std::size_t k) const {
    const std::size_t cells = static_cast<std::size_t>(margins_.rows()) * margins_.cols();
    return {flat_.data() + k * cells, cells};
  }
  TableView view(std::size_t k) const { return {margins_, entries(k)}; }
  FreqTable at(std::size_t k) const;

 private:
  MarginPair margins_;
  std::vector<int> flat_;
  std::size_t count_;
};

// Builds the full collection. Throws BudgetError (carrying the partial
// count) once more than `limit` tables have been produced.
TableCollection enumerate_tables(const MarginPair& margins,
                                 std::size_t limit = kDefaultTableLimit);

// Cache of log(k!) for k = 0..max_n.
class LogFactorials {
 public:
  explicit LogFactorials(long long max_n);
  double operator()(int k) const { return values_[static_cast<std::size_t>(k)]; }
  long long max_n() const noexcept { return static_cast<long long>(values_.size()) - 1; }

 private:
  std::vector<double> values_;
};

// Sum of log(n_ij!) over all cells.
double log_factorial_sum(const TableView& table, const LogFactorials& cache);
double log_factorial_sum(const FreqTable& table);

}  // namespace ecotab
