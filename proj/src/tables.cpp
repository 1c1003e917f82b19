#include "ecotab/tables.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace ecotab {

MarginPair::MarginPair(std::vector<int> row_totals, std::vector<int> col_totals)
    : row_totals_(std::move(row_totals)), col_totals_(std::move(col_totals)) {
  if (row_totals_.empty() || col_totals_.empty()) {
    throw InputError("margins must have at least one row and one column");
  }
  long long rsum = 0;
  for (int v : row_totals_) {
    if (v <= 0) throw InputError("row totals must be strictly positive");
    rsum += v;
  }
  long long csum = 0;
  for (int v : col_totals_) {
    if (v <= 0) throw InputError("column totals must be strictly positive");
    csum += v;
  }
  if (rsum != csum) {
    throw InputError("row totals sum to " + std::to_string(rsum) +
                     " but column totals sum to " + std::to_string(csum));
  }
  total_ = rsum;
}

FreqTable::FreqTable(MarginPair margins, std::vector<int> entries)
    : margins_(std::move(margins)), entries_(std::move(entries)) {
  const int R = margins_.rows();
  const int C = margins_.cols();
  if (entries_.size() != static_cast<std::size_t>(R) * C) {
    throw InputError("table entry count does not match margin dimensions");
  }
  for (int i = 0; i < R; ++i) {
    long long s = 0;
    for (int j = 0; j < C; ++j) {
      const int v = entries_[static_cast<std::size_t>(i) * C + j];
      if (v < 0) throw InputError("table entries must be nonnegative");
      s += v;
    }
    if (s != margins_.row_total(i)) throw InputError("row sums do not match margins");
  }
  for (int j = 0; j < C; ++j) {
    long long s = 0;
    for (int i = 0; i < R; ++i) s += entries_[static_cast<std::size_t>(i) * C + j];
    if (s != margins_.col_total(j)) throw InputError("column sums do not match margins");
  }
}

FreqTable TableCollection::at(std::size_t k) const {
  const auto e = entries(k);
  return FreqTable(margins_, std::vector<int>(e.begin(), e.end()));
}

TableCollection enumerate_tables(const MarginPair& margins, std::size_t limit) {
  std::vector<int> flat;
  std::size_t count = 0;
  detail::walk_tables(margins, [&](const TableView& t) {
    if (count == limit) {
      throw BudgetError("table enumeration exceeded limit of " + std::to_string(limit), count);
    }
    flat.insert(flat.end(), t.entries.begin(), t.entries.end());
    ++count;
  });
  return TableCollection(margins, std::move(flat), count);
}

LogFactorials::LogFactorials(long long max_n) : values_(static_cast<std::size_t>(max_n) + 1) {
  for (long long k = 0; k <= max_n; ++k) {
    values_[static_cast<std::size_t>(k)] = std::lgamma(static_cast<double>(k) + 1.0);
  }
}

double log_factorial_sum(const TableView& table, const LogFactorials& cache) {
  double s = 0.0;
  for (int v : table.entries) s += cache(v);
  return s;
}

double log_factorial_sum(const FreqTable& table) {
  const LogFactorials cache(table.margins().total());
  return log_factorial_sum(TableView{table.margins(), table.entries()}, cache);
}

}  // namespace ecotab
