#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <vector>

#include "ecotab/extreme.hpp"
#include "ecotab/tables.hpp"

namespace ecotab {

// Free parameters of the row-conditional probabilities: the column logits
// phi_2..phi_C followed by the log-odds ratios lambda_ij (i, j >= 2) with the
// column index running faster. phi_1 and the first row/column of lambda are
// identically zero. Packed length is R * (C - 1).
class ParamVector {
 public:
  ParamVector(int n_rows, int n_cols);  // zeros
  ParamVector(int n_rows, int n_cols, std::vector<double> packed);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int size() const noexcept { return static_cast<int>(packed_.size()); }

  double phi(int j) const { return j == 0 ? 0.0 : packed_[static_cast<std::size_t>(j) - 1]; }
  double lambda(int i, int j) const {
    if (i == 0 || j == 0) return 0.0;
    return packed_[static_cast<std::size_t>(cols_ - 1) * i + j - 1];
  }

  double operator[](int k) const { return packed_[static_cast<std::size_t>(k)]; }
  double& operator[](int k) { return packed_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& packed() const noexcept { return packed_; }

 private:
  int rows_;
  int cols_;
  std::vector<double> packed_;
};

// Row-stochastic matrix of conditional probabilities p(j|i).
class CondProbMatrix {
 public:
  // values row-major; each row must sum to 1 within 1e-12.
  CondProbMatrix(int n_rows, int n_cols, std::vector<double> values);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * cols_ + j]; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  int rows_;
  int cols_;
  std::vector<double> values_;
};

// Conditional cell expectations given both margins; reproduces the margins.
class ExpectedTable {
 public:
  ExpectedTable(MarginPair margins, std::vector<double> values);

  int rows() const noexcept { return margins_.rows(); }
  int cols() const noexcept { return margins_.cols(); }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * cols() + j]; }
  const std::vector<double>& values() const noexcept { return values_; }
  const MarginPair& margins() const noexcept { return margins_; }

 private:
  MarginPair margins_;
  std::vector<double> values_;
};

// Margins observed for a collection of local units sharing dimensions and,
// by model assumption, the conditional row distributions. Per-unit table
// collections are built on first use and cached for reuse across scoring
// iterations (populate them before sharing a dataset between threads).
class EIDataset {
 public:
  explicit EIDataset(std::vector<MarginPair> units,
                     std::size_t max_tables = kDefaultTableLimit);

  std::size_t size() const noexcept { return units_.size(); }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  const MarginPair& unit(std::size_t h) const { return units_[h]; }
  const std::vector<MarginPair>& units() const noexcept { return units_; }

  long long agg_row_total(int i) const { return agg_rows_[static_cast<std::size_t>(i)]; }
  long long agg_col_total(int j) const { return agg_cols_[static_cast<std::size_t>(j)]; }
  long long total() const noexcept { return total_; }

  const TableCollection& tables(std::size_t h) const;

 private:
  std::vector<MarginPair> units_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<long long> agg_rows_;
  std::vector<long long> agg_cols_;
  long long total_ = 0;
  std::size_t max_tables_;
  mutable std::vector<std::unique_ptr<TableCollection>> cache_;
};

// Per-unit score vectors: column h of per_unit is the gradient of unit h's
// marginal log-likelihood; total is their sum.
struct ScoreSet {
  Eigen::MatrixXd per_unit;  // R(C-1) x s
  Eigen::VectorXd total;
};

// p(j|i) = exp(phi_j + lambda_ij) / sum_j exp(phi_j + lambda_ij), stabilized
// by subtracting each row's maximum exponent.
CondProbMatrix link(const ParamVector& params);

// phi_j = log(p(j|1)/p(1|1)), lambda_ij = log of the odds ratio anchored at
// the first row and column. Requires strictly positive entries.
ParamVector inverse_link(const CondProbMatrix& probs);

// Full R x C matrix of lambda values (first row/column zero), row-major.
std::vector<double> lambda_matrix(const ParamVector& params);

// V(N, Lambda) = sum_ij n_ij * lambda_ij.
double v_stat(const TableView& table, const ParamVector& params);
double v_stat(const FreqTable& table, const ParamVector& params);

// Unnormalized log weights V(N, Lambda) - sum_ij log(n_ij!) of the extended
// hypergeometric distribution, in enumeration order.
std::vector<double> table_log_weights(const TableCollection& tables,
                                      std::span<const double> lambda_rc);

// Normalized weights; they sum to 1 after log-sum-exp normalization.
std::vector<double> table_weights(const TableCollection& tables, const ParamVector& params);

// M_ij: conditional expectation of each cell given both margins.
ExpectedTable cond_expectations(const TableCollection& tables, const ParamVector& params);
ExpectedTable cond_expectations(const MarginPair& margins, const ParamVector& params,
                                std::size_t limit = kDefaultTableLimit);
// Extreme-limit version: evaluates at the completed log-odds of an extreme
// table, mapped back to original category order at the stored xi.
ExpectedTable cond_expectations(const MarginPair& margins, const XiLogOdds& xi_odds,
                                std::size_t limit = kDefaultTableLimit);

// Marginal log-likelihood of the observed column totals given the row
// totals, up to an additive constant free of the parameters.
double marginal_loglik(const TableCollection& tables, const ParamVector& params);
double marginal_loglik(const MarginPair& margins, const ParamVector& params,
                       std::size_t limit = kDefaultTableLimit);

// Gradient of marginal_loglik: column-total residuals n_0j - sum_i n_i0
// p(j|i) for j = 2..C, then M_ij - n_i0 p(j|i) for i, j >= 2, j faster.
Eigen::VectorXd unit_score(const TableCollection& tables, const ParamVector& params);
Eigen::VectorXd unit_score(const MarginPair& margins, const ParamVector& params,
                           std::size_t limit = kDefaultTableLimit);

double dataset_loglik(const EIDataset& data, const ParamVector& params);
ScoreSet dataset_score(const EIDataset& data, const ParamVector& params);

// Centered cross-product of the unit scores, sum_h (u_h - u/s)(u_h - u/s)^T.
Eigen::MatrixXd empirical_information(const ScoreSet& scores);

// Parameters of the independence distribution p(j|i) = n_0j / n.
ParamVector independence_params(const MarginPair& margins);

// Parameters of the distribution derived from one table: conditional rows
// with zeros replaced by exp(-xi), anchored in log scale.
ParamVector table_distribution_params(const TableView& table, double xi);

// phi and lambda of the completed extreme distribution in original category
// order, evaluated at the stored xi.
ParamVector xi_params(const XiLogOdds& xi_odds);

}  // namespace ecotab
