#include "ecotab/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ecotab {

namespace {

double logsumexp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  long double s = 0.0L;
  for (double x : v) s += std::exp(x - m);
  return m + static_cast<double>(std::log(s));
}

}  // namespace

ParamVector::ParamVector(int n_rows, int n_cols)
    : rows_(n_rows), cols_(n_cols),
      packed_(static_cast<std::size_t>(n_rows) * (n_cols - 1), 0.0) {
  if (n_rows < 1 || n_cols < 1) throw InputError("parameter dimensions must be positive");
}

ParamVector::ParamVector(int n_rows, int n_cols, std::vector<double> packed)
    : rows_(n_rows), cols_(n_cols), packed_(std::move(packed)) {
  if (n_rows < 1 || n_cols < 1) throw InputError("parameter dimensions must be positive");
  if (packed_.size() != static_cast<std::size_t>(n_rows) * (n_cols - 1)) {
    throw InputError("packed parameter length must be R*(C-1)");
  }
  for (double v : packed_) {
    if (!std::isfinite(v)) throw InputError("parameters must be finite");
  }
}

CondProbMatrix::CondProbMatrix(int n_rows, int n_cols, std::vector<double> values)
    : rows_(n_rows), cols_(n_cols), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(n_rows) * n_cols) {
    throw InputError("probability matrix has wrong size");
  }
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) {
      const double p = values_[static_cast<std::size_t>(i) * cols_ + j];
      if (!(p >= 0.0 && p <= 1.0)) throw InputError("probabilities must lie in [0,1]");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-12) {
      throw InputError("row " + std::to_string(i + 1) + " of probability matrix sums to " +
                       std::to_string(s));
    }
  }
}

ExpectedTable::ExpectedTable(MarginPair margins, std::vector<double> values)
    : margins_(std::move(margins)), values_(std::move(values)) {
  const int R = margins_.rows();
  const int C = margins_.cols();
  if (values_.size() != static_cast<std::size_t>(R) * C) {
    throw InputError("expected table has wrong size");
  }
  for (int i = 0; i < R; ++i) {
    double s = 0.0;
    for (int j = 0; j < C; ++j) s += values_[static_cast<std::size_t>(i) * C + j];
    if (std::abs(s - margins_.row_total(i)) > 1e-8) {
      throw InputError("expected table row sums do not reproduce the margins");
    }
  }
  for (int j = 0; j < C; ++j) {
    double s = 0.0;
    for (int i = 0; i < R; ++i) s += values_[static_cast<std::size_t>(i) * C + j];
    if (std::abs(s - margins_.col_total(j)) > 1e-8) {
      throw InputError("expected table column sums do not reproduce the margins");
    }
  }
}

EIDataset::EIDataset(std::vector<MarginPair> units, std::size_t max_tables)
    : units_(std::move(units)), max_tables_(max_tables) {
  if (units_.empty()) throw InputError("dataset must contain at least one unit");
  rows_ = units_.front().rows();
  cols_ = units_.front().cols();
  agg_rows_.assign(static_cast<std::size_t>(rows_), 0);
  agg_cols_.assign(static_cast<std::size_t>(cols_), 0);
  for (const MarginPair& u : units_) {
    if (u.rows() != rows_ || u.cols() != cols_) {
      throw InputError("all units must share the same dimensions");
    }
    for (int i = 0; i < rows_; ++i) agg_rows_[static_cast<std::size_t>(i)] += u.row_total(i);
    for (int j = 0; j < cols_; ++j) agg_cols_[static_cast<std::size_t>(j)] += u.col_total(j);
    total_ += u.total();
  }
  cache_.resize(units_.size());
}

const TableCollection& EIDataset::tables(std::size_t h) const {
  if (!cache_[h]) {
    try {
      cache_[h] = std::make_unique<TableCollection>(enumerate_tables(units_[h], max_tables_));
    } catch (const BudgetError& e) {
      throw BudgetError("unit " + std::to_string(h + 1) + ": " + e.what(), e.partial_count());
    }
  }
  return *cache_[h];
}

CondProbMatrix link(const ParamVector& params) {
  const int R = params.rows();
  const int C = params.cols();
  std::vector<double> p(static_cast<std::size_t>(R) * C);
  for (int i = 0; i < R; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < C; ++j) mx = std::max(mx, params.phi(j) + params.lambda(i, j));
    double s = 0.0;
    for (int j = 0; j < C; ++j) {
      const double e = std::exp(params.phi(j) + params.lambda(i, j) - mx);
      p[static_cast<std::size_t>(i) * C + j] = e;
      s += e;
    }
    for (int j = 0; j < C; ++j) p[static_cast<std::size_t>(i) * C + j] /= s;
  }
  return CondProbMatrix(R, C, std::move(p));
}

ParamVector inverse_link(const CondProbMatrix& probs) {
  const int R = probs.rows();
  const int C = probs.cols();
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) {
      if (!(probs.at(i, j) > 0.0)) {
        throw InputError("inverse link requires strictly positive probabilities");
      }
    }
  }
  ParamVector out(R, C);
  int k = 0;
  for (int j = 1; j < C; ++j) out[k++] = std::log(probs.at(0, j)) - std::log(probs.at(0, 0));
  for (int i = 1; i < R; ++i) {
    for (int j = 1; j < C; ++j) {
      out[k++] = std::log(probs.at(i, j)) + std::log(probs.at(0, 0)) -
                 std::log(probs.at(i, 0)) - std::log(probs.at(0, j));
    }
  }
  return out;
}

std::vector<double> lambda_matrix(const ParamVector& params) {
  const int R = params.rows();
  const int C = params.cols();
  std::vector<double> lam(static_cast<std::size_t>(R) * C, 0.0);
  for (int i = 1; i < R; ++i) {
    for (int j = 1; j < C; ++j) lam[static_cast<std::size_t>(i) * C + j] = params.lambda(i, j);
  }
  return lam;
}

double v_stat(const TableView& table, const ParamVector& params) {
  if (table.rows() != params.rows() || table.cols() != params.cols()) {
    throw InputError("table and parameter dimensions disagree");
  }
  double s = 0.0;
  for (int i = 1; i < table.rows(); ++i) {
    for (int j = 1; j < table.cols(); ++j) s += table.at(i, j) * params.lambda(i, j);
  }
  return s;
}

double v_stat(const FreqTable& table, const ParamVector& params) {
  return v_stat(TableView{table.margins(), table.entries()}, params);
}

std::vector<double> table_log_weights(const TableCollection& tables,
                                      std::span<const double> lambda_rc) {
  const MarginPair& m = tables.margins();
  const int R = m.rows();
  const int C = m.cols();
  if (lambda_rc.size() != static_cast<std::size_t>(R) * C) {
    throw InputError("lambda matrix has wrong size");
  }
  const LogFactorials lf(m.total());
  std::vector<double> logw(tables.size());
  for (std::size_t k = 0; k < tables.size(); ++k) {
    const auto e = tables.entries(k);
    double v = 0.0;
    double g = 0.0;
    for (std::size_t c = 0; c < e.size(); ++c) {
      v += e[c] * lambda_rc[c];
      g += lf(e[c]);
    }
    logw[k] = v - g;
  }
  return logw;
}

std::vector<double> table_weights(const TableCollection& tables, const ParamVector& params) {
  const auto lam = lambda_matrix(params);
  auto logw = table_log_weights(tables, lam);
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : logw) mx = std::max(mx, x);
  long double s = 0.0L;
  for (double& x : logw) {
    x = std::exp(x - mx);
    s += x;
  }
  for (double& x : logw) x = static_cast<double>(x / s);
  return logw;
}

ExpectedTable cond_expectations(const TableCollection& tables, const ParamVector& params) {
  const MarginPair& m = tables.margins();
  const int R = m.rows();
  const int C = m.cols();
  if (R != params.rows() || C != params.cols()) {
    throw InputError("margins and parameter dimensions disagree");
  }
  const auto lam = lambda_matrix(params);
  const auto logw = table_log_weights(tables, lam);
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : logw) mx = std::max(mx, x);

  const std::size_t cells = static_cast<std::size_t>(R) * C;
  std::vector<long double> acc(cells, 0.0L);
  long double sw = 0.0L;
  for (std::size_t k = 0; k < tables.size(); ++k) {
    const double w = std::exp(logw[k] - mx);
    sw += w;
    const auto e = tables.entries(k);
    for (std::size_t c = 0; c < cells; ++c) acc[c] += w * e[c];
  }
  std::vector<double> out(cells);
  for (std::size_t c = 0; c < cells; ++c) out[c] = static_cast<double>(acc[c] / sw);
  return ExpectedTable(m, std::move(out));
}

ExpectedTable cond_expectations(const MarginPair& margins, const ParamVector& params,
                                std::size_t limit) {
  return cond_expectations(enumerate_tables(margins, limit), params);
}

ExpectedTable cond_expectations(const MarginPair& margins, const XiLogOdds& xi_odds,
                                std::size_t limit) {
  return cond_expectations(enumerate_tables(margins, limit), xi_params(xi_odds));
}

double marginal_loglik(const TableCollection& tables, const ParamVector& params) {
  const MarginPair& m = tables.margins();
  const int R = m.rows();
  const int C = m.cols();
  if (R != params.rows() || C != params.cols()) {
    throw InputError("margins and parameter dimensions disagree");
  }
  double col_term = 0.0;
  for (int j = 1; j < C; ++j) col_term += m.col_total(j) * params.phi(j);

  const auto lam = lambda_matrix(params);
  const auto logw = table_log_weights(tables, lam);
  const double mix_term = logsumexp(logw);

  double row_term = 0.0;
  std::vector<double> logits(static_cast<std::size_t>(C));
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) logits[static_cast<std::size_t>(j)] = params.phi(j) + params.lambda(i, j);
    row_term += m.row_total(i) * logsumexp(logits);
  }
  return col_term + mix_term - row_term;
}

double marginal_loglik(const MarginPair& margins, const ParamVector& params, std::size_t limit) {
  return marginal_loglik(enumerate_tables(margins, limit), params);
}

Eigen::VectorXd unit_score(const TableCollection& tables, const ParamVector& params) {
  const MarginPair& m = tables.margins();
  const int R = m.rows();
  const int C = m.cols();
  const CondProbMatrix p = link(params);
  const ExpectedTable mexp = cond_expectations(tables, params);

  Eigen::VectorXd u(static_cast<Eigen::Index>(R) * (C - 1));
  int k = 0;
  for (int j = 1; j < C; ++j) {
    double fitted = 0.0;
    for (int i = 0; i < R; ++i) fitted += m.row_total(i) * p.at(i, j);
    u(k++) = m.col_total(j) - fitted;
  }
  for (int i = 1; i < R; ++i) {
    for (int j = 1; j < C; ++j) u(k++) = mexp.at(i, j) - m.row_total(i) * p.at(i, j);
  }
  return u;
}

Eigen::VectorXd unit_score(const MarginPair& margins, const ParamVector& params,
                           std::size_t limit) {
  return unit_score(enumerate_tables(margins, limit), params);
}

double dataset_loglik(const EIDataset& data, const ParamVector& params) {
  double ll = 0.0;
  for (std::size_t h = 0; h < data.size(); ++h) ll += marginal_loglik(data.tables(h), params);
  return ll;
}

ScoreSet dataset_score(const EIDataset& data, const ParamVector& params) {
  const Eigen::Index p = static_cast<Eigen::Index>(data.rows()) * (data.cols() - 1);
  ScoreSet s;
  s.per_unit.resize(p, static_cast<Eigen::Index>(data.size()));
  for (std::size_t h = 0; h < data.size(); ++h) {
    s.per_unit.col(static_cast<Eigen::Index>(h)) = unit_score(data.tables(h), params);
  }
  s.total = s.per_unit.rowwise().sum();
  return s;
}

Eigen::MatrixXd empirical_information(const ScoreSet& scores) {
  const Eigen::Index s = scores.per_unit.cols();
  if (s < 2) throw InputError("empirical information requires at least two units");
  const Eigen::VectorXd mean = scores.total / static_cast<double>(s);
  const Eigen::MatrixXd centered = scores.per_unit.colwise() - mean;
  return centered * centered.transpose();
}

ParamVector independence_params(const MarginPair& margins) {
  const int R = margins.rows();
  const int C = margins.cols();
  std::vector<double> p(static_cast<std::size_t>(R) * C);
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) {
      p[static_cast<std::size_t>(i) * C + j] =
          static_cast<double>(margins.col_total(j)) / static_cast<double>(margins.total());
    }
  }
  return inverse_link(CondProbMatrix(R, C, std::move(p)));
}

ParamVector table_distribution_params(const TableView& table, double xi) {
  if (!(xi > 0.0)) throw InputError("xi must be positive");
  const int R = table.rows();
  const int C = table.cols();
  auto log_cell = [&](int i, int j) {
    const int v = table.at(i, j);
    return v > 0 ? std::log(static_cast<double>(v)) : -xi;
  };
  ParamVector out(R, C);
  int k = 0;
  for (int j = 1; j < C; ++j) out[k++] = log_cell(0, j) - log_cell(0, 0);
  for (int i = 1; i < R; ++i) {
    for (int j = 1; j < C; ++j) {
      out[k++] = log_cell(i, j) + log_cell(0, 0) - log_cell(i, 0) - log_cell(0, j);
    }
  }
  return out;
}

ParamVector xi_params(const XiLogOdds& xi_odds) {
  const int R = xi_odds.rows();
  const int C = xi_odds.cols();
  const auto& pr = xi_odds.perms().rows;
  const auto& pc = xi_odds.perms().cols;
  // log of the completed cell value at original position (i, j)
  auto log_cell = [&](int i, int j) {
    const int a = pr[static_cast<std::size_t>(i)];
    const int b = pc[static_cast<std::size_t>(j)];
    return xi_odds.entry_offset(a, b) - xi_odds.entry_power(a, b) * xi_odds.xi();
  };
  ParamVector out(R, C);
  int k = 0;
  for (int j = 1; j < C; ++j) out[k++] = log_cell(0, j) - log_cell(0, 0);
  for (int i = 1; i < R; ++i) {
    for (int j = 1; j < C; ++j) {
      out[k++] = log_cell(i, j) + log_cell(0, 0) - log_cell(i, 0) - log_cell(0, j);
    }
  }
  return out;
}

}  // namespace ecotab
