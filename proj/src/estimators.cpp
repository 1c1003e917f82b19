#include "ecotab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ecotab {

namespace {

// Largest over smallest eigenvalue of a symmetric PSD matrix.
double condition_estimate(const Eigen::MatrixXd& e) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

bool is_singular(const Eigen::MatrixXd& e) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e, Eigen::EigenvaluesOnly);
  const double hi = es.eigenvalues().maxCoeff();
  const double lo = es.eigenvalues().minCoeff();
  return !(hi > 0.0) || lo <= hi * 1e-12;
}

// Shared FitResult assembly: likelihood, score norm and convergence flag
// evaluated at the given parameters.
FitResult fit_at(const EIDataset& data, const ParamVector& params, int iterations,
                 std::vector<IterationRecord> trace = {}) {
  FitResult r{params, link(params), dataset_loglik(data, params), iterations,
              false,  0.0,          std::numeric_limits<double>::quiet_NaN(),
              std::move(trace)};
  const ScoreSet scores = dataset_score(data, params);
  r.score_norm = scores.total.lpNorm<Eigen::Infinity>();
  r.converged = r.score_norm < 1e-5;
  if (data.size() >= 2) r.info_condition = condition_estimate(empirical_information(scores));
  return r;
}

}  // namespace

Eigen::MatrixXd goodman_raw(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V) {
  const Eigen::Index s = U.rows();
  const Eigen::Index R = U.cols();
  const Eigen::Index C = V.cols();
  if (V.rows() != s) throw InputError("row-share and column-share matrices disagree on units");
  if (C < 2) throw InputError("regression requires at least two columns");
  if (s < R) {
    throw IdentificationError("regression needs at least as many units as row categories");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(U);
  if (qr.rank() < R) {
    throw IdentificationError("unit row shares are rank deficient");
  }
  const Eigen::MatrixXd head = qr.solve(V.leftCols(C - 1));  // R x (C-1)
  Eigen::MatrixXd raw(R, C);
  raw.leftCols(C - 1) = head;
  raw.col(C - 1) = Eigen::VectorXd::Ones(R) - head.rowwise().sum();
  return raw;
}

GoodmanResult goodman(const EIDataset& data, double clip_delta) {
  const int R = data.rows();
  const int C = data.cols();
  const Eigen::Index s = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd U(s, R);
  Eigen::MatrixXd V(s, C);
  for (Eigen::Index h = 0; h < s; ++h) {
    const MarginPair& u = data.unit(static_cast<std::size_t>(h));
    const double n = static_cast<double>(u.total());
    for (int i = 0; i < R; ++i) U(h, i) = u.row_total(i) / n;
    for (int j = 0; j < C; ++j) V(h, j) = u.col_total(j) / n;
  }
  const Eigen::MatrixXd raw = goodman_raw(U, V);

  int clipped = 0;
  Eigen::MatrixXd p = raw;
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) {
      const double v = p(i, j);
      const double c = std::clamp(v, clip_delta, 1.0 - clip_delta);
      if (c != v) ++clipped;
      p(i, j) = c;
    }
    p.row(i) /= p.row(i).sum();
  }

  // Rake the implied aggregate joint table onto the aggregate margins, then
  // scale back to conditional rows.
  std::vector<int> agg_rows(static_cast<std::size_t>(R));
  std::vector<int> agg_cols(static_cast<std::size_t>(C));
  for (int i = 0; i < R; ++i) agg_rows[static_cast<std::size_t>(i)] = static_cast<int>(data.agg_row_total(i));
  for (int j = 0; j < C; ++j) agg_cols[static_cast<std::size_t>(j)] = static_cast<int>(data.agg_col_total(j));
  const MarginPair aggregate(agg_rows, agg_cols);

  std::vector<double> joint(static_cast<std::size_t>(R) * C);
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) {
      joint[static_cast<std::size_t>(i) * C + j] = data.agg_row_total(i) * p(i, j);
    }
  }
  const std::vector<double> raked = ipf_adjust(joint, aggregate);

  std::vector<double> repaired(static_cast<std::size_t>(R) * C);
  for (int i = 0; i < R; ++i) {
    double s_row = 0.0;
    for (int j = 0; j < C; ++j) s_row += raked[static_cast<std::size_t>(i) * C + j];
    for (int j = 0; j < C; ++j) {
      repaired[static_cast<std::size_t>(i) * C + j] = raked[static_cast<std::size_t>(i) * C + j] / s_row;
    }
  }
  std::vector<double> raw_out(raw.data(), raw.data() + raw.size());
  // Eigen stores column-major; emit row-major.
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) raw_out[static_cast<std::size_t>(i) * C + j] = raw(i, j);
  }
  return GoodmanResult{R, C, std::move(raw_out), CondProbMatrix(R, C, std::move(repaired)),
                       clipped};
}

std::vector<double> ipf_adjust(std::span<const double> joint, const MarginPair& target,
                               double tol, int max_sweeps) {
  const int R = target.rows();
  const int C = target.cols();
  if (joint.size() != static_cast<std::size_t>(R) * C) {
    throw InputError("joint table has wrong size");
  }
  for (double v : joint) {
    if (!(v > 0.0)) throw InputError("iterative proportional fitting requires positive entries");
  }
  std::vector<double> t(joint.begin(), joint.end());
  double resid = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int i = 0; i < R; ++i) {
      double s = 0.0;
      for (int j = 0; j < C; ++j) s += t[static_cast<std::size_t>(i) * C + j];
      const double f = target.row_total(i) / s;
      for (int j = 0; j < C; ++j) t[static_cast<std::size_t>(i) * C + j] *= f;
    }
    for (int j = 0; j < C; ++j) {
      double s = 0.0;
      for (int i = 0; i < R; ++i) s += t[static_cast<std::size_t>(i) * C + j];
      const double f = target.col_total(j) / s;
      for (int i = 0; i < R; ++i) t[static_cast<std::size_t>(i) * C + j] *= f;
    }
    resid = 0.0;
    for (int i = 0; i < R; ++i) {
      double s = 0.0;
      for (int j = 0; j < C; ++j) s += t[static_cast<std::size_t>(i) * C + j];
      resid = std::max(resid, std::abs(s - target.row_total(i)));
    }
    for (int j = 0; j < C; ++j) {
      double s = 0.0;
      for (int i = 0; i < R; ++i) s += t[static_cast<std::size_t>(i) * C + j];
      resid = std::max(resid, std::abs(s - target.col_total(j)));
    }
    if (resid < tol) return t;
  }
  throw ConvergenceError("proportional fitting did not converge; residual " +
                         std::to_string(resid));
}

FitResult fisher_scoring(const EIDataset& data, const std::optional<ParamVector>& init,
                         const FisherOptions& opts) {
  const int R = data.rows();
  const int C = data.cols();
  if (C < 2) throw InputError("scoring requires at least two columns");
  const Eigen::Index p = static_cast<Eigen::Index>(R) * (C - 1);
  if (static_cast<Eigen::Index>(data.size()) < p) {
    throw IdentificationError("need at least R(C-1) units; got " + std::to_string(data.size()));
  }

  ParamVector params = [&] {
    if (init) return *init;
    try {
      return inverse_link(goodman(data).repaired);
    } catch (const IdentificationError&) {
      std::vector<int> ar(static_cast<std::size_t>(R));
      std::vector<int> ac(static_cast<std::size_t>(C));
      for (int i = 0; i < R; ++i) ar[static_cast<std::size_t>(i)] = static_cast<int>(data.agg_row_total(i));
      for (int j = 0; j < C; ++j) ac[static_cast<std::size_t>(j)] = static_cast<int>(data.agg_col_total(j));
      return independence_params(MarginPair(ar, ac));
    }
  }();

  double ll = dataset_loglik(data, params);
  double score_norm = std::numeric_limits<double>::infinity();
  std::vector<IterationRecord> trace;
  bool converged = false;
  bool small_gain = false;
  int accepted = 0;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const ScoreSet scores = dataset_score(data, params);
    score_norm = scores.total.lpNorm<Eigen::Infinity>();
    trace.push_back({iter, ll, score_norm});
    if (score_norm < opts.score_tol) {
      converged = true;
      break;
    }
    // a stalled log-likelihood only ends the search once the likelihood
    // equations are essentially satisfied
    if (small_gain && score_norm < 1e-5) {
      converged = true;
      break;
    }
    const Eigen::MatrixXd info = empirical_information(scores);
    if (is_singular(info)) {
      throw IdentificationError("empirical information matrix is singular");
    }
    const Eigen::VectorXd direction = info.ldlt().solve(scores.total);

    double step = 1.0;
    double new_ll = -std::numeric_limits<double>::infinity();
    ParamVector candidate = params;
    bool improved = false;
    for (int half = 0; half <= opts.max_halvings; ++half) {
      for (int k = 0; k < static_cast<int>(p); ++k) {
        candidate[k] = params[k] + step * direction(k);
      }
      new_ll = dataset_loglik(data, candidate);
      if (new_ll >= ll) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      converged = score_norm < 1e-5;
      break;
    }
    params = candidate;
    ++accepted;
    small_gain = std::abs(new_ll - ll) < opts.loglik_tol;
    ll = new_ll;
  }

  // Final report at the last accepted parameters.
  const ScoreSet final_scores = dataset_score(data, params);
  score_norm = final_scores.total.lpNorm<Eigen::Infinity>();
  if (score_norm < opts.score_tol) converged = true;
  const double info_cond = condition_estimate(empirical_information(final_scores));
  return FitResult{params,   link(params), ll,        accepted, converged,
                   score_norm, info_cond,  std::move(trace)};
}

FitResult independence_fit(const EIDataset& data) {
  const int R = data.rows();
  const int C = data.cols();
  std::vector<double> probs(static_cast<std::size_t>(R) * C);
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) {
      probs[static_cast<std::size_t>(i) * C + j] =
          static_cast<double>(data.agg_col_total(j)) / static_cast<double>(data.total());
    }
  }
  const ParamVector params = inverse_link(CondProbMatrix(R, C, std::move(probs)));
  return fit_at(data, params, 0);
}

double metric_me(const CondProbMatrix& estimate, const CondProbMatrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw InputError("estimate and truth dimensions disagree");
  }
  double s = 0.0;
  for (int i = 0; i < estimate.rows(); ++i) {
    for (int j = 0; j < estimate.cols(); ++j) {
      const double d = estimate.at(i, j) - truth.at(i, j);
      s += d * d;
    }
  }
  return std::sqrt(s / (static_cast<double>(estimate.rows()) * estimate.cols()));
}

double metric_me(const std::vector<CondProbMatrix>& per_unit, const CondProbMatrix& truth) {
  if (per_unit.empty()) throw InputError("need at least one unit estimate");
  double s = 0.0;
  for (const CondProbMatrix& e : per_unit) {
    if (e.rows() != truth.rows() || e.cols() != truth.cols()) {
      throw InputError("estimate and truth dimensions disagree");
    }
    for (int i = 0; i < truth.rows(); ++i) {
      for (int j = 0; j < truth.cols(); ++j) {
        const double d = e.at(i, j) - truth.at(i, j);
        s += d * d;
      }
    }
  }
  const double cells = static_cast<double>(per_unit.size()) * truth.rows() * truth.cols();
  return std::sqrt(s / cells);
}

double metric_m(const FreqTable& z, const CondProbMatrix& truth) {
  if (z.rows() != truth.rows() || z.cols() != truth.cols()) {
    throw InputError("table and truth dimensions disagree");
  }
  double s = 0.0;
  for (int i = 0; i < z.rows(); ++i) {
    const double row = static_cast<double>(z.margins().row_total(i));
    for (int j = 0; j < z.cols(); ++j) {
      const double d = z.at(i, j) / row - truth.at(i, j);
      s += d * d;
    }
  }
  return std::sqrt(s / (static_cast<double>(z.rows()) * z.cols()));
}

double metric_m(const ExtremeTable& z, const CondProbMatrix& truth) {
  return metric_m(z.table, truth);
}

}  // namespace ecotab
