#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "ecotab/likelihood.hpp"

namespace ecotab {

struct IterationRecord {
  int iteration;
  double loglik;
  double score_norm;
};

// Output of a fitted model. `converged` means the likelihood equations are
// satisfied: the max-norm of the total score is below tolerance. probs is
// always link(params).
struct FitResult {
  ParamVector params;
  CondProbMatrix probs;
  double loglik;
  int iterations;
  bool converged;
  double score_norm;
  double info_condition;  // condition estimate of the empirical information
  std::vector<IterationRecord> trace;
};

// Least-squares estimate of the conditional rows plus its repaired,
// row-stochastic version.
struct GoodmanResult {
  int rows;
  int cols;
  std::vector<double> raw;  // R x C, unconstrained, may leave [0,1]
  CondProbMatrix repaired;
  int clipped_cells;
};

// Regression core: least squares of the first C-1 columns of V on U, one
// right-hand side per column, last column filled by complement. U is s x R
// of unit row shares, V is s x C of unit column shares. Requires s >= R and
// full column rank of U.
Eigen::MatrixXd goodman_raw(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V);

// Regression baseline on a dataset: raw estimate, then clip to
// [delta, 1-delta], renormalize rows, and rake the implied aggregate joint
// table back onto the aggregate margins.
GoodmanResult goodman(const EIDataset& data, double clip_delta = 1e-6);

// Alternating row/column scaling of a strictly positive matrix until every
// margin matches within tol; preserves the cross-product ratios. Throws
// ConvergenceError after max_sweeps sweeps.
std::vector<double> ipf_adjust(std::span<const double> joint, const MarginPair& target,
                               double tol = 1e-10, int max_sweeps = 1000);

struct FisherOptions {
  int max_iterations = 100;
  double score_tol = 1e-6;      // converged when max|u| drops below this
  double loglik_tol = 1e-9;     // stop when an accepted step gains less
  int max_halvings = 20;
  std::size_t limit = kDefaultTableLimit;
};

// Maximizes the exact multinomial marginal likelihood by scoring steps
// beta <- beta + step * E^-1 u, halving the step until the log-likelihood
// does not decrease. Default start is the repaired regression estimate,
// falling back to independence when the regression is not identified.
// Requires s >= R(C-1); throws IdentificationError when the empirical
// information is singular.
FitResult fisher_scoring(const EIDataset& data,
                         const std::optional<ParamVector>& init = std::nullopt,
                         const FisherOptions& opts = {});

// Closed-form fit with every row equal to the aggregate column shares.
FitResult independence_fit(const EIDataset& data);

// Root mean square discrepancy between estimated and true conditional
// probabilities. For an estimate shared across units the unit count cancels.
double metric_me(const CondProbMatrix& estimate, const CondProbMatrix& truth);
double metric_me(const std::vector<CondProbMatrix>& per_unit, const CondProbMatrix& truth);

// Root mean square discrepancy between the conditional rows of a table and
// the true matrix, averaged over all R*C cells.
double metric_m(const FreqTable& z, const CondProbMatrix& truth);
double metric_m(const ExtremeTable& z, const CondProbMatrix& truth);

}  // namespace ecotab
