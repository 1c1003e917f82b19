#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ecotab/estimators.hpp"
#include "ecotab/extreme.hpp"
#include "ecotab/tables.hpp"

namespace ecotab {

// Margins literal "r1,r2,.../c1,c2,...", e.g. "8,20,12/12,7,21".
MarginPair parse_margins(const std::string& literal);

// Permutation literal "3,4,1,2/2,1,3,4" with 1-based positions: the k-th
// number is the position category k moves to.
PermutationPair parse_perms(const std::string& literal, int n_rows, int n_cols);

// Per-unit margins with header "unit,r1,...,rR,c1,...,cC".
struct UnitsFile {
  int rows = 0;
  int cols = 0;
  std::vector<std::string> ids;
  std::vector<MarginPair> units;
};

UnitsFile read_units_csv(std::istream& in);
UnitsFile read_units_csv_file(const std::string& path);
void write_units_csv(std::ostream& out, const UnitsFile& units);

// Number formatted with 12 significant digits.
std::string format_sig(double x);

// FitResult JSON: probs (row-major), params, loglik, iterations, converged,
// score_norm, plus dimensions. include_trace adds the per-iteration records.
std::string fit_result_json(const FitResult& fit, bool include_trace = false,
                            double me = std::numeric_limits<double>::quiet_NaN());

// Truth sidecar emitted next to simulated data: the generating matrix and
// the seed, plus the design sizes and resampling count.
struct TruthSidecar {
  CondProbMatrix pi;
  std::uint64_t seed;
};

std::string truth_sidecar_json(const CondProbMatrix& pi, std::uint64_t seed, int s, int n,
                               int rejections);
TruthSidecar read_truth_sidecar(std::istream& in);
TruthSidecar read_truth_sidecar_file(const std::string& path);

// R x C row-stochastic matrix from a JSON file holding nested arrays, either
// bare or under a "pi" key.
CondProbMatrix read_prob_matrix_file(const std::string& path);

}  // namespace ecotab
