#include "ecotab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>

namespace ecotab {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int parse_int(const std::string& tok, const char* what) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &pos);
  } catch (const std::exception&) {
    throw InputError(std::string("cannot parse ") + what + " from '" + tok + "'");
  }
  if (pos != tok.size()) {
    throw InputError(std::string("trailing characters in ") + what + " '" + tok + "'");
  }
  return v;
}

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  for (const std::string& tok : split(s, ',')) out.push_back(parse_int(tok, what));
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

CondProbMatrix prob_matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw InputError("probability matrix must be a nested JSON array");
  }
  const int R = static_cast<int>(j.size());
  const int C = static_cast<int>(j.front().size());
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(R) * C);
  for (const auto& row : j) {
    if (static_cast<int>(row.size()) != C) throw InputError("ragged probability matrix");
    for (const auto& v : row) values.push_back(v.get<double>());
  }
  return CondProbMatrix(R, C, std::move(values));
}

}  // namespace

MarginPair parse_margins(const std::string& literal) {
  const auto sides = split(literal, '/');
  if (sides.size() != 2) {
    throw InputError("margins literal must be 'r1,r2,.../c1,c2,...'");
  }
  return MarginPair(parse_int_list(sides[0], "row total"),
                    parse_int_list(sides[1], "column total"));
}

PermutationPair parse_perms(const std::string& literal, int n_rows, int n_cols) {
  const auto sides = split(literal, '/');
  if (sides.size() != 2) {
    throw InputError("permutation literal must be 'p1,...,pR/q1,...,qC'");
  }
  PermutationPair p;
  p.rows = parse_int_list(sides[0], "row position");
  p.cols = parse_int_list(sides[1], "column position");
  if (static_cast<int>(p.rows.size()) != n_rows || static_cast<int>(p.cols.size()) != n_cols) {
    throw InputError("permutation lengths do not match the margins");
  }
  for (int& v : p.rows) --v;
  for (int& v : p.cols) --v;
  return p;
}

UnitsFile read_units_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty units file");
  const auto header = split(trim(line), ',');
  if (header.empty() || header[0] != "unit") {
    throw InputError("units file header must start with 'unit'");
  }
  int R = 0;
  int C = 0;
  std::size_t k = 1;
  while (k < header.size() && header[k] == "r" + std::to_string(R + 1)) {
    ++R;
    ++k;
  }
  while (k < header.size() && header[k] == "c" + std::to_string(C + 1)) {
    ++C;
    ++k;
  }
  if (R == 0 || C == 0 || k != header.size()) {
    throw InputError("units file header must be unit,r1..rR,c1..cC");
  }

  UnitsFile out;
  out.rows = R;
  out.cols = C;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto fields = split(t, ',');
    if (static_cast<int>(fields.size()) != 1 + R + C) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(1 + R + C) + " fields");
    }
    std::vector<int> rows(static_cast<std::size_t>(R));
    std::vector<int> cols(static_cast<std::size_t>(C));
    for (int i = 0; i < R; ++i) rows[static_cast<std::size_t>(i)] = parse_int(fields[1 + i], "row total");
    for (int j = 0; j < C; ++j) cols[static_cast<std::size_t>(j)] = parse_int(fields[1 + R + j], "column total");
    try {
      out.units.emplace_back(std::move(rows), std::move(cols));
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    }
    out.ids.push_back(fields[0]);
  }
  if (out.units.empty()) throw InputError("units file contains no data rows");
  return out;
}

UnitsFile read_units_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open units file '" + path + "'");
  return read_units_csv(in);
}

void write_units_csv(std::ostream& out, const UnitsFile& units) {
  out << "unit";
  for (int i = 1; i <= units.rows; ++i) out << ",r" << i;
  for (int j = 1; j <= units.cols; ++j) out << ",c" << j;
  out << "\n";
  for (std::size_t h = 0; h < units.units.size(); ++h) {
    out << units.ids[h];
    for (int v : units.units[h].row_totals()) out << ',' << v;
    for (int v : units.units[h].col_totals()) out << ',' << v;
    out << "\n";
  }
}

std::string format_sig(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string fit_result_json(const FitResult& fit, bool include_trace, double me) {
  nlohmann::json j;
  j["rows"] = fit.probs.rows();
  j["cols"] = fit.probs.cols();
  j["probs"] = fit.probs.values();
  j["params"] = fit.params.packed();
  j["loglik"] = fit.loglik;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["score_norm"] = fit.score_norm;
  if (include_trace) {
    nlohmann::json trace = nlohmann::json::array();
    for (const IterationRecord& r : fit.trace) {
      trace.push_back({{"iteration", r.iteration},
                       {"loglik", r.loglik},
                       {"score_norm", r.score_norm}});
    }
    j["trace"] = std::move(trace);
  }
  if (!std::isnan(me)) j["me"] = me;
  return j.dump(2) + "\n";
}

std::string truth_sidecar_json(const CondProbMatrix& pi, std::uint64_t seed, int s, int n,
                               int rejections) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < pi.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < pi.cols(); ++j) row.push_back(pi.at(i, j));
    rows.push_back(std::move(row));
  }
  nlohmann::json j;
  j["pi"] = std::move(rows);
  j["seed"] = seed;
  j["units"] = s;
  j["unit_total"] = n;
  j["rejections"] = rejections;
  return j.dump(2) + "\n";
}

TruthSidecar read_truth_sidecar(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("cannot parse sidecar: ") + e.what());
  }
  if (!j.contains("pi")) throw InputError("sidecar is missing 'pi'");
  const std::uint64_t seed = j.value("seed", std::uint64_t{0});
  return TruthSidecar{prob_matrix_from_json(j["pi"]), seed};
}

TruthSidecar read_truth_sidecar_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sidecar '" + path + "'");
  return read_truth_sidecar(in);
}

CondProbMatrix read_prob_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("cannot parse matrix file: ") + e.what());
  }
  if (j.is_object() && j.contains("pi")) return prob_matrix_from_json(j["pi"]);
  return prob_matrix_from_json(j);
}

}  // namespace ecotab
