#include "ecotab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "ecotab/estimators.hpp"
#include "ecotab/extreme.hpp"
#include "ecotab/io.hpp"
#include "ecotab/likelihood.hpp"
#include "ecotab/rng.hpp"
#include "ecotab/simulate.hpp"
#include "ecotab/tables.hpp"

namespace ecotab {

namespace {

// Directs results to --out when given, otherwise to the session stream.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void print_table_block(std::ostream& out, std::size_t index, const TableView& t) {
  out << "table," << index << "\n";
  for (int i = 0; i < t.rows(); ++i) {
    for (int j = 0; j < t.cols(); ++j) {
      if (j > 0) out << ',';
      out << t.at(i, j);
    }
    out << "\n";
  }
  out << "\n";
}

// Permuted-order layout with the margins appended on the right and below.
void print_extreme_layout(std::ostream& out, const ExtremeTable& z) {
  const int R = z.table.rows();
  const int C = z.table.cols();
  const auto perm = z.permuted_entries();
  std::vector<int> row_tot(static_cast<std::size_t>(R), 0);
  std::vector<int> col_tot(static_cast<std::size_t>(C), 0);
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) {
      row_tot[static_cast<std::size_t>(i)] += perm[static_cast<std::size_t>(i) * C + j];
      col_tot[static_cast<std::size_t>(j)] += perm[static_cast<std::size_t>(i) * C + j];
    }
  }
  int width = 1;
  for (long long v = z.table.margins().total(); v >= 10; v /= 10) ++width;

  out << "# perms ";
  for (std::size_t k = 0; k < z.perms.rows.size(); ++k) {
    out << (k ? "," : "") << z.perms.rows[k] + 1;
  }
  out << '/';
  for (std::size_t k = 0; k < z.perms.cols.size(); ++k) {
    out << (k ? "," : "") << z.perms.cols[k] + 1;
  }
  out << "\n";
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) {
      out << std::setw(width) << perm[static_cast<std::size_t>(i) * C + j] << ' ';
    }
    out << "| " << std::setw(width) << row_tot[static_cast<std::size_t>(i)] << "\n";
  }
  for (int j = 0; j < C; ++j) out << std::setw(width) << col_tot[static_cast<std::size_t>(j)] << ' ';
  out << "| " << std::setw(width) << z.table.margins().total() << "\n";
}

struct EnumerateArgs {
  std::string margins;
  std::size_t limit = kDefaultTableLimit;
  bool count_only = false;
  std::string out_path;
};

int cmd_enumerate(const EnumerateArgs& a, std::ostream& out) {
  const MarginPair margins = parse_margins(a.margins);
  OutputTarget target(a.out_path, out);
  std::size_t count = 0;
  if (a.count_only) {
    fold_tables(margins, std::size_t{0}, [&](const TableView&, std::size_t& acc) {
      if (++acc > a.limit) {
        throw BudgetError("table enumeration exceeded limit of " + std::to_string(a.limit),
                          a.limit);
      }
      count = acc;
    });
    target.stream() << count << "\n";
    return exit_code::ok;
  }
  fold_tables(margins, std::size_t{0}, [&](const TableView& t, std::size_t& acc) {
    if (++acc > a.limit) {
      throw BudgetError("table enumeration exceeded limit of " + std::to_string(a.limit),
                        a.limit);
    }
    count = acc;
    print_table_block(target.stream(), acc, t);
  });
  target.stream() << "count," << count << "\n";
  return exit_code::ok;
}

struct ExtremeArgs {
  std::string margins;
  std::string perms;
  bool all = false;
  std::string out_path;
};

int cmd_extreme(const ExtremeArgs& a, std::ostream& out) {
  const MarginPair margins = parse_margins(a.margins);
  OutputTarget target(a.out_path, out);
  if (a.all) {
    const auto extremes = enumerate_extremes(margins);
    for (std::size_t k = 0; k < extremes.size(); ++k) {
      if (k) target.stream() << "\n";
      print_extreme_layout(target.stream(), extremes[k]);
    }
    target.stream() << "count," << extremes.size() << "\n";
    return exit_code::ok;
  }
  if (a.perms.empty()) throw InputError("pass --perms or --all");
  const PermutationPair perms = parse_perms(a.perms, margins.rows(), margins.cols());
  print_extreme_layout(target.stream(), build_extreme(margins, perms));
  return exit_code::ok;
}

struct ScanArgs {
  std::string margins;
  double xi = 115.13;  // matches replacing zeros by 1e-50
  int random_mixtures = 0;
  std::uint64_t seed = 0;
  std::optional<double> floor;
  std::size_t limit = kDefaultTableLimit;
  std::string out_path;
};

int cmd_scan(const ScanArgs& a, std::ostream& out) {
  const MarginPair margins = parse_margins(a.margins);
  OutputTarget target(a.out_path, out);
  std::ostream& os = target.stream();

  const TableCollection coll = enumerate_tables(margins, a.limit);
  std::set<std::vector<int>> extreme_keys;
  for (const ExtremeTable& z : enumerate_extremes(margins)) {
    extreme_keys.insert(z.table.entries());
  }

  os << "index,loglik,kind\n";
  std::size_t index = 0;
  for (std::size_t k = 0; k < coll.size(); ++k) {
    const ParamVector params = table_distribution_params(coll.view(k), a.xi);
    const double ll = marginal_loglik(coll, params);
    const auto e = coll.entries(k);
    const bool is_extreme = extreme_keys.contains(std::vector<int>(e.begin(), e.end()));
    os << ++index << ',' << format_sig(ll) << ',' << (is_extreme ? "extreme" : "ordinary")
       << "\n";
  }

  const ParamVector indep = independence_params(margins);
  os << ++index << ',' << format_sig(marginal_loglik(coll, indep)) << ",independence\n";

  if (a.random_mixtures > 0) {
    const int R = margins.rows();
    const int C = margins.cols();
    const CondProbMatrix base = link(indep);
    Rng rng(a.seed);
    for (int m = 0; m < a.random_mixtures; ++m) {
      const double w = rng.uniform();
      std::vector<double> p(static_cast<std::size_t>(R) * C);
      for (int i = 0; i < R; ++i) {
        const std::vector<double> row = rng.dirichlet_flat(C);
        for (int j = 0; j < C; ++j) {
          p[static_cast<std::size_t>(i) * C + j] =
              w * row[static_cast<std::size_t>(j)] + (1.0 - w) * base.at(i, j);
        }
      }
      const double ll = marginal_loglik(coll, inverse_link(CondProbMatrix(R, C, std::move(p))));
      ++index;
      if (a.floor && ll < *a.floor) continue;
      os << index << ',' << format_sig(ll) << ",random_mixture\n";
    }
  }
  return exit_code::ok;
}

struct EstimateArgs {
  std::string units_path;
  std::string method = "ml";
  std::uint64_t seed = 0;
  std::string out_path;
  std::size_t max_tables = kDefaultTableLimit;
  std::string truth_path;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  const UnitsFile units = read_units_csv_file(a.units_path);
  const EIDataset data(units.units, a.max_tables);

  FitResult fit = [&] {
    if (a.method == "ml") return fisher_scoring(data);
    if (a.method == "independence") return independence_fit(data);
    if (a.method == "goodman") {
      const GoodmanResult g = goodman(data);
      const ParamVector params = inverse_link(g.repaired);
      FitResult r{params,
                  g.repaired,
                  dataset_loglik(data, params),
                  0,
                  false,
                  0.0,
                  std::numeric_limits<double>::quiet_NaN(),
                  {}};
      const ScoreSet scores = dataset_score(data, params);
      r.score_norm = scores.total.lpNorm<Eigen::Infinity>();
      r.converged = r.score_norm < 1e-5;
      return r;
    }
    throw InputError("unknown method '" + a.method + "'");
  }();

  double me = std::numeric_limits<double>::quiet_NaN();
  if (!a.truth_path.empty()) {
    me = metric_me(fit.probs, read_truth_sidecar_file(a.truth_path).pi);
  }
  OutputTarget target(a.out_path, out);
  target.stream() << fit_result_json(fit, a.method == "ml", me);
  if (a.method == "ml" && !fit.converged) return exit_code::convergence;
  return exit_code::ok;
}

struct SimulateArgs {
  int s = 60;
  int n = 40;
  int R = 3;
  int C = 3;
  std::string pi = "table3";
  std::uint64_t seed = 1;
  std::string out_path;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& err) {
  CondProbMatrix pi = (a.pi == "table3" || a.pi == "default")
                          ? builtin_truth_pi()
                          : read_prob_matrix_file(a.pi);
  if (pi.rows() != a.R || pi.cols() != a.C) {
    throw InputError("probability matrix does not match --R/--C");
  }
  const SimulationResult sim = simulate_units(SimulationConfig{a.s, a.n, pi, a.seed});

  std::ofstream units_out(a.out_path);
  if (!units_out) throw InputError("cannot open output file '" + a.out_path + "'");
  write_units_csv(units_out, sim.units);

  std::string sidecar_path = a.out_path;
  if (sidecar_path.ends_with(".csv")) sidecar_path.resize(sidecar_path.size() - 4);
  sidecar_path += ".truth.json";
  std::ofstream sidecar_out(sidecar_path);
  if (!sidecar_out) throw InputError("cannot open sidecar file '" + sidecar_path + "'");
  sidecar_out << truth_sidecar_json(pi, a.seed, a.s, a.n, sim.rejections);

  err << "wrote " << a.out_path << " and " << sidecar_path;
  if (sim.rejections > 0) err << " (" << sim.rejections << " units resampled)";
  err << "\n";
  return exit_code::ok;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact marginal-likelihood tools for two-way tables observed by margins"};
  app.require_subcommand(1);

  EnumerateArgs en;
  auto* enumerate = app.add_subcommand(
      "enumerate", "list or count all tables compatible with the given margins");
  enumerate->add_option("margins", en.margins, "margins literal r1,r2,.../c1,c2,...")->required();
  enumerate->add_option("--limit", en.limit, "abort after this many tables");
  enumerate->add_flag("--count-only", en.count_only, "print only the table count");
  enumerate->add_option("--out", en.out_path, "write to a file instead of stdout");

  ExtremeArgs ex;
  auto* extreme = app.add_subcommand("extreme", "construct extreme (upper-bound) tables");
  extreme->add_option("margins", ex.margins, "margins literal")->required();
  extreme->add_option("--perms", ex.perms, "permutation literal p1,../q1,.. (1-based)");
  extreme->add_flag("--all", ex.all, "all distinct extreme tables");
  extreme->add_option("--out", ex.out_path, "write to a file instead of stdout");

  ScanArgs sc;
  auto* scan = app.add_subcommand(
      "scan", "log-likelihood of every table-derived distribution for one margin pair");
  scan->add_option("margins", sc.margins, "margins literal")->required();
  scan->add_option("--xi", sc.xi, "zeros become exp(-xi) (default 115.13)");
  scan->add_option("--random-mixtures", sc.random_mixtures,
                   "append this many random independence mixtures");
  scan->add_option("--seed", sc.seed, "seed for the random mixtures");
  double floor_value = 0.0;
  auto* floor_opt =
      scan->add_option("--scan-floor", floor_value, "drop mixtures with log-likelihood below");
  scan->add_option("--limit", sc.limit, "table enumeration budget");
  scan->add_option("--out", sc.out_path, "write CSV to a file instead of stdout");

  EstimateArgs es;
  auto* estimate = app.add_subcommand("estimate", "fit shared conditional rows from unit margins");
  estimate->add_option("units", es.units_path, "units CSV file")->required();
  estimate->add_option("--method", es.method, "ml, goodman, or independence")
      ->check(CLI::IsMember({"ml", "goodman", "independence"}));
  estimate->add_option("--seed", es.seed, "reserved for stochastic methods");
  estimate->add_option("--out", es.out_path, "write JSON to a file instead of stdout");
  estimate->add_option("--max-tables", es.max_tables, "per-unit table enumeration budget");
  estimate->add_option("--truth", es.truth_path, "truth sidecar; adds the accuracy metric");

  SimulateArgs si;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic multi-unit dataset");
  simulate->add_option("--s", si.s, "number of units");
  simulate->add_option("--n", si.n, "total count per unit");
  simulate->add_option("--R", si.R, "row categories");
  simulate->add_option("--C", si.C, "column categories");
  simulate->add_option("--pi", si.pi, "'table3' or a JSON matrix file");
  simulate->add_option("--seed", si.seed, "generator seed");
  simulate->add_option("--out", si.out_path, "units CSV path (sidecar written next to it)")
      ->required();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return exit_code::ok;
    }
    err << "error: " << e.what() << "\n";
    return exit_code::input;
  }

  try {
    if (*enumerate) return cmd_enumerate(en, out);
    if (*extreme) return cmd_extreme(ex, out);
    if (*scan) {
      if (*floor_opt) sc.floor = floor_value;
      return cmd_scan(sc, out);
    }
    if (*estimate) return cmd_estimate(es, out);
    if (*simulate) return cmd_simulate(si, err);
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::budget;
  } catch (const IdentificationError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::identification;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::convergence;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::input;
  }
  return exit_code::input;
}

}  // namespace ecotab
