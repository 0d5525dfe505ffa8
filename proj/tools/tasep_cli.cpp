// Command-line front end: exact formula evaluation, kinetic Monte Carlo,
// master-equation oracle, three-way comparison, and the identity suite.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource
// or numeric error.  All commands are deterministic given flags + seed,
// including under different thread counts (TASEP_THREADS or --threads).

#include "CLI11.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include "tasep/bethe.hpp"
#include "tasep/detail/parallel.hpp"
#include "tasep/exact.hpp"
#include "tasep/identities.hpp"
#include "tasep/model.hpp"
#include "tasep/oracle.hpp"
#include "tasep/simulator.hpp"

namespace {

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_int(long long v) { return std::to_string(v); }

// column-typed row buffer emitted as CSV or JSON in deterministic row order
struct Table {
  std::vector<std::string> columns;
  std::string kinds;  // per column: 'i' integer, 'f' real, 's' string
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out += columns[c];
      out += (c + 1 < columns.size()) ? "," : "\n";
    }
    for (const auto& row : rows)
      for (std::size_t c = 0; c < row.size(); ++c) {
        out += row[c];
        out += (c + 1 < row.size()) ? "," : "\n";
      }
    return out;
  }

  std::string to_json() const {
    std::string out = "[";
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out += (r == 0) ? "\n" : ",\n";
      out += "  {";
      for (std::size_t c = 0; c < columns.size(); ++c) {
        out += "\"" + columns[c] + "\": ";
        if (kinds[c] == 's')
          out += "\"" + rows[r][c] + "\"";
        else
          out += rows[r][c];
        if (c + 1 < columns.size()) out += ", ";
      }
      out += "}";
    }
    out += "\n]\n";
    return out;
  }
};

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file: " + path);
  f << text;
}

// "1,3,5" and inclusive ranges "0:4"; tokens may mix
std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string tok = text.substr(start, end - start);
    if (tok.empty()) throw std::invalid_argument(std::string(what) + ": empty list entry");
    const std::size_t colon = tok.find(':', tok[0] == '-' ? 1 : 0);
    try {
      std::size_t used = 0;
      if (colon == std::string::npos) {
        const int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        out.push_back(v);
      } else {
        const std::string lo_s = tok.substr(0, colon), hi_s = tok.substr(colon + 1);
        const int lo = std::stoi(lo_s, &used);
        if (used != lo_s.size()) throw std::invalid_argument(tok);
        const int hi = std::stoi(hi_s, &used);
        if (used != hi_s.size()) throw std::invalid_argument(tok);
        if (lo > hi) throw std::invalid_argument(tok);
        for (int v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": cannot parse '" + tok + "'");
    }
    start = end + 1;
    if (end == text.size()) break;
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

std::vector<double> parse_real_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string tok = text.substr(start, end - start);
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (tok.empty() || used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": cannot parse '" + tok + "'");
    }
    start = end + 1;
    if (end == text.size()) break;
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// raw grid flags shared by the evaluation subcommands
struct GridOpts {
  int n = 0;
  bool step = false;
  std::string y_text;
  std::string k_text;
  std::string x_text;
  std::string t_text = "0.5,1";
  std::string format = "csv";
  std::string output;
};

void add_grid_options(CLI::App* sub, GridOpts& g) {
  sub->add_option("-N,--particles", g.n, "number of particles (required with --step)");
  sub->add_flag("--step", g.step, "step initial condition Y = (1,...,N)");
  sub->add_option("-Y,--initial", g.y_text, "explicit initial positions, e.g. 1,3,4");
  sub->add_option("-k,--marked", g.k_text, "marked-block sizes, e.g. 0,1,2 (default: 0..N)");
  sub->add_option("-x,--anchor", g.x_text, "event anchors, e.g. -1,0,1 or 0:5 (default: auto window)");
  sub->add_option("-t,--time", g.t_text, "times, e.g. 0.5,1");
  sub->add_option("--format", g.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("-o,--output", g.output, "output path (default: stdout)");
}

// validated parameter grid; row order is (k, t, x) ascending everywhere
struct Grid {
  int n = 0;
  bool step = false;
  std::vector<int> y;
  std::vector<int> ks;
  std::vector<int> xs;
  std::vector<double> ts;
};

Grid build_grid(const GridOpts& g) {
  Grid grid;
  if (g.step == !g.y_text.empty())
    throw std::invalid_argument("exactly one of --step and -Y must be given");
  if (g.step) {
    if (g.n < 1) throw std::invalid_argument("--step requires -N >= 1");
    grid.n = g.n;
    for (int i = 1; i <= grid.n; ++i) grid.y.push_back(i);
  } else {
    grid.y = parse_int_list(g.y_text, "-Y");
    for (std::size_t i = 1; i < grid.y.size(); ++i)
      if (grid.y[i - 1] >= grid.y[i])
        throw std::invalid_argument("-Y must be strictly increasing");
    grid.n = static_cast<int>(grid.y.size());
    if (g.n != 0 && g.n != grid.n) throw std::invalid_argument("-N contradicts the length of -Y");
  }
  if (grid.n > tasep::model::default_n_cap)
    throw std::invalid_argument("N exceeds the supported cap of " +
                                std::to_string(tasep::model::default_n_cap));
  grid.step = g.step;
  if (g.k_text.empty()) {
    for (int k = 0; k <= grid.n; ++k) grid.ks.push_back(k);
  } else {
    grid.ks = parse_int_list(g.k_text, "-k");
    sort_unique(grid.ks);
    for (int k : grid.ks)
      if (k < 0 || k > grid.n) throw std::invalid_argument("-k entries must lie in 0..N");
  }
  grid.ts = parse_real_list(g.t_text, "-t");
  sort_unique(grid.ts);
  for (double t : grid.ts)
    if (t < 0) throw std::invalid_argument("-t entries must be >= 0");
  if (g.x_text.empty()) {
    const auto [lo, hi] = tasep::exact::x_sweep_range(grid.n, grid.ts.back());
    for (int x = lo; x <= hi; ++x) grid.xs.push_back(x);
  } else {
    grid.xs = parse_int_list(g.x_text, "-x");
    sort_unique(grid.xs);
  }
  return grid;
}

tasep::model::ParticleConfig initial_config(const Grid& grid, int k) {
  return {grid.y, tasep::model::SpeciesSequence::nu(k, grid.n).word};
}

// test fixture: the event determinant with a deliberate off-by-one in the
// first row's weight exponent; used to prove the compare gate can fail
double perturbed_event_value(const std::vector<int>& y, int k, int x, double t) {
  using namespace tasep;
  const int n = static_cast<int>(y.size());
  auto q = exact::detail_exact::row_exponents(n, k);
  q[0] += 1;
  bethe::MomentTable moments(t);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = moments(x - y[static_cast<std::size_t>(i)] - 1 + j, q[static_cast<std::size_t>(i)]);
  return exact::detail_exact::lu_det(a).det;
}

int cmd_exact(const GridOpts& opts) {
  const Grid grid = build_grid(opts);
  Table table;
  table.columns = {"N", "k", "x", "t", "value", "method"};
  table.kinds = "iiiffs";
  struct RowSpec {
    int k, x;
    double t;
  };
  std::vector<RowSpec> specs;
  for (int k : grid.ks)
    for (double t : grid.ts)
      for (int x : grid.xs) specs.push_back({k, x, t});
  std::vector<tasep::exact::ExactResult> results(specs.size());
  tasep::detail::parallel_for(specs.size(), [&](std::size_t i) {
    const auto& s = specs[i];
    results[i] = grid.step ? tasep::exact::step_dispatch(grid.n, s.k, s.x, s.t)
                           : tasep::exact::event_probability(grid.y, s.k, s.x, s.t);
  });
  for (std::size_t i = 0; i < specs.size(); ++i)
    table.rows.push_back({fmt_int(grid.n), fmt_int(specs[i].k), fmt_int(specs[i].x),
                          fmt_real(specs[i].t), fmt_real(results[i].clamped()),
                          results[i].method});
  write_output(opts.format == "json" ? table.to_json() : table.to_csv(), opts.output);
  return 0;
}

int cmd_simulate(const GridOpts& opts, long long n_samples, std::uint64_t seed) {
  const Grid grid = build_grid(opts);
  if (n_samples < 1) throw std::invalid_argument("-n must be >= 1");
  Table table;
  table.columns = {"N", "k", "x", "t", "p_hat", "stderr"};
  table.kinds = "iiifff";
  for (int k : grid.ks) {
    const auto sweep =
        tasep::simulator::mc_event_sweep(initial_config(grid, k), k, grid.xs, grid.ts, n_samples,
                                         seed);
    for (std::size_t ti = 0; ti < grid.ts.size(); ++ti)
      for (std::size_t xi = 0; xi < grid.xs.size(); ++xi) {
        const auto& est = sweep[ti][xi];
        table.rows.push_back({fmt_int(grid.n), fmt_int(k), fmt_int(grid.xs[xi]),
                              fmt_real(grid.ts[ti]), fmt_real(est.p_hat), fmt_real(est.std_err)});
      }
  }
  write_output(opts.format == "json" ? table.to_json() : table.to_csv(), opts.output);
  return 0;
}

int cmd_oracle(const GridOpts& opts, double oracle_tol) {
  const Grid grid = build_grid(opts);
  Table table;
  table.columns = {"N", "k", "x", "t", "oracle"};
  table.kinds = "iiiff";
  tasep::simulator::OracleParams params;
  params.tol = oracle_tol;
  struct Slice {
    int k;
    double t;
  };
  std::vector<Slice> slices;
  for (int k : grid.ks)
    for (double t : grid.ts) slices.push_back({k, t});
  std::vector<tasep::simulator::OracleDistribution> dists(slices.size());
  tasep::detail::parallel_for(slices.size(), [&](std::size_t i) {
    dists[i] =
        tasep::simulator::oracle_distribution(initial_config(grid, slices[i].k), slices[i].t,
                                              params);
  });
  for (std::size_t i = 0; i < slices.size(); ++i)
    for (int x : grid.xs)
      table.rows.push_back({fmt_int(grid.n), fmt_int(slices[i].k), fmt_int(x),
                            fmt_real(slices[i].t), fmt_real(dists[i].event_mass(slices[i].k, x))});
  write_output(opts.format == "json" ? table.to_json() : table.to_csv(), opts.output);
  return 0;
}

int cmd_compare(const GridOpts& opts, long long n_samples, std::uint64_t seed, double tol,
                double oracle_tol, bool perturb) {
  const Grid grid = build_grid(opts);
  if (n_samples < 1) throw std::invalid_argument("-n must be >= 1");
  Table table;
  table.columns = {"N", "k", "x", "t", "exact", "oracle", "mc_phat", "mc_stderr", "abs_err", "z"};
  table.kinds = "iiifffffff";
  tasep::simulator::OracleParams params;
  params.tol = oracle_tol;
  bool fail = false;
  for (int k : grid.ks) {
    const auto initial = initial_config(grid, k);
    const auto sweep = tasep::simulator::mc_event_sweep(initial, k, grid.xs, grid.ts, n_samples,
                                                        seed);
    for (std::size_t ti = 0; ti < grid.ts.size(); ++ti) {
      const double t = grid.ts[ti];
      const auto dist = tasep::simulator::oracle_distribution(initial, t, params);
      for (std::size_t xi = 0; xi < grid.xs.size(); ++xi) {
        const int x = grid.xs[xi];
        double ex;
        if (perturb)
          ex = perturbed_event_value(grid.y, k, x, t);
        else
          ex = grid.step ? tasep::exact::step_dispatch(grid.n, k, x, t).clamped()
                         : tasep::exact::event_probability(grid.y, k, x, t).clamped();
        const double oracle = dist.event_mass(k, x);
        const auto& est = sweep[ti][xi];
        const double abs_err = std::abs(ex - oracle);
        // z uses the larger of the two binomial deviation scales: the
        // estimate's own stderr is 0 whenever p_hat is 0 or 1, and the
        // exact-based one is 0 at probability-0/1 points, both of which
        // happen legitimately at the edges of a grid
        const double p = std::min(1.0, std::max(0.0, ex));
        const double se = std::max(std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples)),
                                   est.std_err);
        const double diff = est.p_hat - ex;
        double z = 0.0;
        if (diff != 0.0) z = (se > 0.0) ? diff / se : (diff > 0 ? 1e300 : -1e300);
        if (abs_err > tol || std::abs(z) > 5.0) fail = true;
        table.rows.push_back({fmt_int(grid.n), fmt_int(k), fmt_int(x), fmt_real(t), fmt_real(ex),
                              fmt_real(oracle), fmt_real(est.p_hat), fmt_real(est.std_err),
                              fmt_real(abs_err), fmt_real(z)});
      }
    }
  }
  write_output(opts.format == "json" ? table.to_json() : table.to_csv(), opts.output);
  return fail ? 1 : 0;
}

int cmd_identities(std::uint64_t seed, int trials, double threshold, bool perturb,
                   const std::string& output) {
  const auto reports = tasep::identities::run_suite(
      seed, trials, threshold,
      perturb ? tasep::identities::perturbed_exponent_rule() : tasep::identities::standard_exponent);
  std::string out = "[";
  bool fail = false;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    out += (i == 0) ? "\n" : ",\n";
    out += "  {\"name\": \"" + r.name + "\", \"N\": " + fmt_int(r.n) +
           ", \"k\": " + (r.k < 0 ? std::string("null") : fmt_int(r.k)) +
           ", \"trials\": " + fmt_int(r.trials) + ", \"max_rel_err\": " + fmt_real(r.max_rel_err) +
           ", \"pass\": " + (r.pass ? "true" : "false") + "}";
    if (!r.pass) fail = true;
  }
  out += "\n]\n";
  write_output(out, output);
  return fail ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-species TASEP: exact formulas, simulation, and verification"};
  app.require_subcommand(1);
  app.set_config("--config", "", "config file with key=value lines; flags take precedence");
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: TASEP_THREADS or all cores)");

  GridOpts exact_o, sim_o, oracle_o, cmp_o;
  long long sim_n = 100000, cmp_n = 100000;
  std::uint64_t sim_seed = 12345, cmp_seed = 12345, id_seed = 12345;
  double oracle_tol = 1e-10, cmp_oracle_tol = 1e-10, cmp_tol = 1e-7;
  int id_trials = 100;
  double id_threshold = tasep::identities::default_threshold;
  bool cmp_perturb = false, id_perturb = false;
  std::string id_output;

  auto* sub_exact = app.add_subcommand("exact", "evaluate the exact formulas on a grid");
  add_grid_options(sub_exact, exact_o);

  auto* sub_sim = app.add_subcommand("simulate", "Monte Carlo event probability estimates");
  add_grid_options(sub_sim, sim_o);
  sub_sim->add_option("-n,--samples", sim_n, "number of paths");
  sub_sim->add_option("--seed", sim_seed, "random seed");

  auto* sub_oracle = app.add_subcommand("oracle", "master-equation event probabilities");
  add_grid_options(sub_oracle, oracle_o);
  sub_oracle->add_option("--oracle-tol", oracle_tol, "truncation error budget");

  auto* sub_cmp = app.add_subcommand("compare", "exact vs oracle vs Monte Carlo on one grid");
  add_grid_options(sub_cmp, cmp_o);
  sub_cmp->add_option("-n,--samples", cmp_n, "number of paths");
  sub_cmp->add_option("--seed", cmp_seed, "random seed");
  sub_cmp->add_option("--tol", cmp_tol, "max allowed |exact - oracle|");
  sub_cmp->add_option("--oracle-tol", cmp_oracle_tol, "oracle truncation error budget");
  sub_cmp->add_flag("--perturb-exponent", cmp_perturb)->group("");

  auto* sub_id = app.add_subcommand("identities", "run the algebraic identity suite");
  sub_id->add_option("--seed", id_seed, "random seed");
  sub_id->add_option("--trials", id_trials, "spectral points per check row");
  sub_id->add_option("--threshold", id_threshold, "max allowed relative error");
  sub_id->add_option("-o,--output", id_output, "output path (default: stdout)");
  sub_id->add_flag("--perturb-exponent", id_perturb)->group("");

  // let app-level options (--threads) appear after the subcommand name
  for (auto* sub : {sub_exact, sub_sim, sub_oracle, sub_cmp, sub_id}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  if (threads > 0) setenv("TASEP_THREADS", std::to_string(threads).c_str(), 1);

  try {
    if (sub_exact->parsed()) return cmd_exact(exact_o);
    if (sub_sim->parsed()) return cmd_simulate(sim_o, sim_n, sim_seed);
    if (sub_oracle->parsed()) return cmd_oracle(oracle_o, oracle_tol);
    if (sub_cmp->parsed())
      return cmd_compare(cmp_o, cmp_n, cmp_seed, cmp_tol, cmp_oracle_tol, cmp_perturb);
    if (sub_id->parsed())
      return cmd_identities(id_seed, id_trials, id_threshold, id_perturb, id_output);
  } catch (const tasep::resource_error& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const tasep::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
