// conleyflow: combinatorial dynamics on finite simplicial complexes.
// Validates system files, computes Conley-Morse graphs and Conley indices,
// builds isolating blocks in the exact geometric realization, simulates the
// glued flow, and runs the verification suites. Exit codes: 0 ok, 1
// verification/validation failure, 2 usage error.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conleyflow/conley.hpp"
#include "conleyflow/geometry.hpp"
#include "conleyflow/io.hpp"
#include "conleyflow/semiflow.hpp"
#include "conleyflow/verify.hpp"

namespace {

using namespace conleyflow;

// stdout when the path is empty or "-", a file otherwise
struct OutSink {
  std::ofstream file;
  std::ostream* os = nullptr;
  explicit OutSink(const std::string& path) {
    if (path.empty() || path == "-") {
      os = &std::cout;
    } else {
      file.open(path, std::ios::binary | std::ios::trunc);
      if (!file) throw UsageError("cannot open output file: " + path);
      os = &file;
    }
  }
  std::ostream& out() { return *os; }
};

struct Args {
  std::string input;
  bool complete_critical = false;
  std::string epsilon;
  std::string set_text;
  std::string from_text;
  std::string dot_path;
  std::string json_path;
  std::string out_path;
  std::string events_path;
  double tmax = 10.0;
  double dt = 1e-3;
  long samples = 2000;
  std::uint64_t seed = 42;
  bool negative_control = false;
};

Rational geometry_threshold(const Args& a, const SimplicialComplex& X) {
  Rational eps = a.epsilon.empty() ? default_threshold(X) : parse_rational(a.epsilon);
  require_geometry_threshold(eps, X);
  return eps;
}

Rational field_threshold(const Args& a, const SimplicialComplex& X) {
  Rational eps = a.epsilon.empty() ? default_threshold(X) : parse_rational(a.epsilon);
  require_field_threshold(eps, X);
  return eps;
}

int run_validate(const Args& a) {
  auto ps = load_system(a.input, a.complete_critical);
  const auto& X = *ps.complex;
  std::cout << "complex: " << X.vertex_count() << " vertices, " << X.size()
            << " simplices, dimension " << X.dimension() << "\n";
  if (X.size() > ps.listed_simplices)
    std::cout << "closure added " << X.size() - ps.listed_simplices << " faces\n";
  if (ps.completed_critical)
    std::cout << "completed " << ps.completed_critical << " uncovered simplices as critical\n";
  long critical = 0;
  for (const auto& c : ps.cells) critical += c.critical() ? 1 : 0;
  std::cout << "vector field: " << critical << " critical cells, "
            << ps.cells.size() - static_cast<std::size_t>(critical) << " arrows\n";
  auto rep = CombinatorialVectorField::validate_cells(X, ps.cells);
  if (!rep.ok) {
    for (const auto& p : rep.problems) std::cout << "problem: " << p << "\n";
    std::cout << "invalid: " << rep.problems.size() << " problem(s)\n";
    return 1;
  }
  std::cout << "ok\n";
  return 0;
}

int run_morse(const Args& a) {
  auto sys = build_system(load_system(a.input, a.complete_critical));
  auto g = finest_morse_decomposition(*sys.field);
  if (!a.json_path.empty()) {
    OutSink sink(a.json_path);
    sink.out() << morse_to_json(g, *sys.complex).dump(2) << "\n";
  }
  if (!a.dot_path.empty() || a.json_path.empty()) {
    OutSink sink(a.dot_path);
    sink.out() << to_dot(g, *sys.complex);
  }
  return 0;
}

int run_index(const Args& a) {
  auto sys = build_system(load_system(a.input, a.complete_critical));
  auto S = parse_simplex_set(a.set_text, *sys.complex);
  std::cout << "set: " << detail::node_label(S, *sys.complex) << "\n";
  auto rep = isolation_report(S, *sys.field);
  if (!rep.ok) {
    std::cout << "isolated: no (" << rep.reason << ")\n";
    return 1;
  }
  auto p = conley_index(S, *sys.field);
  std::cout << "isolated: yes\n";
  std::cout << "p(t) = " << p.str() << "\n";
  std::cout << "betti: " << Json(p.coefficients()).dump() << "\n";
  return 0;
}

int run_block(const Args& a) {
  auto sys = build_system(load_system(a.input, a.complete_critical));
  const auto& X = *sys.complex;
  auto S = parse_simplex_set(a.set_text, X);
  Rational eps = geometry_threshold(a, X);
  Realization R(X, eps);
  auto pd = R.index_pairs(S, *sys.field);
  const bool agree = pd.exit_def == pd.exit_table;
  std::cout << "set: " << detail::node_label(S, X) << "\n";
  std::cout << "threshold: " << rational_str(eps) << "\n";
  std::cout << "partition cells: " << R.universe().size() << "\n";
  std::cout << "block cells: " << pd.block.size() << "\n";
  std::cout << "exit cells: " << pd.exit_def.size() << "\n";
  std::cout << "closure neighborhood cells: " << pd.q1.size() << "\n";
  std::cout << "mouth neighborhood cells: " << pd.q2.size() << "\n";
  std::cout << "exit characterizations agree: " << (agree ? "yes" : "no") << "\n";
  for (const auto& c : pd.exit_def) std::cout << "exit cell: " << cell_label(c, X) << "\n";
  return agree ? 0 : 1;
}

int run_homology_equiv(const Args& a) {
  auto sys = build_system(load_system(a.input, a.complete_critical));
  const auto& X = *sys.complex;
  Rational eps = geometry_threshold(a, X);
  std::vector<verify::EquivalenceRow> rows;
  if (!a.set_text.empty()) {
    Realization R(X, eps);
    rows.push_back(verify::equivalence_row(parse_simplex_set(a.set_text, X), *sys.field, R));
  } else {
    rows = verify::index_equivalence_suite(*sys.field, eps).rows;
  }
  bool all_ok = true;
  std::cout << "threshold: " << rational_str(eps) << "\n";
  for (const auto& r : rows) {
    all_ok = all_ok && r.ok();
    std::cout << "set: " << r.label << "\n";
    std::cout << "  combinatorial p(t) = " << r.combinatorial.str() << "\n";
    std::cout << "  block pair p(t) = " << r.block_pair.str() << "\n";
    std::cout << "  neighborhood pair p(t) = " << r.neighborhood_pair.str() << "\n";
    std::cout << "  exit characterizations agree: " << (r.exit_sets_agree ? "yes" : "no") << "\n";
    std::cout << "  match: " << (r.ok() ? "yes" : "no") << "\n";
  }
  std::cout << "all equivalent: " << (all_ok ? "yes" : "no") << "\n";
  return all_ok ? 0 : 1;
}

int run_simulate(const Args& a) {
  auto sys = build_system(load_system(a.input, a.complete_critical));
  const auto& X = *sys.complex;
  Rational eps_exact = field_threshold(a, X);
  const double eps = threshold_as_double(eps_exact);
  if (!(a.dt > 0)) throw UsageError("dt must be positive");
  if (!(a.tmax >= 0)) throw UsageError("tmax must be nonnegative");
  auto x0 = parse_point(a.from_text, X);

  SemiflowParams prm;
  prm.dt = a.dt;
  Semiflow flow(*sys.field, eps, prm);

  OutSink csv(a.out_path);
  csv.out() << "t";
  for (const auto& n : X.vertex_names()) csv.out() << ",x_" << n;
  csv.out() << ",tile\n";
  auto sink = [&csv](double t, const std::vector<double>& x, int ci) {
    csv.out() << fmt17(t);
    for (double v : x) csv.out() << ',' << fmt17(v);
    csv.out() << ',' << ci << '\n';
  };
  auto res = flow.run(x0, a.tmax, sink);

  if (!a.events_path.empty()) {
    OutSink ev(a.events_path);
    for (const auto& v : res.visits) {
      const VCell& cell = sys.field->cells()[static_cast<std::size_t>(v.cell_index)];
      Json enter{{"event", "enter"},
                 {"t", v.t_enter},
                 {"tile", v.cell_index},
                 {"carrier", carrier_label(cell, X)}};
      ev.out() << enter.dump() << "\n";
      const char* kind = v.settled            ? "settle"
                         : v.budget_hit       ? "budget"
                         : v.exited_through_wall ? "exit"
                                               : "horizon";
      Json leave{{"event", kind}, {"t", v.t_exit}, {"tile", v.cell_index}};
      ev.out() << leave.dump() << "\n";
    }
    Json end{{"event", "end"}, {"t", res.t}, {"settled", res.settled}};
    ev.out() << end.dump() << "\n";
  }

  std::cerr << "simulated to t=" << fmt17(res.t) << ", " << res.visits.size() << " tile visit(s)"
            << (res.settled ? ", settled" : "")
            << (res.budget_exceeded ? ", residence budget exceeded" : "") << "\n";
  return 0;
}

int run_verify(const Args& a) {
  auto sys = build_system(load_system(a.input, a.complete_critical));
  const auto& X = *sys.complex;
  Rational eps_exact = field_threshold(a, X);
  const double eps = threshold_as_double(eps_exact);
  if (a.samples < 0) throw UsageError("samples must be nonnegative");

  Json suites = Json::object();
  Json warnings = Json::array();
  bool all_ok = true;

  if (a.samples > 0) {
    auto b = verify::field_bounds_suite(*sys.field, eps, a.samples, a.seed, a.negative_control);
    suites["field_bounds"] = {{"samples_per_tile", a.samples},
                              {"tiles", b.tiles},
                              {"samples", b.samples},
                              {"applicable", {{"tail", b.applicable_tail},
                                              {"off_head", b.applicable_off},
                                              {"head", b.applicable_head}}},
                              {"bound_violations", b.bound_violations},
                              {"conservation_violations", b.conservation_violations},
                              {"direction_violations", b.direction_violations},
                              {"worst_conservation", b.worst_conservation},
                              {"worst_excess", b.worst_excess},
                              {"ok", b.ok()}};
    all_ok = all_ok && b.ok();

    const int trajectories = static_cast<int>(std::max(1L, a.samples / 50));
    auto adm = check_strong_admissibility(*sys.field, eps, trajectories, 20.0, a.seed, {},
                                          a.negative_control);
    Json violations = Json::array();
    for (std::size_t i = 0; i < adm.violations.size() && i < 25; ++i)
      violations.push_back({{"kind", adm.violations[i].kind},
                            {"t", adm.violations[i].t},
                            {"detail", adm.violations[i].detail}});
    suites["admissibility"] = {
        {"trajectories", adm.trajectories},
        {"crossings", adm.crossings},
        {"max_arrow_residence", adm.max_arrow_residence},
        {"residence_budget",
         {{"value", 10.0 / eps}, {"kind", "numerical surrogate for finite residence"}}},
        {"worst_conservation", adm.worst_conservation},
        {"violation_count", adm.violations.size()},
        {"violations", violations},
        {"ok", adm.ok()}};
    all_ok = all_ok && adm.ok();
  } else {
    warnings.push_back("no samples: sampled suites skipped");
  }

  auto eq = verify::index_equivalence_suite(*sys.field, eps_exact);
  Json rows = Json::array();
  for (const auto& r : eq.rows)
    rows.push_back({{"set", r.label},
                    {"combinatorial", r.combinatorial.str()},
                    {"block_pair", r.block_pair.str()},
                    {"neighborhood_pair", r.neighborhood_pair.str()},
                    {"exit_sets_agree", r.exit_sets_agree},
                    {"ok", r.ok()}});
  suites["index_equivalence"] = {{"sets", rows}, {"ok", eq.ok()}};
  all_ok = all_ok && eq.ok();

  Json report{{"input", a.input},
              {"threshold", rational_str(eps_exact)},
              {"samples", a.samples},
              {"seed", a.seed},
              {"negative_control", a.negative_control},
              {"suites", suites},
              {"warnings", warnings},
              {"ok", all_ok}};
  OutSink sink(a.out_path);
  sink.out() << report.dump(2) << "\n";
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  Args a;

  CLI::App app{
      "combinatorial dynamics on simplicial complexes: Conley-Morse graphs, Conley indices, "
      "isolating blocks, glued-flow simulation, and verification suites"};
  app.require_subcommand(1);

  auto add_input = [&a](CLI::App* cmd) {
    cmd->add_option("input", a.input, "system description (JSON)")->required();
    cmd->add_flag("--complete-critical", a.complete_critical,
                  "complete the partition by making uncovered simplices critical");
  };
  auto add_epsilon = [&a](CLI::App* cmd) {
    cmd->add_option("--epsilon", a.epsilon,
                    "exact rational threshold \"p/q\" (default 1/(8*vertices))");
  };

  CLI::App* validate = app.add_subcommand("validate", "check the complex and the vector field");
  add_input(validate);

  CLI::App* morse =
      app.add_subcommand("morse", "finest Morse decomposition and its Conley-Morse graph");
  add_input(morse);
  morse->add_option("--dot", a.dot_path, "write the graph in DOT format (\"-\" for stdout)");
  morse->add_option("--json", a.json_path, "write the graph as JSON (\"-\" for stdout)");

  CLI::App* index = app.add_subcommand("index", "Conley index of an isolated invariant set");
  add_input(index);
  index->add_option("--set", a.set_text, "simplices, e.g. \"BD\" or \"B-D,A-B-D\"")->required();

  CLI::App* block =
      app.add_subcommand("block", "isolating block and exit set in the geometric realization");
  add_input(block);
  block->add_option("--set", a.set_text, "simplices, e.g. \"BD\" or \"B-D,A-B-D\"")->required();
  add_epsilon(block);

  CLI::App* simulate = app.add_subcommand("simulate", "integrate the glued flow from a point");
  add_input(simulate);
  simulate->add_option("--from", a.from_text, "barycentric assignments, e.g. \"A=0.2,B=0.3,D=0.5\"")
      ->required();
  simulate->add_option("--tmax", a.tmax, "integration horizon (default 10)");
  simulate->add_option("--dt", a.dt, "integration grid step (default 1e-3)");
  simulate->add_option("--out", a.out_path, "trajectory CSV (default stdout)");
  simulate->add_option("--events", a.events_path, "event log, one JSON object per line");
  add_epsilon(simulate);

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the verification suites");
  add_input(verify_cmd);
  verify_cmd->add_option("--samples", a.samples, "samples per tile (default 2000; 0 skips)");
  verify_cmd->add_option("--seed", a.seed, "random seed (default 42)");
  verify_cmd->add_flag("--negative-control", a.negative_control,
                       "corrupt the transversal speed profile; the suites must fail");
  verify_cmd->add_option("--out", a.out_path, "report path (default stdout)");
  add_epsilon(verify_cmd);

  CLI::App* hequiv = app.add_subcommand(
      "homology-equiv", "compare the combinatorial index with geometric index-pair homology");
  add_input(hequiv);
  hequiv->add_option("--set", a.set_text, "one isolated invariant set (default: all Morse sets)");
  add_epsilon(hequiv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(validate)) return run_validate(a);
    if (app.got_subcommand(morse)) return run_morse(a);
    if (app.got_subcommand(index)) return run_index(a);
    if (app.got_subcommand(block)) return run_block(a);
    if (app.got_subcommand(simulate)) return run_simulate(a);
    if (app.got_subcommand(verify_cmd)) return run_verify(a);
    if (app.got_subcommand(hequiv)) return run_homology_equiv(a);
    std::cerr << "error: no command selected\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ContentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
