#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "agres/errors.hpp"

namespace agres::cli {

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kNumerical = 3;

bool uses_lambda(const std::string& c) {
  return c == "solve" || c == "boundary" || c == "graph" || c == "resistance" || c == "resolvent" ||
         c == "relations" || c == "estimates" || c == "hausdorff";
}
bool uses_s(const std::string& c) {
  return c == "solve" || c == "resistance" || c == "resolvent" || c == "estimates" || c == "converge";
}
bool uses_level(const std::string& c) {
  return c == "graph" || c == "resistance" || c == "resolvent" || c == "estimates" || c == "converge";
}

std::optional<std::string> lambda_violation(const std::string& field, const std::string& text) {
  try {
    const Rational q = parse_rational(text);
    if (q <= 0 || q >= Rational(1, 2)) return field + " must lie in (0,1/2), got " + text;
  } catch (const Error&) {
    return field + " must be a rational p/q or decimal, got '" + text + "'";
  }
  return std::nullopt;
}

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions so;
  so.eigen.tol = cfg.eigen_tol;
  so.eigen.max_iters = cfg.max_iters;
  so.bisect_tol = cfg.bisect_tol;
  return so;
}

std::vector<AddressPair> pairs_or(const RunConfig& cfg, const std::string& fallback) {
  return parse_tracked_pairs(cfg.pairs.empty() ? fallback : cfg.pairs);
}

std::string path_in(const RunConfig& cfg, const std::string& name) { return (std::filesystem::path(cfg.out) / name).string(); }

struct Outputs {
  const RunConfig& cfg;
  std::vector<std::string> names;
  void write(const std::string& name, const std::string& text) {
    write_file(path_in(cfg, name), text);
    names.push_back(name);
  }
  void write(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }
};

void say(const std::string& line) { std::cout << line << '\n'; }

void cmd_solve(const RunConfig& cfg, Outputs& out) {
  const Instance inst = Instance::make(parse_rational(cfg.lambda));
  const Solution sol = solve_r(inst, cfg.s, solve_options(cfg));
  Json j = solution_json(inst, sol);
  j["measure"] = measure_json(measure_weights(inst.ifs, parse_measure_scheme(cfg.measure)));
  out.write("solution.json", j);
  say("lambda = " + rational_string(sol.lambda) + ", s = " + decimal_string(sol.s));
  say("r = " + decimal_string(sol.r) + ", rtilde4 = " + decimal_string(sol.rtilde4) +
      ", theta = " + decimal_string(sol.theta));
  say("fixed-point residual = " + decimal_string(sol.residual) + (sol.experimental ? " (non-dyadic, experimental)" : ""));
}

void cmd_boundary(const RunConfig& cfg, Outputs& out) {
  const Instance inst = Instance::make(parse_rational(cfg.lambda));
  out.write("boundary.csv", boundary_csv(inst.boundary));
  say("boundary set has " + std::to_string(inst.boundary.size()) + " points");
}

void cmd_graph(const RunConfig& cfg, Outputs& out) {
  const Ifs ifs = Ifs::make(parse_rational(cfg.lambda));
  const GraphApprox g = approximation_graph(ifs, cfg.level);
  out.write("vertices.csv", vertices_csv(g));
  out.write("edges.csv", edges_csv(g));
  say("level " + std::to_string(g.level) + ": " + std::to_string(g.vertices.size()) + " vertices, " +
      std::to_string(g.edges.size()) + " edges");
}

void cmd_resistance(const RunConfig& cfg, Outputs& out) {
  const Instance inst = Instance::make(parse_rational(cfg.lambda));
  const Solution sol = solve_r(inst, cfg.s, solve_options(cfg));
  const LevelForm lf = level_form(inst, sol, cfg.level);
  std::vector<std::pair<Point, Point>> pts;
  for (const auto& p : pairs_or(cfg, "(1):(2);(2):(3);(3):(1)")) pts.emplace_back(p.x.at(inst.ifs), p.y.at(inst.ifs));
  const auto rows = resistance_metric(lf, pts);
  out.write("resistance.csv", resistance_csv(lf, rows));
  for (const auto& row : rows)
    say("R(" + std::to_string(row.x) + ", " + std::to_string(row.y) + ") = " + decimal_string(row.value));
}

void cmd_resolvent(const RunConfig& cfg, Outputs& out) {
  const Instance inst = Instance::make(parse_rational(cfg.lambda));
  const Solution sol = solve_r(inst, cfg.s, solve_options(cfg));
  const LevelForm lf = level_form(inst, sol, cfg.level);
  const MeasureSpec mu = measure_weights(inst.ifs, parse_measure_scheme(cfg.measure));
  const ResolventKernel k = resolvent_kernel(lf, cfg.alpha.value_or(1.0), mu);
  out.write("vertices.csv", vertices_csv(lf.graph, &k.masses));
  out.write("kernel.csv", kernel_csv(k));
  say("kernel on " + std::to_string(k.matrix.rows()) + " vertices, alpha = " + decimal_string(k.alpha));
}

void cmd_relations(const RunConfig& cfg, Outputs& out) {
  const Instance inst = Instance::make(parse_rational(cfg.lambda));
  const auto invariant = enumerate_invariant_relations(inst, cfg.guard);
  const auto preserved = enumerate_preserved_relations(inst, cfg.relation_depth, cfg.guard);
  Json list = Json::array();
  for (const auto& r : preserved)
    list.push_back(Json{{"blocks", r.block}, {"count", r.blocks()}, {"trivial", r.is_trivial()}});
  std::size_t nontrivial = 0;
  for (const auto& r : preserved) nontrivial += !r.is_trivial();
  out.write("relations.json", Json{{"lambda", cfg.lambda},
                                   {"boundary_size", inst.boundary.size()},
                                   {"invariant_relations", invariant.size()},
                                   {"preserved", std::move(list)},
                                   {"nontrivial_preserved", nontrivial}});
  say(std::to_string(invariant.size()) + " invariant relations, " + std::to_string(preserved.size()) + " preserved, " +
      std::to_string(nontrivial) + " nontrivial");
}

void cmd_estimates(const RunConfig& cfg, Outputs& out) {
  const Instance inst = Instance::make(parse_rational(cfg.lambda));
  const Solution sol = solve_r(inst, cfg.s, solve_options(cfg));
  Json lemma = Json::array();
  for (int m = 1; m <= cfg.level; ++m) {
    const BoundaryCheck b = boundary_resistance_check(inst, sol, m);
    lemma.push_back(Json{{"m", m}, {"value", b.value}, {"bound", b.bound}, {"reference", b.reference}, {"pass", b.pass}});
    say("m = " + std::to_string(m) + ": R(p1, bottom edge) = " + decimal_string(b.value) + " >= " +
        decimal_string(b.bound) + (b.pass ? "  ok" : "  VIOLATED"));
  }
  const ExponentFit fit = scaling_exponent(inst, sol, 4, 9);
  Json samples = Json::array();
  for (const auto& [d, r] : fit.samples) samples.push_back(Json{{"d", d}, {"R", r}});
  Json j{{"lambda", cfg.lambda},
         {"s", cfg.s},
         {"r", sol.r},
         {"boundary_resistance", std::move(lemma)},
         {"exponent",
          {{"theta", fit.theta},
           {"theta_fit", fit.theta_fit},
           {"c1", fit.c1},
           {"c2", fit.c2},
           {"spread", fit.spread},
           {"samples", std::move(samples)}}},
         {"envelope",
          {{"eta_star", fit.envelope.eta_star},
           {"eta_sub", fit.envelope.eta_sub},
           {"c1", fit.envelope.c1},
           {"c2", fit.envelope.c2}}}};
  say("theta = " + decimal_string(fit.theta) + ", fitted " + decimal_string(fit.theta_fit) + ", spread " +
      decimal_string(fit.spread));
  if (cfg.grid) {
    double worst = 0;
    Json grid = Json::array();
    for (int k = 4; k <= 12; ++k) {
      const Instance gi = Instance::make(Rational(k, 32));
      for (double s : {0.2, 0.35, 0.5, 0.65, 0.8, 0.95}) {
        const double r = solve_r(gi, s, solve_options(cfg)).r;
        worst = std::max(worst, r);
        grid.push_back(Json{{"lambda", rational_string(gi.ifs.lambda())}, {"s", s}, {"r", r}});
      }
    }
    j["grid"] = Json{{"points", std::move(grid)}, {"max_r", worst}, {"pass", worst < 1 - 1e-3}};
    say("max r over the grid = " + decimal_string(worst));
  }
  out.write("estimates.json", j);
}

void cmd_converge(const RunConfig& cfg, Outputs& out) {
  const auto [lo, hi] = parse_range(cfg.n);
  const DyadicSchedule sched = dyadic_schedule(Target::parse(cfg.target), lo, hi);
  ConvergenceOptions opts;
  opts.s = cfg.s;
  opts.level = cfg.level;
  opts.pairs = pairs_or(cfg, "(1):(2)");
  opts.alpha = cfg.alpha;
  opts.measure = parse_measure_scheme(cfg.measure);
  opts.solve = solve_options(cfg);
  opts.gap_threshold = cfg.gap;
  opts.threads = cfg.threads;
  const ConvergenceReport rep = convergence_report(sched, opts);
  out.write("report.csv", report_csv(rep));
  Json j = report_json(rep);
  if (cfg.gamma) {
    const GammaReport g = gamma_diagnostic(sched, cfg.s, {1.0, 0.0, 0.0}, cfg.level, opts.solve);
    Json rows = Json::array();
    for (const auto& row : g.rows)
      rows.push_back(Json{{"n", row.n},
                          {"lambda", rational_string(row.lambda)},
                          {"energy", row.energy},
                          {"transplant_energy", row.transplant_energy},
                          {"minimal", row.minimal}});
    j["gamma"] = Json{{"boundary_values", {1.0, 0.0, 0.0}}, {"rows", std::move(rows)}, {"diffs", g.diffs}};
  }
  out.write("report.json", j);
  for (const auto& v : rep.verdicts)
    say(v.quantity + ": final gap " + (v.diffs.empty() ? "n/a" : decimal_string(v.diffs.back())) +
        (v.pass() ? "  converging" : "  not converging"));
}

void cmd_hausdorff(const RunConfig& cfg, Outputs& out) {
  const Rational a = parse_rational(cfg.lambda), b = parse_rational(cfg.lambda2);
  const HausdorffCheck h = hausdorff_check(a, b, cfg.depth);
  out.write("hausdorff.json", Json{{"lambda1", rational_string(a)},
                                   {"lambda2", rational_string(b)},
                                   {"depth", cfg.depth},
                                   {"estimate", h.estimate},
                                   {"bound", h.bound},
                                   {"pass", h.pass}});
  say("distance estimate " + decimal_string(h.estimate) + ", bound " + decimal_string(h.bound) +
      (h.pass ? "  ok" : "  VIOLATED"));
}

void emit_error(const Json& j) { std::cerr << j.dump() << std::endl; }

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"solve",     "boundary",  "graph",    "resistance", "resolvent",
                                              "relations", "estimates", "converge", "hausdorff"};
  return names;
}

std::vector<std::string> validate(const RunConfig& cfg) {
  std::vector<std::string> v;
  const std::string& c = cfg.command;
  if (std::find(commands().begin(), commands().end(), c) == commands().end()) {
    v.push_back("command must be one of solve, boundary, graph, resistance, resolvent, relations, estimates, "
                "converge, hausdorff");
    return v;
  }
  if (uses_lambda(c))
    if (auto e = lambda_violation("lambda", cfg.lambda)) v.push_back(*e);
  if (c == "hausdorff") {
    if (auto e = lambda_violation("lambda2", cfg.lambda2)) v.push_back(*e);
    if (cfg.depth < 0 || cfg.depth > 10) v.push_back("depth must lie in [0,10]");
  }
  if (uses_s(c) && !(cfg.s > 0 && cfg.s < 1))
    v.push_back("s must lie in (0,1); irregular cases s ≥ 1 are out of scope");
  if (uses_level(c)) {
    const int cap = c == "graph" ? 10 : 8;
    if (cfg.level < 0 || cfg.level > cap) v.push_back("level must lie in [0," + std::to_string(cap) + "]");
    if (c == "estimates" && cfg.level < 1) v.push_back("level must be at least 1 for estimates");
  }
  if (c == "converge") {
    try {
      const Target t = Target::parse(cfg.target);
      if (!(t.value > 0 && t.value < 0.5)) v.push_back("target must lie in (0,1/2), got " + cfg.target);
    } catch (const Error&) {
      v.push_back("target must be 1/sqrtN, p/q or a decimal, got '" + cfg.target + "'");
    }
    try {
      const auto [lo, hi] = parse_range(cfg.n);
      if (lo > hi)
        v.push_back("n range is empty");
      else if (lo < 1 || hi > 30)
        v.push_back("n range must lie within 1..30");
    } catch (const Error&) {
      v.push_back("n must be a range a..b, got '" + cfg.n + "'");
    }
  }
  if ((c == "converge" || c == "resistance") && !cfg.pairs.empty()) {
    try {
      parse_tracked_pairs(cfg.pairs);
    } catch (const Error& e) {
      v.push_back(std::string("pairs: ") + e.what());
    }
  }
  if (cfg.alpha && !(*cfg.alpha > 0)) v.push_back("alpha must be positive");
  if (cfg.measure != "hausdorff" && cfg.measure != "uniform") v.push_back("measure must be hausdorff or uniform");
  if (!(cfg.eigen_tol > 0)) v.push_back("eigen-tol must be positive");
  if (!(cfg.bisect_tol > 0)) v.push_back("bisect-tol must be positive");
  if (cfg.max_iters < 1) v.push_back("max-iters must be at least 1");
  if (cfg.threads < 1) v.push_back("threads must be at least 1");
  if (!(cfg.gap > 0)) v.push_back("gap must be positive");
  if (c == "relations") {
    if (cfg.relation_depth < 1) v.push_back("relation-depth must be at least 1");
    if (!lambda_violation("lambda", cfg.lambda)) {
      try {
        const auto n = boundary_set_fast(Ifs::make(parse_rational(cfg.lambda))).size();
        if (static_cast<int>(n) > cfg.guard)
          v.push_back("boundary set has " + std::to_string(n) + " points, more than the relations guard " +
                      std::to_string(cfg.guard));
      } catch (const Error& e) {
        v.push_back(std::string("lambda: ") + e.what());
      }
    }
  }
  if (cfg.out.empty()) v.push_back("out must name a directory");
  return v;
}

void configure(CLI::App& app, RunConfig& cfg) {
  app.set_config("--config", "", "Flat key = value file mirroring the flags; flags override it");
  app.add_option("--lambda", cfg.lambda, "Rational parameter p/q in (0,1/2)")->capture_default_str();
  app.add_option("--lambda2", cfg.lambda2, "Second parameter for hausdorff")->capture_default_str();
  app.add_option("--target", cfg.target, "Schedule target: 1/sqrtN, p/q or decimal")->capture_default_str();
  app.add_option("--s", cfg.s, "Weight of the added cell, in (0,1)")->capture_default_str();
  app.add_option("--level", cfg.level, "Approximation level m")->capture_default_str();
  app.add_option("--n", cfg.n, "Schedule range a..b")->capture_default_str();
  app.add_option("--alpha", cfg.alpha, "Resolvent parameter alpha > 0");
  app.add_option("--pairs", cfg.pairs, "Address pairs (w,i):(w,i) separated by ';'");
  app.add_option("--measure", cfg.measure, "hausdorff or uniform")->capture_default_str();
  app.add_option("--eigen-tol", cfg.eigen_tol, "Power-iteration tolerance")->capture_default_str();
  app.add_option("--bisect-tol", cfg.bisect_tol, "Tolerance on |rtilde4 C - s|")->capture_default_str();
  app.add_option("--max-iters", cfg.max_iters, "Power-iteration step cap")->capture_default_str();
  app.add_option("--depth", cfg.depth, "Vertex-cloud depth for hausdorff")->capture_default_str();
  app.add_option("--guard", cfg.guard, "Largest boundary set relations will enumerate")->capture_default_str();
  app.add_option("--relation-depth", cfg.relation_depth, "Subdivision depth for preserved relations")
      ->capture_default_str();
  app.add_option("--gap", cfg.gap, "Final-gap threshold for convergence verdicts")->capture_default_str();
  app.add_flag("--gamma", cfg.gamma, "Also run the energy diagnostic in converge");
  app.add_flag("--grid", cfg.grid, "Also scan the parameter grid in estimates");
  app.add_option("--out", cfg.out, "Output directory")->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads for schedule rows")->capture_default_str();
  static const std::map<std::string, std::string> about{
      {"solve", "Solve for r and the boundary form; writes solution.json"},
      {"boundary", "List the cell-boundary vertex set; writes boundary.csv"},
      {"graph", "Level-m approximation graph; writes vertices.csv and edges.csv"},
      {"resistance", "Resistances between address pairs at level m; writes resistance.csv"},
      {"resolvent", "Resolvent kernel at level m; writes vertices.csv and kernel.csv"},
      {"relations", "Preserved rotation-invariant relations; writes relations.json"},
      {"estimates", "Boundary bound, exponent fit and envelope; writes estimates.json"},
      {"converge", "Dyadic schedule convergence report; writes report.csv and report.json"},
      {"hausdorff", "Hausdorff distance bound between two parameters; writes hausdorff.json"}};
  for (const auto& name : commands()) app.add_subcommand(name, about.at(name))->fallthrough();
  app.require_subcommand(1);
}

Json manifest_json(const RunConfig& cfg, const std::vector<std::string>& outputs) {
  return Json{{"command", cfg.command},
              {"lambda", cfg.lambda},
              {"lambda2", cfg.lambda2},
              {"target", cfg.target},
              {"s", cfg.s},
              {"level", cfg.level},
              {"n", cfg.n},
              {"alpha", cfg.alpha ? Json(*cfg.alpha) : Json(nullptr)},
              {"pairs", cfg.pairs},
              {"measure", cfg.measure},
              {"eigen_tol", cfg.eigen_tol},
              {"bisect_tol", cfg.bisect_tol},
              {"max_iters", cfg.max_iters},
              {"depth", cfg.depth},
              {"guard", cfg.guard},
              {"relation_depth", cfg.relation_depth},
              {"gap", cfg.gap},
              {"gamma", cfg.gamma},
              {"grid", cfg.grid},
              {"out", cfg.out},
              {"threads", cfg.threads},
              {"outputs", outputs}};
}

int run(const RunConfig& cfg) {
  try {
    Outputs out{cfg, {}};
    const std::string& c = cfg.command;
    if (c == "solve") cmd_solve(cfg, out);
    else if (c == "boundary") cmd_boundary(cfg, out);
    else if (c == "graph") cmd_graph(cfg, out);
    else if (c == "resistance") cmd_resistance(cfg, out);
    else if (c == "resolvent") cmd_resolvent(cfg, out);
    else if (c == "relations") cmd_relations(cfg, out);
    else if (c == "estimates") cmd_estimates(cfg, out);
    else if (c == "converge") cmd_converge(cfg, out);
    else if (c == "hausdorff") cmd_hausdorff(cfg, out);
    std::vector<std::string> names = out.names;
    names.push_back("manifest.json");
    write_file(path_in(cfg, "manifest.json"), manifest_json(cfg, names).dump(2) + "\n");
    return kOk;
  } catch (const Error& e) {
    const int code = e.is_numerical() ? kNumerical : kValidation;
    emit_error(Json{{"error", to_string(e.kind())}, {"message", e.what()}, {"exit_code", code}});
    return code;
  } catch (const std::exception& e) {
    emit_error(Json{{"error", "InternalError"}, {"message", e.what()}, {"exit_code", kNumerical}});
    return kNumerical;
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Resistance forms on gaskets with an added rotated triangle"};
  RunConfig cfg;
  configure(app, cfg);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error(Json{{"error", "ValidationError"}, {"violations", {std::string(e.what())}}, {"exit_code", kValidation}});
    return kValidation;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (const auto violations = validate(cfg); !violations.empty()) {
    emit_error(Json{{"error", "ValidationError"}, {"violations", violations}, {"exit_code", kValidation}});
    return kValidation;
  }
  return run(cfg);
}

}  // namespace agres::cli
