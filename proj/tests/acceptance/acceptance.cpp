// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "../oracles.hpp"
#include "agres/approx.hpp"
#include "agres/converge.hpp"
#include "agres/errors.hpp"
#include "agres/renorm.hpp"

using namespace agres;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      detail << "[" << why << "] ";
    }
  }
};

const std::vector<std::string> kGridLambdas{"1/4", "1/8", "3/8", "5/16", "3/16"};
const std::vector<double> kGridS{0.2, 0.5, 0.8};

std::map<std::pair<std::string, double>, Solution>& grid_solutions() {
  static std::map<std::pair<std::string, double>, Solution> cache;
  return cache;
}

std::map<std::string, Instance>& instances() {
  static std::map<std::string, Instance> cache;
  return cache;
}

const Instance& instance(const std::string& lambda) {
  auto it = instances().find(lambda);
  if (it == instances().end()) it = instances().emplace(lambda, Instance::make(parse_rational(lambda))).first;
  return it->second;
}

const Solution& solution(const std::string& lambda, double s) {
  auto& cache = grid_solutions();
  auto it = cache.find({lambda, s});
  if (it == cache.end()) it = cache.emplace(std::make_pair(lambda, s), solve_r(instance(lambda), s)).first;
  return it->second;
}

void c1(Outcome& o) {
  for (const char* l : {"1/4", "1/8", "3/8"}) {
    const auto t0 = Clock::now();
    const EigenResult e = eigen_solve(instance(l), kOpenCircuit);
    const double dt = seconds_since(t0);
    o.detail << "lambda=" << l << " C=" << decimal_string(e.factor) << " t=" << dt << "s ";
    o.require(std::abs(e.factor - 0.6) <= 1e-10, std::string("C off 3/5 at ") + l);
    o.require(dt < 1.0, std::string("too slow at ") + l);
  }
}

void c2(Outcome& o) {
  const auto t0 = Clock::now();
  double worst_residual = 0, rmin = 1, rmax = 0;
  for (const auto& l : kGridLambdas)
    for (double s : kGridS) {
      const Solution& sol = solution(l, s);
      worst_residual = std::max(worst_residual, sol.residual);
      rmin = std::min(rmin, sol.r), rmax = std::max(rmax, sol.r);
      o.require(sol.r >= 0.6 && sol.r < 1.0, "r out of [3/5,1) at " + l);
      o.require(sol.residual <= 1e-8, "residual too large at " + l);
    }
  const double dt = seconds_since(t0);
  o.require(dt < 30, "grid took longer than 30 s");
  o.detail << "r in [" << decimal_string(rmin) << ", " << decimal_string(rmax)
           << "] max residual=" << decimal_string(worst_residual) << " t=" << dt << "s";
}

void c3(Outcome& o) {
  const std::vector<double> grid{0.25, 0.5, 1, 2, 4, 8};
  for (const auto& l : kGridLambdas) {
    std::vector<double> c;
    for (double rt : grid) c.push_back(eigen_solve(instance(l), rt).factor);
    for (std::size_t k = 1; k < grid.size(); ++k) {
      o.require(c[k] < c[k - 1], "C not strictly decreasing at " + l);
      o.require(grid[k] * c[k] >= grid[k - 1] * c[k - 1], "rtilde4*C decreasing at " + l);
    }
    o.require(solution(l, 0.8).r < solution(l, 0.2).r, "r(lambda,0.8) >= r(lambda,0.2) at " + l);
    if (l == "1/4") o.detail << "lambda=1/4 C(0.25)=" << decimal_string(c.front()) << " C(8)=" << decimal_string(c.back());
  }
}

void c4(Outcome& o) {
  const Instance& inst = instance("1/4");
  const Solution& sol = solution("1/4", 0.5);
  std::vector<double> grid{sol.r};
  for (double d : {0.02, 0.05, 0.1}) grid.insert(grid.end(), {sol.r - d, sol.r + d});
  const auto scan = uniqueness_scan(inst, sol, grid);
  double nearest = INFINITY;
  o.require(std::abs(scan[0].factor - 1) <= 1e-8, "factor at r is not 1");
  for (std::size_t k = 1; k < scan.size(); ++k) {
    nearest = std::min(nearest, std::abs(scan[k].factor - 1));
    o.require(std::abs(scan[k].factor - 1) >= 1e-4, "factor near 1 at r' = " + decimal_string(scan[k].r_prime));
  }
  double spread = 0;
  EigenOptions base;
  base.start = perimeter_form(inst);
  const FiniteForm ref = eigen_solve(inst, sol.rtilde4, base).form;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    EigenOptions eo;
    eo.start = random_symmetric_form(inst, seed);
    spread = std::max(spread, relative_change(eigen_solve(inst, sol.rtilde4, eo).form, ref));
  }
  o.require(spread <= 1e-8, "multi-start forms disagree");
  o.detail << "|factor-1| at r=" << decimal_string(std::abs(scan[0].factor - 1))
           << " min elsewhere=" << decimal_string(nearest) << " multi-start spread=" << decimal_string(spread);
}

void c5(Outcome& o) {
  double worst = 0;
  for (const auto& [key, sol] : grid_solutions()) {
    const ResistanceSolver rs(sol.D);
    const Instance& inst = instance(key.first);
    for (auto [a, b] : {std::pair{1, 2}, std::pair{2, 3}, std::pair{3, 1}})
      worst = std::max(worst, std::abs(rs.resistance(inst.p(a), inst.p(b)) - 2.0 / 3.0));
  }
  o.require(!grid_solutions().empty(), "no solutions to check");
  o.require(worst <= 1e-10, "corner resistance off 2/3");
  o.detail << grid_solutions().size() << " solutions, max |R-2/3|=" << decimal_string(worst);
}

void c6(Outcome& o) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  double tower = 0, preserve = 0, markov = 0, metric_tri = 0, oracle_gap = 0;
  bool symmetric = true;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 8 + trial % 5;
    const FiniteForm f = oracle::random_form(rng, n);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::vector<int> a(perm.begin(), perm.begin() + 6), b(perm.begin(), perm.begin() + 3);
    const FiniteForm ta = trace(f, a);
    const FiniteForm tab = trace(ta, {0, 1, 2});
    const FiniteForm tb = trace(f, b);
    for (int x = 0; x < 3; ++x)
      for (int y = x + 1; y < 3; ++y) tower = std::max(tower, std::abs(tab.conductance(x, y) - tb.conductance(x, y)));
    const ResistanceSolver full(f), part(ta);
    for (int x = 0; x < 6; ++x)
      for (int y = x + 1; y < 6; ++y)
        preserve = std::max(preserve, std::abs(full.resistance(a[x], a[y]) - part.resistance(x, y)));
    const Eigen::MatrixXd r = full.resistance_matrix();
    const Eigen::MatrixXd ro = oracle::resistance_matrix(oracle::laplacian(f));
    oracle_gap = std::max(oracle_gap, (r - ro).cwiseAbs().maxCoeff());
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        symmetric = symmetric && full.resistance(x, y) == full.resistance(y, x) && r(x, y) == r(y, x);
        for (int z = 0; z < n; ++z) metric_tri = std::max(metric_tri, r(x, y) - r(x, z) - r(z, y));
      }
    for (int k = 0; k < 200; ++k) {
      Eigen::VectorXd g(n);
      for (int v = 0; v < n; ++v) g[v] = u(rng);
      const Eigen::VectorXd clamped = g.cwiseMax(0.0).cwiseMin(1.0);
      markov = std::max(markov, f.energy(clamped) - f.energy(g));
    }
  }
  // Comparison sandwich on 100 random pairs of forms on at most 6 vertices.
  double sandwich = -INFINITY;
  for (int pair = 0; pair < 100; ++pair) {
    const int n = 2 + pair % 5;
    const FiniteForm f1 = oracle::random_form(rng, n), f2 = oracle::random_form(rng, n);
    const FormComparison cmp = form_comparison(f1, f2);
    for (int k = 0; k < 1000; ++k) {
      Eigen::VectorXd g(n);
      for (int v = 0; v < n; ++v) g[v] = u(rng);
      const double e1 = f1.energy(g), e2 = f2.energy(g);
      sandwich = std::max({sandwich, cmp.lower * e1 - e2 - 1e-10 * e2, e2 - cmp.upper * e1 - 1e-10 * e2});
    }
  }
  o.require(tower <= 1e-10, "trace tower");
  o.require(preserve <= 1e-10, "resistance preservation");
  o.require(markov <= 1e-12, "Markov property");
  o.require(symmetric, "resistance symmetry");
  o.require(metric_tri <= 1e-12, "triangle inequality");
  o.require(oracle_gap <= 1e-10, "resistance vs pseudo-inverse oracle");
  o.require(sandwich <= 0, "comparison sandwich");
  o.detail << "tower=" << decimal_string(tower) << " preserve=" << decimal_string(preserve)
           << " markov=" << decimal_string(markov) << " triangle=" << decimal_string(metric_tri)
           << " oracle=" << decimal_string(oracle_gap);
}

void c7(Outcome& o) {
  const Instance& inst = instance("1/4");
  const Solution& sol = solution("1/4", 0.5);
  const LevelForm lf = level_form(inst, sol, 3);
  const ResolventKernel k = resolvent_kernel(lf, 1.0, measure_weights(inst.ifs, MeasureScheme::Hausdorff));
  const Eigen::MatrixXd r = ResistanceSolver(lf.form).resistance_matrix();
  const double sym = (k.matrix - k.matrix.transpose()).cwiseAbs().maxCoeff();
  const double mass = ((k.matrix * k.masses).array() - 1.0).abs().maxCoeff();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(k.matrix.rows()) - 1);
  double holder = -INFINITY;
  for (int t = 0; t < 20000; ++t) {
    const int x = pick(rng), y1 = pick(rng), y2 = pick(rng);
    const double d = k.matrix(x, y1) - k.matrix(x, y2);
    holder = std::max(holder, d * d - r(y1, y2) * k.matrix(x, x) - 1e-12);
  }
  o.require(sym <= 1e-12, "kernel symmetry");
  o.require(mass <= 1e-10, "row mass identity");
  o.require(holder <= 0, "Hoelder bound");
  o.detail << k.matrix.rows() << " vertices, symmetry=" << decimal_string(sym) << " mass=" << decimal_string(mass)
           << " holder slack=" << decimal_string(holder);
}

void c8(Outcome& o) {
  const std::vector<std::pair<std::string, std::size_t>> cases{{"1/4", 6}, {"1/8", 9}, {"1/7", 12}, {"3/16", 12}};
  for (const auto& [l, size] : cases) {
    const Ifs ifs = Ifs::make(parse_rational(l));
    const BoundarySet fast = boundary_set_fast(ifs), slow = boundary_set_oracle(ifs, 5);
    o.require(fast.points == slow.points, "fast and oracle sets differ at " + l);
    o.require(fast.size() == size, "size mismatch at " + l);
    o.detail << l << ":" << fast.size() << "/" << slow.size() << " ";
  }
}

void c9(Outcome& o) {
  const auto t0 = Clock::now();
  for (const char* l : {"1/4", "1/8", "1/16"}) {
    const auto rel = enumerate_preserved_relations(instance(l), 1);
    const auto invariant = enumerate_invariant_relations(instance(l));
    o.require(rel.size() == 2 && rel[0].is_trivial() && rel[1].is_trivial(), std::string("nontrivial relation at ") + l);
    o.detail << l << ": " << rel.size() << " of " << invariant.size() << " preserved; ";
  }
  const double dt = seconds_since(t0);
  o.require(dt < 300, "too slow");
  o.detail << "t=" << dt << "s";
}

void c10(Outcome& o) {
  double worst_margin = INFINITY;
  for (const auto& l : kGridLambdas)
    for (double s : kGridS) {
      double previous = INFINITY;
      for (int m = 4; m <= 6; ++m) {
        const BoundaryCheck b = boundary_resistance_check(instance(l), solution(l, s), m);
        worst_margin = std::min(worst_margin, b.value - b.bound);
        o.require(b.pass, "boundary bound fails at " + l + " m=" + std::to_string(m));
        o.require(b.value <= previous + 1e-12, "boundary value increased with m at " + l);
        o.require(b.value <= b.reference + 1e-12, "boundary value above two-point reference at " + l);
        previous = b.value;
      }
    }
  const ExponentFit fit = scaling_exponent(instance("1/4"), solution("1/4", 0.5), 4, 9);
  o.require(fit.samples.size() >= 20, "fewer than 20 sampled pairs");
  o.require(std::abs(fit.theta_fit - fit.theta) <= 0.15, "exponent fit off");
  o.require(fit.spread <= 50, "envelope spread above 50");

  double max_r = 0;
  for (int k = 4; k <= 12; ++k) {
    const Instance inst = Instance::make(Rational(k, 32));
    for (double s : {0.2, 0.35, 0.5, 0.65, 0.8, 0.95}) max_r = std::max(max_r, solve_r(inst, s).r);
  }
  o.require(max_r < 1 - 1e-3, "max r too close to 1");
  o.detail << "min margin=" << decimal_string(worst_margin) << " theta=" << decimal_string(fit.theta)
           << " fit=" << decimal_string(fit.theta_fit) << " spread=" << decimal_string(fit.spread)
           << " max r=" << decimal_string(max_r);
}

void c11(Outcome& o) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0;
  for (const char* l : {"1/4", "1/8"})
    for (int m = 1; m <= 4; ++m) {
      const DecimationCheck d = decimation_check(instance(l), solution(l, 0.5), m, {u(rng), u(rng), u(rng)});
      worst = std::max(worst, d.rel_error);
    }
  o.require(worst <= 1e-8, "decimation identity");
  o.detail << "max relative error=" << decimal_string(worst);
}

void c12(Outcome& o) {
  const auto t0 = Clock::now();
  ConvergenceOptions opts;
  opts.s = 0.5;
  opts.level = 2;
  opts.alpha = 1.0;
  opts.pairs = parse_tracked_pairs("(4,1):(4,2);(1):(2)");
  const ConvergenceReport rep = convergence_report(dyadic_schedule(Target::parse("1/sqrt8"), 4, 10), opts);
  for (const auto& v : rep.verdicts) {
    o.require(v.pass(), v.quantity + (v.trend ? " final gap too large" : " differences not nonincreasing"));
    o.detail << v.quantity << " last diffs=";
    for (std::size_t k = v.diffs.size() >= 3 ? v.diffs.size() - 3 : 0; k < v.diffs.size(); ++k)
      o.detail << decimal_string(v.diffs[k]) << (k + 1 < v.diffs.size() ? "," : " ");
  }
  for (const auto& row : rep.rows) o.require(row.r >= 0.6 && row.r < 1, "r_n out of range");
  o.require(std::abs(rep.rows.back().resistance[1] - 2.0 / 3.0) <= 1e-10, "normalization row");
  const double dt = seconds_since(t0);
  o.require(dt < 300, "too slow");
  o.detail << "t=" << dt << "s";
}

void c13(Outcome& o) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> k(1, 63);
  double worst = -INFINITY;
  for (int t = 0; t < 20; ++t) {
    const Rational a(k(rng), 128), b(k(rng), 128);
    const HausdorffCheck h = hausdorff_check(a, b, 8);
    worst = std::max(worst, h.estimate - h.bound);
    o.require(h.estimate <= h.bound + std::ldexp(1.0, -7), "Hausdorff bound at " + rational_string(a) + "," + rational_string(b));
  }
  double ratio = 0;
  long points = 0;
  for (auto [a, b] : {std::pair{Rational(1, 4), Rational(3, 8)}, std::pair{Rational(1, 8), Rational(5, 16)},
                      std::pair{Rational(23, 64), Rational(181, 512)}}) {
    try {
      const TrackingSummary s = tracking_check(a, b, 8);
      ratio = std::max(ratio, s.worst_ratio);
      points += s.points;
    } catch (const Error& e) {
      o.require(false, e.what());
    }
  }
  o.detail << "max estimate-bound=" << decimal_string(worst) << " tracked " << points
           << " points, worst ratio=" << decimal_string(ratio);
}

}  // namespace

int main() {
  set_warning_handler([](const std::string&) {});
  const std::vector<std::function<void(Outcome&)>> checks{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13};
  int failures = 0;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      checks[k](o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %zu (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", k + 1, seconds_since(t0), o.detail.str().c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
