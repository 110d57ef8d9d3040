#include "agres/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "agres/errors.hpp"

namespace agres {

namespace {

GlueLayout make_layout(const Ifs& ifs, const BoundarySet& b, int copies, int expected) {
  GlueLayout g;
  std::unordered_map<Point, int, PointHash> index;
  for (int i = 0; i < copies; ++i) {
    g.copy[i].reserve(b.size());
    for (const Point& p : b.points) {
      Point q = ifs.map(i + 1).apply(p);
      auto [it, fresh] = index.emplace(q, g.nodes);
      if (fresh) {
        g.points.push_back(std::move(q));
        ++g.nodes;
      }
      g.copy[i].push_back(it->second);
    }
  }
  g.identifications = copies * static_cast<int>(b.size()) - g.nodes;
  if (g.identifications != expected)
    throw Error(ErrorKind::IdentificationMismatch, "expected " + std::to_string(expected) +
                                                       " single-point identifications, found " +
                                                       std::to_string(g.identifications));
  for (const Point& p : b.points) {
    auto it = index.find(p);
    if (it == index.end())
      throw Error(ErrorKind::IdentificationMismatch, "boundary point missing from the level-one set: " + p.exact_string());
    g.keep.push_back(it->second);
  }
  return g;
}

Eigen::MatrixXd dense_conductances(const FiniteForm& d) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d.size(), d.size());
  for (const auto& e : d.edges()) c(e.x, e.y) = c(e.y, e.x) = e.c;
  return c;
}

FiniteForm from_dense(const Eigen::MatrixXd& c) {
  std::vector<Conductance> edges;
  for (int x = 0; x < c.rows(); ++x)
    for (int y = x + 1; y < c.cols(); ++y)
      if (c(x, y) > 0) edges.push_back({x, y, c(x, y)});
  return FiniteForm(static_cast<int>(c.rows()), std::move(edges));
}

double p12_resistance(const Instance& inst, const FiniteForm& d) {
  try {
    return ResistanceSolver(d).resistance(inst.p(1), inst.p(2));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Disconnected || e.kind() == ErrorKind::SingularInterior)
      throw Error(ErrorKind::DegenerateLimit, std::string("iterate lost connectivity: ") + e.what());
    throw;
  }
}

}  // namespace

Instance Instance::make(const Rational& lambda) {
  Instance inst{Ifs::make(lambda), {}, {}, {}, true};
  inst.boundary = boundary_set_fast(inst.ifs);
  inst.layout = make_layout(inst.ifs, inst.boundary, 4, 6);
  inst.layout_corners = make_layout(inst.ifs, inst.boundary, 3, 3);
  const mpz_class& den = lambda.get_den();
  inst.dyadic = mpz_popcount(den.get_mpz_t()) == 1;
  return inst;
}

FiniteForm glue_level_one(const Instance& inst, const FiniteForm& d, const Weights& w) {
  if (d.size() != static_cast<int>(inst.boundary.size()))
    throw Error(ErrorKind::MismatchedVertexSets, "form does not live on the boundary set");
  for (double r : w)
    if (!(r > 0)) throw Error(ErrorKind::DomainError, "weights must be positive");
  const bool open = std::isinf(w[3]);
  const GlueLayout& g = open ? inst.layout_corners : inst.layout;
  FormBuilder b(g.nodes);
  for (int i = 0; i < (open ? 3 : 4); ++i) b.add_form(d, g.copy[i], 1.0 / w[i]);
  return std::move(b).build();
}

FiniteForm renorm_map(const Instance& inst, const FiniteForm& d, const Weights& w) {
  const bool open = std::isinf(w[3]);
  return trace(glue_level_one(inst, d, w), open ? inst.layout_corners.keep : inst.layout.keep);
}

double asymmetry(const Instance& inst, const FiniteForm& d) {
  const Eigen::MatrixXd c = dense_conductances(d);
  const auto& s = inst.boundary.rotation;
  double worst = 0;
  for (int x = 0; x < c.rows(); ++x)
    for (int y = x + 1; y < c.cols(); ++y) {
      const double mean = (c(x, y) + c(s[x], s[y]) + c(s[s[x]], s[s[y]])) / 3.0;
      worst = std::max(worst, std::abs(c(x, y) - mean));
    }
  return worst;
}

FiniteForm symmetrize(const Instance& inst, const FiniteForm& d) {
  const Eigen::MatrixXd c = dense_conductances(d);
  const auto& s = inst.boundary.rotation;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(c.rows(), c.cols());
  for (int x = 0; x < c.rows(); ++x)
    for (int y = 0; y < c.cols(); ++y)
      if (x != y) out(x, y) = (c(x, y) + c(s[x], s[y]) + c(s[s[x]], s[s[y]])) / 3.0;
  return from_dense(out);
}

FiniteForm perimeter_form(const Instance& inst) {
  const BoundarySet& b = inst.boundary;
  std::vector<std::pair<int, Rational>> ring;  // (index, parameter along the closed perimeter)
  const std::array<std::pair<int, Edge>, 3> sides{{{2, Edge::Bottom}, {3, Edge::Right}, {1, Edge::Left}}};
  for (int side = 0; side < 3; ++side) {
    ring.emplace_back(inst.p(sides[side].first), Rational(side));
    for (std::size_t k = 0; k < b.size(); ++k)
      if (!b.labels[k].is_corner() && b.labels[k].edge == sides[side].second)
        ring.emplace_back(static_cast<int>(k), Rational(side + b.labels[k].t));
  }
  std::vector<Conductance> edges;
  for (std::size_t k = 0; k < ring.size(); ++k) {
    const auto& a = ring[k];
    const auto& next = ring[(k + 1) % ring.size()];
    Rational dt = next.second - a.second;
    if (dt <= 0) dt += 3;
    edges.push_back({a.first, next.first, 1.0 / dt.get_d()});
  }
  return FiniteForm(static_cast<int>(b.size()), std::move(edges));
}

FiniteForm random_symmetric_form(const Instance& inst, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  const int n = static_cast<int>(inst.boundary.size());
  const auto& s = inst.boundary.rotation;
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(n, n, -1.0);
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      if (c(x, y) >= 0) continue;
      const double v = u(rng);
      int a = x, b = y;
      for (int k = 0; k < 3; ++k) {
        c(a, b) = c(b, a) = v;
        a = s[a], b = s[b];
      }
    }
  c.diagonal().setZero();
  return from_dense(c);
}

FiniteForm normalize(const Instance& inst, const FiniteForm& d) {
  return d.scaled(1.5 * p12_resistance(inst, d));
}

double relative_change(const FiniteForm& a, const FiniteForm& b) {
  const Eigen::MatrixXd ca = dense_conductances(a), cb = dense_conductances(b);
  double worst = 0;
  for (int x = 0; x < ca.rows(); ++x)
    for (int y = x + 1; y < ca.cols(); ++y)
      worst = std::max(worst, std::abs(ca(x, y) - cb(x, y)) / std::max(std::abs(cb(x, y)), 1e-15));
  return worst;
}

EigenResult power_iterate(const Instance& inst, const Weights& w, const EigenOptions& opts) {
  FiniteForm d = normalize(inst, symmetrize(inst, opts.start ? *opts.start : perimeter_form(inst)));
  EigenResult res;
  for (int it = 1; it <= opts.max_iters; ++it) {
    const FiniteForm next = renorm_map(inst, d, w);
    const double rn = p12_resistance(inst, next);
    FiniteForm dn = symmetrize(inst, next.scaled(1.5 * rn));
    res.change = relative_change(dn, d);
    res.iterations = it;
    d = std::move(dn);
    if (res.change < opts.tol) {
      if (!d.connected()) throw Error(ErrorKind::DegenerateLimit, "limit boundary form is disconnected");
      res.factor = (2.0 / 3.0) / p12_resistance(inst, renorm_map(inst, d, w));
      res.form = std::move(d);
      return res;
    }
  }
  throw Error(ErrorKind::NoConvergence, "power iteration did not reach tolerance after " +
                                            std::to_string(opts.max_iters) + " steps (last change " +
                                            std::to_string(res.change) + ")");
}

EigenResult eigen_solve(const Instance& inst, double rtilde4, const EigenOptions& opts) {
  if (!(rtilde4 > 0)) throw Error(ErrorKind::DomainError, "rtilde4 must be positive");
  EigenResult res = power_iterate(inst, {1.0, 1.0, 1.0, rtilde4}, opts);
  if (res.factor < 0.6 - 1e-9 || !(res.factor < 1.0))
    throw Error(ErrorKind::RangeViolation, "eigenvalue " + decimal_string(res.factor) + " outside [3/5,1)");
  return res;
}

Solution solve_r(const Instance& inst, double s, const SolveOptions& opts) {
  if (!(s > 0 && s < 1)) throw Error(ErrorKind::DomainError, "s must lie in (0,1)");
  EigenOptions eo = opts.eigen;
  Solution sol;
  sol.lambda = inst.ifs.lambda();
  sol.s = s;
  sol.experimental = !inst.dyadic;

  EigenResult last;
  const auto g = [&](double rt) {
    last = eigen_solve(inst, rt, eo);
    eo.start = last.form;
    sol.eigen_iterations += last.iterations;
    return rt * last.factor;
  };

  // C lies in [3/5, 1), so g(rt) = rt C(rt) lies in [0.6 rt, rt).
  double lo = s, hi = s / 0.6;
  int expansions = 0;
  while (g(lo) > s) {
    if (++expansions > opts.max_expansions) throw Error(ErrorKind::BracketFailure, "cannot bracket s from below");
    lo /= 2;
  }
  while (g(hi) < s) {
    if (++expansions > opts.max_expansions) throw Error(ErrorKind::BracketFailure, "cannot bracket s from above");
    hi *= 2;
  }

  double mid = 0.5 * (lo + hi), gm = g(mid);
  for (int step = 0; step < 200 && std::abs(gm - s) > opts.bisect_tol; ++step) {
    (gm < s ? lo : hi) = mid;
    if (hi - lo <= 1e-16 * hi) break;
    mid = 0.5 * (lo + hi);
    gm = g(mid);
    ++sol.bisection_steps;
  }
  if (std::abs(gm - s) > opts.bisect_tol)
    throw Error(ErrorKind::NoConvergence, "bisection stalled at |g - s| = " + decimal_string(std::abs(gm - s)));

  sol.rtilde4 = mid;
  sol.C = last.factor;
  sol.r = last.factor;
  sol.theta = -std::log(sol.r) / std::log(2.0);
  sol.D = last.form;
  sol.residual = relative_change(renorm_map(inst, sol.D, {sol.r, sol.r, sol.r, s}), sol.D);
  if (sol.r < 0.6 - 1e-9 || !(sol.r < 1.0))
    throw Error(ErrorKind::RangeViolation, "r = " + decimal_string(sol.r) + " outside [3/5,1)");
  return sol;
}

std::vector<ScanEntry> uniqueness_scan(const Instance& inst, const Solution& sol, const std::vector<double>& grid,
                                       const EigenOptions& opts) {
  std::vector<ScanEntry> out;
  for (double rp : grid) {
    if (!(rp > 0)) throw Error(ErrorKind::DomainError, "scan weights must be positive");
    EigenOptions eo = opts;
    eo.start = sol.D;
    out.push_back({rp, power_iterate(inst, {rp, rp, rp, sol.s}, eo).factor});
  }
  return out;
}

}  // namespace agres
