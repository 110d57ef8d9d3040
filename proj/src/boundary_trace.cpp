#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "agres/approx.hpp"
#include "agres/errors.hpp"

namespace agres {

namespace {

bool point_less(const Point& a, const Point& b) {
  if (int c = compare(a.x, b.x)) return c < 0;
  return compare(a.y, b.y) < 0;
}

struct PointSetLess {
  bool operator()(const std::vector<Point>& a, const std::vector<Point>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), point_less);
  }
};

}  // namespace

// The trace onto S is computed through one subdivision step: S together with
// V_1 separates the four cells, each cell contributes r_i^{-1} times the trace
// onto its pulled-back points, and eliminating V_1 \ S leaves the trace onto S.
struct BoundaryTrace::Impl {
  const Instance& inst;
  const Solution& sol;
  int depth_cap;
  std::vector<Point> v1;
  std::map<std::vector<Point>, FiniteForm, PointSetLess> memo;

  // sorted must be strictly increasing under point_less.
  FiniteForm solve(const std::vector<Point>& sorted, int depth) {
    if (auto it = memo.find(sorted); it != memo.end()) return it->second;
    FiniteForm out = compute(sorted, depth);
    memo.emplace(sorted, out);
    return out;
  }

  FiniteForm compute(const std::vector<Point>& s, int depth) {
    std::vector<int> base;
    for (const Point& p : s) {
      auto k = inst.boundary.find(p);
      if (!k) break;
      base.push_back(*k);
    }
    if (base.size() == s.size()) return trace(sol.D, base);
    if (depth >= depth_cap)
      throw Error(ErrorKind::DepthExceeded, "nested trace exceeded depth " + std::to_string(depth_cap));

    std::vector<Point> u = s;
    for (const Point& p : v1)
      if (!std::binary_search(s.begin(), s.end(), p, point_less)) u.push_back(p);

    FormBuilder builder(static_cast<int>(u.size()));
    for (int i = 1; i <= 4; ++i) {
      const Similarity& f = inst.ifs.map(i);
      std::vector<std::pair<Point, int>> pulled;
      for (std::size_t k = 0; k < u.size(); ++k) {
        Point q = f.apply_inverse(u[k]);
        if (in_triangle(q)) pulled.emplace_back(std::move(q), static_cast<int>(k));
      }
      std::sort(pulled.begin(), pulled.end(),
                [](const auto& a, const auto& b) { return point_less(a.first, b.first); });
      std::vector<Point> sub;
      std::vector<int> ids;
      for (auto& [q, k] : pulled) {
        sub.push_back(std::move(q));
        ids.push_back(k);
      }
      const double weight = i == 4 ? sol.s : sol.r;
      builder.add_form(solve(sub, depth + 1), ids, 1.0 / weight);
    }
    std::vector<int> keep(s.size());
    std::iota(keep.begin(), keep.end(), 0);
    return trace(std::move(builder).build(), keep);
  }
};

BoundaryTrace::BoundaryTrace(const Instance& inst, const Solution& sol, int depth_cap)
    : impl_(new Impl{inst, sol, depth_cap, level_vertices(inst.ifs, 1), {}}) {}

BoundaryTrace::~BoundaryTrace() = default;

FiniteForm BoundaryTrace::onto(const std::vector<Point>& points) {
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return point_less(points[a], points[b]); });
  std::vector<Point> sorted;
  AttractorMembership membership(impl_->inst.ifs);
  for (int k : order) {
    if (!sorted.empty() && sorted.back() == points[k])
      throw Error(ErrorKind::DomainError, "repeated point " + points[k].exact_string());
    if (!membership.contains(points[k]))
      throw Error(ErrorKind::UnknownVertex, points[k].exact_string() + " is not in the attractor");
    sorted.push_back(points[k]);
  }
  const FiniteForm f = impl_->solve(sorted, 0);
  // order[j] is the index in `points` of sorted entry j.
  std::vector<Conductance> edges;
  for (const Conductance& e : f.edges()) {
    const int a = order[e.x], b = order[e.y];
    edges.push_back({std::min(a, b), std::max(a, b), e.c});
  }
  return FiniteForm(static_cast<int>(points.size()), std::move(edges));
}

double BoundaryTrace::resistance(const Point& x, const Point& y) {
  if (x == y) return 0;
  return effective_resistance(onto({x, y}), 0, 1);
}

std::vector<std::pair<Point, Point>> dyadic_edge_pairs(int k_min, int k_max, int per_scale) {
  std::vector<std::pair<Point, Point>> out;
  for (int k = k_min; k <= k_max; ++k) {
    const long n = 1L << k;
    std::vector<long> starts;
    for (int j = 0; j < per_scale; ++j) starts.push_back((n - 1) * j / std::max(per_scale, 1));
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    for (long j : starts)
      out.emplace_back(edge_point(Edge::Bottom, Rational(j, n)), edge_point(Edge::Bottom, Rational(j + 1, n)));
  }
  return out;
}

ExponentFit scaling_exponent(const Instance& inst, const Solution& sol, int level_min, int level_max, int per_scale) {
  if (level_min < 1 || level_max - level_min + 1 < 4)
    throw Error(ErrorKind::InsufficientScales, "need at least 4 dyadic scales, got levels " +
                                                   std::to_string(level_min) + ".." + std::to_string(level_max));
  BoundaryTrace bt(inst, sol);
  ExponentFit fit;
  fit.theta = sol.theta;
  for (const auto& [x, y] : dyadic_edge_pairs(level_min, level_max, per_scale))
    fit.samples.emplace_back(distance(x, y), bt.resistance(x, y));

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(fit.samples.size());
  for (const auto& [d, r] : fit.samples) {
    const double lx = std::log(d), ly = std::log(r);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  fit.theta_fit = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.c1 = INFINITY, fit.c2 = 0;
  for (const auto& [d, r] : fit.samples) {
    const double q = r / std::pow(d, fit.theta);
    fit.c1 = std::min(fit.c1, q), fit.c2 = std::max(fit.c2, q);
  }
  fit.spread = fit.c2 / fit.c1;

  // The two-sided envelope also covers pairs inside nested added cells, whose
  // diameters shrink like rho^k rather than 2^-k.
  ResistanceEnvelope& env = fit.envelope;
  env.theta = fit.theta;
  const double added = std::log(sol.s) / std::log(inst.ifs.added_ratio());
  env.eta_star = std::max(added, fit.theta);
  env.eta_sub = std::min(added, fit.theta);
  std::vector<std::pair<double, double>> all = fit.samples;
  Similarity f;
  for (int k = 1; k <= 3; ++k) {
    f = f.compose(inst.ifs.map(4));
    const Point a = f.apply(Ifs::corner(1)), b = f.apply(Ifs::corner(2));
    all.emplace_back(distance(a, b), bt.resistance(a, b));
  }
  env.c1 = INFINITY, env.c2 = 0;
  for (const auto& [d, r] : all) {
    env.c1 = std::min(env.c1, r / std::pow(d, env.eta_star));
    env.c2 = std::max(env.c2, r / std::pow(d, env.eta_sub));
  }
  return fit;
}

}  // namespace agres
