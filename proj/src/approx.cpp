#include "agres/approx.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "agres/errors.hpp"

namespace agres {

LevelForm level_form(const Instance& inst, const Solution& sol, int m, int cap) {
  if (m < 0 || m > cap)
    throw Error(ErrorKind::CapExceeded, "level " + std::to_string(m) + " outside [0," + std::to_string(cap) + "]");
  if (sol.D.size() != static_cast<int>(inst.boundary.size()))
    throw Error(ErrorKind::IdentificationMismatch, "solution does not live on this boundary set");
  LevelForm lf;
  lf.m = m;
  lf.graph = boundary_cell_graph(inst.ifs, inst.boundary, m, &lf.local);

  // Cells see only a few distinct subsets of the boundary set, so the traces
  // are shared.
  std::map<std::vector<int>, FiniteForm> traces;
  FormBuilder builder(static_cast<int>(lf.graph.vertices.size()));
  for (std::size_t c = 0; c < lf.graph.cells.size(); ++c) {
    const std::vector<int>& loc = lf.local[c];
    if (loc.size() < 3)
      throw Error(ErrorKind::IdentificationMismatch, "cell " + lf.graph.cells[c].word.str() + " lost its corners");
    auto it = traces.find(loc);
    if (it == traces.end()) it = traces.emplace(loc, trace(sol.D, loc)).first;
    builder.add_form(it->second, lf.graph.cells[c].vertices, 1.0 / lf.graph.cells[c].word.weight(sol.r, sol.s));
  }
  lf.form = std::move(builder).build();
  if (!lf.form.connected())
    throw Error(ErrorKind::Disconnected, "level form at m = " + std::to_string(m) + " is disconnected");
  return lf;
}

double similarity_dimension(const std::vector<double>& ratios) {
  for (double q : ratios)
    if (!(q > 0 && q < 1)) throw Error(ErrorKind::BadWeights, "contraction ratios must lie in (0,1)");
  const auto f = [&](double d) {
    double sum = -1;
    for (double q : ratios) sum += std::pow(q, d);
    return sum;
  };
  // f is strictly decreasing in d; f(0) = n - 1 > 0.
  double lo = 0, hi = 1;
  while (f(hi) > 0) hi *= 2;
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MeasureSpec measure_weights(const Ifs& ifs, MeasureScheme scheme, const std::array<double, 4>& custom) {
  MeasureSpec mu;
  mu.scheme = scheme;
  switch (scheme) {
    case MeasureScheme::Hausdorff: {
      const std::vector<double> ratios{ifs.ratio(1), ifs.ratio(2), ifs.ratio(3), ifs.ratio(4)};
      mu.dimension = similarity_dimension(ratios);
      for (int i = 0; i < 4; ++i) mu.weights[i] = std::pow(ratios[i], mu.dimension);
      break;
    }
    case MeasureScheme::Uniform:
      mu.weights.fill(0.25);
      break;
    case MeasureScheme::Custom: {
      double sum = 0;
      for (double w : custom) {
        if (!(w > 0) || !std::isfinite(w)) throw Error(ErrorKind::BadWeights, "custom measure weights must be positive");
        sum += w;
      }
      for (int i = 0; i < 4; ++i) mu.weights[i] = custom[i] / sum;
      break;
    }
  }
  return mu;
}

MeasureScheme parse_measure_scheme(const std::string& name) {
  if (name == "hausdorff") return MeasureScheme::Hausdorff;
  if (name == "uniform") return MeasureScheme::Uniform;
  if (name == "custom") return MeasureScheme::Custom;
  throw Error(ErrorKind::ParseError, "unknown measure scheme '" + name + "'");
}

const char* to_string(MeasureScheme scheme) {
  switch (scheme) {
    case MeasureScheme::Hausdorff: return "hausdorff";
    case MeasureScheme::Uniform: return "uniform";
    case MeasureScheme::Custom: return "custom";
  }
  return "?";
}

Eigen::VectorXd vertex_masses(const LevelForm& lf, const MeasureSpec& mu) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lf.graph.vertices.size()));
  for (std::size_t c = 0; c < lf.graph.cells.size(); ++c) {
    double cell = 1;
    for (int letter : lf.graph.cells[c].word.letters) cell *= mu.weights[letter - 1];
    const auto& loc = lf.local[c];
    for (std::size_t j = 0; j < loc.size(); ++j)
      if (loc[j] < 3) m[lf.graph.cells[c].vertices[j]] += cell / 3.0;
  }
  return m / m.sum();
}

std::vector<PairResistance> resistance_metric(const LevelForm& lf, const std::vector<std::pair<Point, Point>>& pairs) {
  const auto id = [&](const Point& p) {
    auto k = lf.graph.find(p);
    if (!k) throw Error(ErrorKind::UnknownVertex, p.exact_string() + " is not a level-" + std::to_string(lf.m) + " vertex");
    return *k;
  };
  std::vector<std::pair<int, int>> ids;
  for (const auto& [x, y] : pairs) ids.emplace_back(id(x), id(y));
  const ResistanceSolver solver(lf.form);
  std::vector<PairResistance> out;
  for (const auto& [x, y] : ids) out.push_back({x, y, solver.resistance(x, y)});
  return out;
}

BoundaryCheck boundary_resistance_check(const Instance& inst, const Solution& sol, int m) {
  if (m < 1) throw Error(ErrorKind::DomainError, "boundary check needs m >= 1");
  const LevelForm lf = level_form(inst, sol, m);
  std::vector<int> bottom;
  for (std::size_t k = 0; k < lf.graph.vertices.size(); ++k)
    if (lf.graph.vertices[k].y.is_zero()) bottom.push_back(static_cast<int>(k));
  BoundaryCheck out;
  out.value = effective_resistance(lf.form, 0, bottom);
  out.bound = 0.5 * sol.s * sol.r / (sol.s + sol.r);
  out.reference = effective_resistance(lf.form, 0, std::vector<int>{1, 2});
  out.pass = out.value >= out.bound;
  return out;
}

DecimationCheck decimation_check(const Instance& inst, const Solution& sol, int m,
                                 const std::array<double, 3>& corner_values) {
  if (m < 1) throw Error(ErrorKind::DomainError, "decimation check needs m >= 1");
  const LevelForm fine = level_form(inst, sol, m), coarse = level_form(inst, sol, m - 1);
  const Eigen::VectorXd h = harmonic_extension(fine.form, {0, 1, 2},
                                               Eigen::Vector3d(corner_values[0], corner_values[1], corner_values[2]));
  DecimationCheck out{fine.form.energy(h), 0.0, 0.0, 0};
  BoundaryTrace nested(inst, sol);
  for (int i = 1; i <= 4; ++i) {
    const Similarity& f = inst.ifs.map(i);
    std::vector<Point> u;
    std::vector<double> values;
    for (std::size_t k = 0; k < fine.graph.vertices.size(); ++k) {
      Point q = f.apply_inverse(fine.graph.vertices[k]);
      if (!in_triangle(q)) continue;
      u.push_back(std::move(q));
      values.push_back(h[static_cast<Eigen::Index>(k)]);
    }
    bool coarse_route = u.size() == coarse.graph.vertices.size();
    Eigen::VectorXd g(static_cast<Eigen::Index>(coarse.graph.vertices.size()));
    for (std::size_t k = 0; k < u.size() && coarse_route; ++k) {
      auto id = coarse.graph.find(u[k]);
      if (!id) coarse_route = false;
      else g[*id] = values[k];
    }
    const double weight = i == 4 ? sol.s : sol.r;
    if (coarse_route) {
      out.decimated += coarse.form.energy(g) / weight;
    } else {
      ++out.nested_cells;
      out.decimated += nested.onto(u).energy(Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                                                 static_cast<Eigen::Index>(values.size()))) /
                       weight;
    }
  }
  out.rel_error = std::abs(out.decimated - out.energy) / std::max(std::abs(out.energy), 1e-300);
  return out;
}

ResolventKernel resolvent_kernel(const LevelForm& lf, double alpha, const MeasureSpec& mu) {
  return resolvent(lf.form, vertex_masses(lf, mu), alpha);
}

}  // namespace agres
