#include <algorithm>
#include <map>
#include <set>

#include "agres/errors.hpp"
#include "agres/geometry.hpp"

namespace agres {

std::string BoundaryLabel::str() const {
  if (is_corner()) return "p" + std::to_string(corner);
  return std::string(to_string(edge)) + "(" + rational_string(t) + ")";
}

std::optional<int> BoundarySet::find(const Point& p) const {
  if (auto it = index_.find(p); it != index_.end()) return it->second;
  return std::nullopt;
}

void BoundarySet::build_index() {
  index_.clear();
  for (std::size_t k = 0; k < points.size(); ++k) index_.emplace(points[k], static_cast<int>(k));
}

std::vector<std::vector<int>> BoundarySet::orbits() const {
  std::vector<std::vector<int>> out;
  std::vector<bool> seen(size(), false);
  for (std::size_t k = 0; k < size(); ++k) {
    if (seen[k]) continue;
    std::vector<int> orbit;
    for (int j = static_cast<int>(k); j >= 0 && !seen[j]; j = rotation[j]) {
      seen[j] = true;
      orbit.push_back(j);
    }
    out.push_back(std::move(orbit));
  }
  return out;
}

BoundarySet BoundarySet::from_points(const std::vector<Point>& pts) {
  const Rational half(1, 2);
  std::set<int> corners;
  std::map<Rational, std::set<int>> edges;  // t -> present edge indices
  for (const Point& p : pts) {
    bool placed = false;
    for (int i = 1; i <= 3 && !placed; ++i)
      if (p == Ifs::corner(i)) corners.insert(i), placed = true;
    if (placed) continue;
    const Rational& xa = p.x.rational_part();
    const Rational& yb = p.y.sqrt3_part();
    const std::array<std::pair<Edge, Rational>, 3> guesses{
        {{Edge::Bottom, xa}, {Edge::Right, Rational(2 * yb)}, {Edge::Left, Rational(1 - 2 * xa)}}};
    for (const auto& [e, t] : guesses) {
      if (t > 0 && t < 1 && edge_point(e, t) == p) {
        edges[t].insert(static_cast<int>(e));
        placed = true;
        break;
      }
    }
    if (!placed)
      throw Error(ErrorKind::IdentificationMismatch, "cell-boundary point off the outer triangle: " + p.exact_string());
  }
  BoundarySet b;
  for (int i : corners) {
    b.points.push_back(Ifs::corner(i));
    b.labels.push_back(BoundaryLabel{i, Edge::Bottom, Rational(0)});
  }
  for (const auto& [t, present] : edges) {
    b.params.push_back(t);
    for (int e : present) {
      b.points.push_back(edge_point(static_cast<Edge>(e), t));
      b.labels.push_back(BoundaryLabel{0, static_cast<Edge>(e), t});
    }
  }
  b.build_index();
  const Ifs probe = Ifs::make(Rational(1, 4));  // the rotation does not depend on lambda
  b.rotation.resize(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) b.rotation[k] = b.find(probe.rotation(1).apply(b.points[k])).value_or(-1);
  return b;
}

std::vector<Rational> doubling_orbit(const Rational& start, int guard) {
  const Rational half(1, 2);
  std::vector<Rational> orbit;
  std::set<Rational> seen;
  Rational t = start;
  while (t > 0 && t < 1 && !seen.count(t)) {
    if (static_cast<int>(orbit.size()) >= guard)
      throw Error(ErrorKind::OrbitOverflow, "doubling orbit exceeds guard " + std::to_string(guard));
    seen.insert(t);
    orbit.push_back(t);
    if (t == half) break;
    t = t < half ? Rational(2 * t) : Rational(2 * t - 1);
  }
  std::sort(orbit.begin(), orbit.end());
  return orbit;
}

BoundarySet boundary_set_fast(const Ifs& ifs, int guard) {
  std::vector<Point> pts(Ifs::corners().begin(), Ifs::corners().end());
  for (const Rational& t : doubling_orbit(Rational(2 * ifs.lambda()), guard))
    for (Edge e : {Edge::Bottom, Edge::Right, Edge::Left}) pts.push_back(edge_point(e, t));
  return BoundarySet::from_points(pts);
}

BoundarySet boundary_set_oracle(const Ifs& ifs, int depth) {
  std::vector<Point> pts;
  std::unordered_map<Point, int, PointHash> seen;
  for (int k = 0; k <= depth; ++k) {
    const GraphApprox g = approximation_graph(ifs, k);
    std::size_t c = 0;
    for_each_word(ifs, k, [&](const Word&, const Similarity& f) {
      for (int id : g.cells[c].vertices) {
        Point q = f.apply_inverse(g.vertices[id]);
        if (seen.emplace(q, 0).second) pts.push_back(std::move(q));
      }
      ++c;
    });
  }
  return BoundarySet::from_points(pts);
}

}  // namespace agres
