#include <algorithm>
#include <cmath>
#include <numeric>

#include "agres/errors.hpp"
#include "agres/geometry.hpp"

namespace agres {

std::optional<int> GraphApprox::find(const Point& p) const {
  if (auto it = index_.find(p); it != index_.end()) return it->second;
  return std::nullopt;
}

void GraphApprox::build_index() {
  index_.clear();
  index_.reserve(vertices.size());
  for (std::size_t k = 0; k < vertices.size(); ++k) index_.emplace(vertices[k], static_cast<int>(k));
}

void for_each_word(const Ifs& ifs, int m, const std::function<void(const Word&, const Similarity&)>& visit) {
  Word w;
  std::function<void(const Similarity&)> rec = [&](const Similarity& f) {
    if (static_cast<int>(w.size()) == m) {
      visit(w, f);
      return;
    }
    for (int i = 1; i <= 4; ++i) {
      w.letters.push_back(i);
      rec(f.compose(ifs.map(i)));
      w.letters.pop_back();
    }
  };
  rec(Similarity{});
}

std::vector<Point> level_vertices(const Ifs& ifs, int m) {
  std::vector<Point> out;
  std::unordered_map<Point, int, PointHash> seen;
  for (int k = 0; k <= m; ++k) {
    for_each_word(ifs, k, [&](const Word&, const Similarity& f) {
      for (const Point& c : Ifs::corners()) {
        Point p = f.apply(c);
        if (seen.emplace(p, static_cast<int>(out.size())).second) out.push_back(std::move(p));
      }
    });
  }
  return out;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a), b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

std::vector<std::pair<int, int>> clique_edges(const std::vector<Cell>& cells) {
  std::vector<std::pair<int, int>> edges;
  for (const Cell& c : cells)
    for (std::size_t a = 0; a < c.vertices.size(); ++a)
      for (std::size_t b = a + 1; b < c.vertices.size(); ++b) edges.emplace_back(c.vertices[a], c.vertices[b]);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace

GraphApprox approximation_graph(const Ifs& ifs, int m, int cap) {
  if (m < 0 || m > cap)
    throw Error(ErrorKind::CapExceeded, "level " + std::to_string(m) + " outside [0," + std::to_string(cap) + "]");
  GraphApprox g;
  g.level = m;
  g.vertices = level_vertices(ifs, m);
  g.build_index();

  // Bucket vertices on a uniform grid so each cell only inspects nearby ones.
  const int n = 1 << std::min(m, 9);
  const double h = 1.0 / n;
  std::vector<std::vector<int>> grid(static_cast<std::size_t>(n) * n);
  const auto bucket = [&](double v) { return std::clamp(static_cast<int>(std::floor(v / h)), 0, n - 1); };
  for (std::size_t k = 0; k < g.vertices.size(); ++k) {
    const auto d = g.vertices[k].to_double();
    grid[bucket(d[1]) * n + bucket(d[0])].push_back(static_cast<int>(k));
  }

  AttractorMembership membership(ifs);
  std::vector<std::array<double, 2>> corners_d;
  for (const auto& c : Ifs::corners()) corners_d.push_back(c.to_double());
  const double slack = 1e-9;

  for_each_word(ifs, m, [&](const Word& w, const Similarity& f) {
    const SimilarityD fd = SimilarityD::from(f);
    double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
    for (const auto& c : corners_d) {
      const auto p = fd.apply(c[0], c[1]);
      for (int a = 0; a < 2; ++a) lo[a] = std::min(lo[a], p[a]), hi[a] = std::max(hi[a], p[a]);
    }
    Cell cell{w, {}};
    for (int gy = bucket(lo[1] - slack); gy <= bucket(hi[1] + slack); ++gy) {
      for (int gx = bucket(lo[0] - slack); gx <= bucket(hi[0] + slack); ++gx) {
        for (int id : grid[gy * n + gx]) {
          const auto d = g.vertices[id].to_double();
          if (d[0] < lo[0] - slack || d[0] > hi[0] + slack || d[1] < lo[1] - slack || d[1] > hi[1] + slack) continue;
          if (membership.contains(f.apply_inverse(g.vertices[id]))) cell.vertices.push_back(id);
        }
      }
    }
    std::sort(cell.vertices.begin(), cell.vertices.end());
    g.cells.push_back(std::move(cell));
  });

  g.edges = clique_edges(g.cells);
  UnionFind uf(g.vertices.size());
  std::size_t components = g.vertices.size();
  for (const auto& [a, b] : g.edges)
    if (uf.unite(a, b)) --components;
  if (components != 1)
    throw Error(ErrorKind::Disconnected, "approximation graph at level " + std::to_string(m) + " is disconnected");
  return g;
}

GraphApprox boundary_cell_graph(const Ifs& ifs, const BoundarySet& boundary, int m,
                                std::vector<std::vector<int>>* local) {
  GraphApprox g;
  g.level = m;
  g.vertices = level_vertices(ifs, m);
  g.build_index();
  if (local) local->clear();
  for_each_word(ifs, m, [&](const Word& w, const Similarity& f) {
    std::vector<std::pair<int, int>> hits;
    for (std::size_t k = 0; k < boundary.size(); ++k)
      if (auto id = g.find(f.apply(boundary.points[k]))) hits.emplace_back(*id, static_cast<int>(k));
    std::sort(hits.begin(), hits.end());
    Cell cell{w, {}};
    std::vector<int> loc;
    for (const auto& [id, k] : hits) {
      cell.vertices.push_back(id);
      loc.push_back(k);
    }
    g.cells.push_back(std::move(cell));
    if (local) local->push_back(std::move(loc));
  });
  g.edges = clique_edges(g.cells);
  return g;
}

}  // namespace agres
