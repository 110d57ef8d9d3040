#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "agres/errors.hpp"
#include "agres/renorm.hpp"

namespace agres {

namespace {

std::vector<int> canonical(const std::vector<int>& labels) {
  std::vector<int> out(labels.size());
  std::unordered_map<int, int> rename;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    auto [it, fresh] = rename.emplace(labels[k], static_cast<int>(rename.size()));
    out[k] = it->second;
  }
  return out;
}

// Node indices of F_w(boundary) for every word of length k, on the exactly
// identified union, plus the nodes of the boundary itself.
struct LevelLayout {
  int nodes = 0;
  std::vector<std::vector<int>> copies;
  std::vector<int> keep;
};

LevelLayout level_layout(const Instance& inst, int k) {
  LevelLayout out;
  std::unordered_map<Point, int, PointHash> index;
  for_each_word(inst.ifs, k, [&](const Word&, const Similarity& f) {
    std::vector<int> ids;
    ids.reserve(inst.boundary.size());
    for (const Point& p : inst.boundary.points) {
      auto [it, fresh] = index.emplace(f.apply(p), out.nodes);
      if (fresh) ++out.nodes;
      ids.push_back(it->second);
    }
    out.copies.push_back(std::move(ids));
  });
  for (const Point& p : inst.boundary.points) {
    auto it = index.find(p);
    if (it == index.end()) throw Error(ErrorKind::IdentificationMismatch, "boundary point missing from refined set");
    out.keep.push_back(it->second);
  }
  return out;
}

int root(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

}  // namespace

int Relation::blocks() const { return block.empty() ? 0 : *std::max_element(block.begin(), block.end()) + 1; }

bool Relation::is_trivial() const { return blocks() <= 1 || blocks() == static_cast<int>(block.size()); }

namespace {

std::vector<int> refine_with(const LevelLayout& lay, const std::vector<int>& block) {
  std::vector<int> parent(lay.nodes);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> first(block.size(), -1);
  for (std::size_t x = 0; x < block.size(); ++x)
    if (first[block[x]] < 0) first[block[x]] = static_cast<int>(x);
  for (const auto& ids : lay.copies) {
    for (std::size_t x = 0; x < block.size(); ++x) {
      const int a = root(parent, ids[x]), b = root(parent, ids[first[block[x]]]);
      if (a != b) parent[a] = b;
    }
  }
  std::vector<int> labels;
  for (int node : lay.keep) labels.push_back(root(parent, node));
  return canonical(labels);
}

}  // namespace

std::vector<int> refine_relation(const Instance& inst, const std::vector<int>& block, int k) {
  if (block.size() != inst.boundary.size()) throw Error(ErrorKind::DomainError, "relation size mismatch");
  if (k < 1) throw Error(ErrorKind::DomainError, "refinement depth must be at least 1");
  return refine_with(level_layout(inst, k), canonical(block));
}

std::vector<Relation> enumerate_invariant_relations(const Instance& inst, int guard) {
  const int n = static_cast<int>(inst.boundary.size());
  if (n > guard)
    throw Error(ErrorKind::GuardExceeded, "boundary set has " + std::to_string(n) + " points, guard is " +
                                              std::to_string(guard));
  const auto& rot = inst.boundary.rotation;
  std::vector<int> order;
  for (const auto& orbit : inst.boundary.orbits()) order.insert(order.end(), orbit.begin(), orbit.end());

  std::vector<int> label(n, -1);
  std::vector<Relation> out;
  std::set<std::vector<int>> seen;
  const auto consistent = [&](int e) {
    for (int f = 0; f < n; ++f) {
      if (label[f] < 0) continue;
      int a = e, b = f;
      for (int k = 0; k < 2; ++k) {
        a = rot[a], b = rot[b];
        if (label[a] >= 0 && label[b] >= 0 && ((label[e] == label[f]) != (label[a] == label[b]))) return false;
      }
    }
    return true;
  };
  std::function<void(int, int)> rec = [&](int pos, int used) {
    if (pos == n) {
      Relation r{canonical(label), true, false};
      if (seen.insert(r.block).second) out.push_back(std::move(r));
      return;
    }
    const int e = order[pos];
    for (int b = 0; b <= used; ++b) {
      label[e] = b;
      if (consistent(e)) rec(pos + 1, std::max(used, b + 1));
    }
    label[e] = -1;
  };
  rec(0, 0);
  std::sort(out.begin(), out.end(), [](const Relation& a, const Relation& b) { return a.block < b.block; });
  return out;
}

std::vector<Relation> enumerate_preserved_relations(const Instance& inst, int k, int guard) {
  std::vector<LevelLayout> layouts;
  for (int depth = 1; depth <= std::max(1, k); ++depth) layouts.push_back(level_layout(inst, depth));
  std::vector<Relation> out;
  for (Relation r : enumerate_invariant_relations(inst, guard)) {
    bool ok = true;
    for (std::size_t d = 0; d < layouts.size() && ok; ++d) ok = refine_with(layouts[d], r.block) == r.block;
    r.preserved = ok;
    if (ok) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace agres
