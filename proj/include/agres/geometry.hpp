#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "agres/scalar.hpp"

namespace agres {

/// A finite word over the alphabet {1,2,3,4}; letter 4 is the added cell.
struct Word {
  std::vector<int> letters;

  /// r^(#letters in {1,2,3}) * s^(#letters equal to 4).
  double weight(double r, double s) const;
  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  Word then(int letter) const;

  /// Accepts "", "4", "1,4", "(1,4)" and "()" forms.
  static Word parse(std::string_view text);
  /// "(1,4)"; the empty word renders as "()".
  std::string str() const;

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;
};

/// The four similarities of the gasket with an added rotated triangle, for a
/// rational parameter lambda in (0, 1/2), plus the rotation group acting on
/// the outer triangle.
class Ifs {
 public:
  static Ifs make(const Rational& lambda);

  const Rational& lambda() const { return lambda_; }
  /// i in 1..4.
  const Similarity& map(int i) const { return maps_.at(i - 1); }
  const SimilarityD& map_d(int i) const { return maps_d_.at(i - 1); }
  /// i in 1..3: p1 = (1/2, sqrt3/2), p2 = (0,0), p3 = (1,0).
  static const Point& corner(int i);
  static const std::array<Point, 3>& corners();
  static const Point& centroid();

  /// k in {1, 2}: counterclockwise rotation by k * 120 degrees about the
  /// centroid. rotation(1) sends p2 -> p3 -> p1 -> p2.
  const Similarity& rotation(int k) const { return rotations_.at(k - 1); }

  Scalar added_ratio_squared() const { return maps_[3].ratio_squared(); }
  double added_ratio() const { return maps_[3].ratio(); }
  /// Contraction ratio of map i (1/2 for the corner maps).
  double ratio(int i) const { return i == 4 ? added_ratio() : 0.5; }

  Similarity word_map(const Word& w) const;

 private:
  Rational lambda_;
  std::array<Similarity, 4> maps_;
  std::array<SimilarityD, 4> maps_d_;
  std::array<Similarity, 2> rotations_;
};

/// Exact membership test for the closed reference triangle.
bool in_triangle(const Point& p);
bool on_triangle_boundary(const Point& p);

/// Memoized exact decision of membership in the attractor. The descent pulls
/// p back through every map whose triangle contains it; reaching the outer
/// boundary certifies membership, and a repeated point on the current path
/// certifies a fixed point of some composed map.
class AttractorMembership {
 public:
  explicit AttractorMembership(const Ifs& ifs, int cap = 64) : ifs_(&ifs), cap_(cap) {}
  bool contains(const Point& p);

 private:
  bool descend(const Point& p, std::vector<Point>& path, int& budget);

  const Ifs* ifs_;
  int cap_;
  std::unordered_map<Point, bool, PointHash> memo_;
};

bool point_in_attractor(const Ifs& ifs, const Point& p, int cap = 64);

enum class Edge { Bottom = 0, Right = 1, Left = 2 };

const char* to_string(Edge e);

/// Point on the outer boundary at parameter t: bottom runs p2 -> p3, right
/// runs p3 -> p1, left runs p1 -> p2.
Point edge_point(Edge e, const Rational& t);

struct BoundaryLabel {
  int corner = 0;  // 1..3 for a corner, 0 for an edge point
  Edge edge = Edge::Bottom;
  Rational t;

  bool is_corner() const { return corner != 0; }
  std::string str() const;
  friend bool operator==(const BoundaryLabel& a, const BoundaryLabel& b) {
    return a.corner == b.corner && (a.corner != 0 || (a.edge == b.edge && a.t == b.t));
  }
};

/// Cell-boundary vertex set: the corners followed by, for every parameter in
/// ascending order, its bottom, right and left copies.
struct BoundarySet {
  std::vector<Point> points;
  std::vector<BoundaryLabel> labels;
  std::vector<Rational> params;
  /// rotation[k] = index of the image of point k under rotation(1).
  std::vector<int> rotation;

  std::size_t size() const { return points.size(); }
  std::optional<int> find(const Point& p) const;
  /// Orbits of the rotation action, each listed from its smallest index.
  std::vector<std::vector<int>> orbits() const;

  static BoundarySet from_points(const std::vector<Point>& pts);

 private:
  std::unordered_map<Point, int, PointHash> index_;
  void build_index();
};

/// The doubling orbit of 2*lambda, where t = 1/2 is terminal.
std::vector<Rational> doubling_orbit(const Rational& start, int guard = 64);

BoundarySet boundary_set_fast(const Ifs& ifs, int guard = 64);
/// Definition-based construction: pull back every level-k vertex lying in a
/// level-k cell, for all k <= depth.
BoundarySet boundary_set_oracle(const Ifs& ifs, int depth);

struct Cell {
  Word word;
  std::vector<int> vertices;  // sorted ids
};

struct GraphApprox {
  int level = 0;
  std::vector<Point> vertices;
  std::vector<std::pair<int, int>> edges;  // i < j, sorted
  std::vector<Cell> cells;                 // lexicographic word order

  std::optional<int> find(const Point& p) const;
  void build_index();

 private:
  std::unordered_map<Point, int, PointHash> index_;
};

/// Vertex set of level m: ids are stable across levels (V_k is a prefix of
/// V_m for k <= m), with the corners first.
std::vector<Point> level_vertices(const Ifs& ifs, int m);

/// Calls visit(word, exact map) for every word of length m in lexicographic
/// order.
void for_each_word(const Ifs& ifs, int m, const std::function<void(const Word&, const Similarity&)>& visit);

GraphApprox approximation_graph(const Ifs& ifs, int m, int cap = 10);

/// Level-m graph whose cells are located through the boundary set: the cell
/// of w holds F_w(boundary) intersected with V_m. If local is given,
/// (*local)[c][j] is the boundary index mapped onto cells[c].vertices[j].
GraphApprox boundary_cell_graph(const Ifs& ifs, const BoundarySet& boundary, int m,
                                std::vector<std::vector<int>>* local = nullptr);

struct HausdorffEstimate {
  double estimate;
  double bound;  // 2 |lambda1 - lambda2|
};

/// Hausdorff distance between the depth-k vertex clouds {F_w p_i}.
HausdorffEstimate hausdorff_distance(const Ifs& a, const Ifs& b, int depth, int cap = 10);

struct TrackedPair {
  Point p;
  Point q;
  double dist;
};

/// Image of corner i under F_w for two parameters. Throws TrackingError if the
/// exact distance exceeds 2 |lambda1 - lambda2|.
TrackedPair track_point(const Word& w, int i, const Rational& lambda1, const Rational& lambda2);

}  // namespace agres
