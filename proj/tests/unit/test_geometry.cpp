#include <algorithm>
#include <random>
#include <set>

#include "agres/errors.hpp"
#include "agres/geometry.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace agres;

namespace {

Scalar q(long a, long b = 1) { return Scalar(Rational(a, b)); }
Scalar q3(long a, long b) { return Scalar(Rational(0), Rational(a, b)); }  // (a/b) sqrt3

std::set<Rational> as_set(const std::vector<Rational>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("added map images at lambda = 1/4") {
  const Ifs ifs = Ifs::make(Rational(1, 4));
  const Similarity& f4 = ifs.map(4);
  CHECK(f4.apply(Ifs::corner(1)) == Point{q(1, 2), q3(1, 4)});
  CHECK(f4.apply(Ifs::corner(2)) == Point{q(3, 8), q3(1, 8)});
  CHECK(f4.apply(Ifs::corner(3)) == Point{q(5, 8), q3(1, 8)});
  CHECK(ifs.added_ratio_squared() == q(1, 16));
  CHECK(ifs.added_ratio() == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("added map is a scalar rotation at lambda = 1/8") {
  const Ifs ifs = Ifs::make(Rational(1, 8));
  const auto a = ifs.map(4).linear();
  CHECK(a[0][0] == a[1][1]);
  CHECK(a[0][1] == -a[1][0]);
  // Orthogonality residual A A^T - rho^2 I vanishes exactly.
  CHECK(a[0][0] * a[1][0] + a[0][1] * a[1][1] == Scalar());
  CHECK(a[0][0] * a[0][0] + a[0][1] * a[0][1] == ifs.added_ratio_squared());
}

TEST_CASE("corner maps and inverses") {
  const Ifs ifs = Ifs::make(Rational(3, 16));
  for (int i = 1; i <= 3; ++i) {
    CHECK(ifs.map(i).apply(Ifs::corner(i)) == Ifs::corner(i));
    CHECK(ifs.ratio(i) == 0.5);
  }
  const Point p{q(1, 3), q3(1, 7)};
  for (int i = 1; i <= 4; ++i) CHECK(ifs.map(i).apply_inverse(ifs.map(i).apply(p)) == p);
}

TEST_CASE("parameter range is enforced") {
  CHECK_THROWS_AS(Ifs::make(Rational(1, 2)), Error);
  CHECK_THROWS_AS(Ifs::make(Rational(0)), Error);
  CHECK_THROWS_AS(Ifs::make(Rational(3, 4)), Error);
  // Non-canonical input is accepted and canonicalized.
  Rational raw;
  raw.get_num() = 8;
  raw.get_den() = 32;
  CHECK(Ifs::make(raw).lambda() == Rational(1, 4));
}

TEST_CASE("word weights") {
  CHECK(Word{}.weight(0.7, 0.3) == 1.0);
  CHECK(Word::parse("(1,4,2,4)").weight(0.7, 0.3) == doctest::Approx(0.7 * 0.7 * 0.3 * 0.3));
  CHECK(Word::parse("4").str() == "(4)");
  CHECK(Word::parse("()").empty());
}

TEST_CASE("attractor membership examples") {
  for (const Rational& l : {Rational(1, 4), Rational(1, 8), Rational(3, 8), Rational(1, 7), Rational(5, 16)}) {
    const Ifs ifs = Ifs::make(l);
    CHECK(point_in_attractor(ifs, Point{Scalar(Rational(2 * l)), q(0)}));
  }
  const Ifs ifs = Ifs::make(Rational(1, 4));
  CHECK(point_in_attractor(ifs, ifs.map(4).apply(Ifs::corner(1))));
  // The centroid is the fixed point of F_4 at every lambda, hence a member.
  CHECK(point_in_attractor(ifs, Ifs::centroid()));
  // Just above the bottom edge at x = 1/2 lies in the hole below F_4.
  const Point hole{q(1, 2), q3(1, 40)};
  CHECK_FALSE(point_in_attractor(ifs, hole));
  CHECK_FALSE(oracle::covered(ifs, hole, 10));
}

TEST_CASE("membership agrees with the brute-force cover on random points") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> num(0, 64);
  for (const Rational& l : {Rational(1, 4), Rational(3, 8)}) {
    const Ifs ifs = Ifs::make(l);
    int members = 0, rejected = 0;
    for (int k = 0; k < 300; ++k) {
      const Point p{q(num(rng), 64), q3(num(rng), 128)};
      if (!in_triangle(p)) continue;
      const bool in = point_in_attractor(ifs, p);
      // Membership implies being covered at every finite depth.
      if (in) {
        ++members;
        CHECK(oracle::covered(ifs, p, 8));
      } else if (!oracle::covered(ifs, p, 8)) {
        ++rejected;
      }
    }
    CHECK(rejected > 0);
    // Every vertex of a finite approximation is a member.
    for (const Point& v : level_vertices(ifs, 3)) CHECK(point_in_attractor(ifs, v));
  }
}

TEST_CASE("boundary set examples") {
  const auto b4 = boundary_set_fast(Ifs::make(Rational(1, 4)));
  CHECK(b4.size() == 6);
  CHECK(as_set(b4.params) == std::set<Rational>{Rational(1, 2)});

  const auto b7 = boundary_set_fast(Ifs::make(Rational(1, 7)));
  CHECK(b7.size() == 12);
  CHECK(as_set(b7.params) == std::set<Rational>{Rational(1, 7), Rational(2, 7), Rational(4, 7)});

  const auto b8 = boundary_set_fast(Ifs::make(Rational(1, 8)));
  CHECK(b8.size() == 9);
  CHECK(as_set(b8.params) == std::set<Rational>{Rational(1, 4), Rational(1, 2)});

  CHECK(doubling_orbit(Rational(2, 7)).size() == 3);
}

TEST_CASE("fast boundary set equals the definition-based construction") {
  for (const Rational& l : {Rational(1, 4), Rational(1, 8), Rational(1, 7), Rational(3, 16), Rational(1, 16),
                            Rational(5, 16), Rational(3, 8)}) {
    const Ifs ifs = Ifs::make(l);
    const BoundarySet fast = boundary_set_fast(ifs);
    const BoundarySet slow = boundary_set_oracle(ifs, 5);
    CAPTURE(l.get_str());
    REQUIRE(fast.size() == slow.size());
    for (const Point& p : slow.points) CHECK(fast.find(p).has_value());
    // Corners come first.
    for (int i = 0; i < 3; ++i) CHECK(fast.points[i] == Ifs::corner(i + 1));
  }
}

TEST_CASE("boundary set rotation is a permutation of order three") {
  const BoundarySet b = boundary_set_fast(Ifs::make(Rational(1, 7)));
  const Ifs ifs = Ifs::make(Rational(1, 7));
  for (std::size_t k = 0; k < b.size(); ++k) {
    const int j = b.rotation[k];
    CHECK(b.points[j] == ifs.rotation(1).apply(b.points[k]));
    CHECK(b.rotation[b.rotation[j]] == static_cast<int>(k));
  }
  std::size_t covered = 0;
  for (const auto& orbit : b.orbits()) covered += orbit.size();
  CHECK(covered == b.size());
}

TEST_CASE("approximation graph counts") {
  for (const Rational& l : {Rational(1, 4), Rational(1, 7)}) {
    const GraphApprox g0 = approximation_graph(Ifs::make(l), 0);
    CHECK(g0.vertices.size() == 3);
    CHECK(g0.edges.size() == 3);
  }
  const Ifs ifs = Ifs::make(Rational(1, 4));
  const GraphApprox g1 = approximation_graph(ifs, 1);
  CHECK(g1.vertices.size() == 9);
  CHECK(g1.edges.size() == 21);
  CHECK(g1.cells.size() == 4);

  // Level 2: the raw images deduplicated by quadratic exact comparison.
  std::vector<Point> raw;
  for_each_word(ifs, 2, [&](const Word&, const Similarity& f) {
    for (const Point& c : Ifs::corners()) raw.push_back(f.apply(c));
  });
  CHECK(approximation_graph(ifs, 2).vertices.size() == oracle::distinct_count(raw));
  CHECK_THROWS_AS(approximation_graph(ifs, 11), Error);
}

TEST_CASE("vertex and edge sets are rotation invariant") {
  for (const Rational& l : {Rational(1, 4), Rational(3, 8), Rational(1, 7)}) {
    const Ifs ifs = Ifs::make(l);
    for (int m = 1; m <= 3; ++m) {
      const GraphApprox g = approximation_graph(ifs, m);
      std::set<std::pair<int, int>> edges(g.edges.begin(), g.edges.end());
      std::vector<int> image(g.vertices.size());
      for (std::size_t k = 0; k < g.vertices.size(); ++k) {
        const auto id = g.find(ifs.rotation(1).apply(g.vertices[k]));
        REQUIRE(id.has_value());
        image[k] = *id;
      }
      for (const auto& [a, b] : g.edges)
        CHECK(edges.count({std::min(image[a], image[b]), std::max(image[a], image[b])}) == 1);
    }
  }
}

TEST_CASE("vertex sets are nested with stable ids") {
  const Ifs ifs = Ifs::make(Rational(5, 16));
  std::vector<Point> prev = level_vertices(ifs, 0);
  for (int m = 1; m <= 4; ++m) {
    const std::vector<Point> cur = level_vertices(ifs, m);
    REQUIRE(cur.size() > prev.size());
    CHECK(std::equal(prev.begin(), prev.end(), cur.begin()));
    prev = cur;
  }
}

TEST_CASE("boundary-located cells match the direct graph") {
  const Ifs ifs = Ifs::make(Rational(3, 16));
  const BoundarySet b = boundary_set_fast(ifs);
  for (int m = 0; m <= 3; ++m) {
    const GraphApprox direct = approximation_graph(ifs, m);
    const GraphApprox located = boundary_cell_graph(ifs, b, m);
    CHECK(direct.vertices == located.vertices);
    // Each cell keeps at least its three corners.
    for (const Cell& c : located.cells) CHECK(c.vertices.size() >= 3);
  }
}

TEST_CASE("hausdorff distance examples") {
  const Ifs a = Ifs::make(Rational(1, 4));
  CHECK(hausdorff_distance(a, a, 6).estimate == 0.0);
  const auto e1 = hausdorff_distance(a, Ifs::make(Rational(5, 16)), 7);
  CHECK(e1.bound == doctest::Approx(0.125));
  CHECK(e1.estimate <= 0.125 + 2.0 / 128);
  const auto e2 = hausdorff_distance(a, Ifs::make(Rational(1, 4) + Rational(1, 64)), 8);
  CHECK(e2.estimate <= 1.0 / 32 + 1.0 / 128);
}

TEST_CASE("tracked corner images") {
  CHECK(track_point(Word{}, 2, Rational(1, 8), Rational(3, 8)).dist == 0.0);
  const auto t = track_point(Word::parse("4"), 1, Rational(1, 4), Rational(3, 8));
  CHECK(t.dist == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(t.q.y == t.p.y);
  CHECK(track_point(Word::parse("1,4"), 1, Rational(1, 4), Rational(5, 16)).dist <= 0.125);
}

TEST_CASE("tracked distance bound on random words up to length 8") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> letter(1, 4), len(0, 8), corner(1, 3), num(1, 63);
  for (int k = 0; k < 300; ++k) {
    Word w;
    for (int j = len(rng); j > 0; --j) w.letters.push_back(letter(rng));
    const Rational l1(num(rng), 128), l2(num(rng), 128);
    const auto t = track_point(w, corner(rng), l1, l2);
    const Rational gap(l1 - l2);
    CHECK(compare(squared_distance(t.p, t.q), Scalar(Rational(4 * gap * gap))) <= 0);
  }
}
