#include "agres/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "agres/errors.hpp"

namespace agres {

namespace {

const Rational kHalf(1, 2);

std::array<Point, 3> make_corners() {
  return {Point{Scalar(kHalf), Scalar(Rational(0), kHalf)}, Point{Scalar(0), Scalar(0)},
          Point{Scalar(1), Scalar(0)}};
}

}  // namespace

double Word::weight(double r, double s) const {
  double w = 1.0;
  for (int l : letters) w *= (l == 4 ? s : r);
  return w;
}

Word Word::then(int letter) const {
  Word w = *this;
  w.letters.push_back(letter);
  return w;
}

Word Word::parse(std::string_view text) {
  Word w;
  std::string s;
  for (char c : text)
    if (c != '(' && c != ')' && c != ' ') s.push_back(c);
  if (s.empty()) return w;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.size() != 1 || tok[0] < '1' || tok[0] > '4')
      throw Error(ErrorKind::ParseError, "word letters must be 1..4, got '" + std::string(text) + "'");
    w.letters.push_back(tok[0] - '0');
  }
  return w;
}

std::string Word::str() const {
  std::string out = "(";
  for (std::size_t k = 0; k < letters.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(letters[k]);
  }
  return out + ")";
}

const std::array<Point, 3>& Ifs::corners() {
  static const std::array<Point, 3> c = make_corners();
  return c;
}

const Point& Ifs::corner(int i) { return corners().at(i - 1); }

const Point& Ifs::centroid() {
  static const Point c{Scalar(kHalf), Scalar(Rational(0), Rational(1, 6))};
  return c;
}

Ifs Ifs::make(const Rational& lambda_in) {
  Rational lambda = lambda_in;
  lambda.canonicalize();
  if (!(lambda > 0 && lambda < kHalf))
    throw Error(ErrorKind::DomainError, "lambda must lie in (0,1/2), got " + rational_string(lambda));
  Ifs ifs;
  ifs.lambda_ = lambda;
  for (int i = 0; i < 3; ++i) {
    const Point& p = corners()[i];
    ifs.maps_[i] = Similarity(Scalar(kHalf), Scalar(0), Point{Scalar(kHalf) * p.x, Scalar(kHalf) * p.y});
  }
  // Multiplication by 1/4 + i sqrt3 (1/4 - lambda), translated so that p2 goes
  // to (1/2 - lambda/2, sqrt3 lambda / 2).
  const Scalar re(Rational(1, 4));
  const Scalar im(Rational(0), Rational(Rational(1, 4) - lambda));
  ifs.maps_[3] = Similarity(re, im, Point{Scalar(Rational(kHalf - lambda / 2)), Scalar(Rational(0), Rational(lambda / 2))});
  for (int i = 0; i < 4; ++i) ifs.maps_d_[i] = SimilarityD::from(ifs.maps_[i]);

  const Scalar cre(Rational(-1, 2)), cim(Rational(0), kHalf);
  const Point& c = centroid();
  const Similarity lin(cre, cim, Point{Scalar(0), Scalar(0)});
  const Point ac = lin.apply(c);
  ifs.rotations_[0] = Similarity(cre, cim, c - ac);
  ifs.rotations_[1] = ifs.rotations_[0].compose(ifs.rotations_[0]);
  return ifs;
}

Similarity Ifs::word_map(const Word& w) const {
  Similarity s;
  for (int l : w.letters) s = s.compose(map(l));
  return s;
}

bool in_triangle(const Point& p) {
  const auto& c = Ifs::corners();
  return orientation(c[1], c[2], p) >= 0 && orientation(c[2], c[0], p) >= 0 && orientation(c[0], c[1], p) >= 0;
}

bool on_triangle_boundary(const Point& p) {
  const auto& c = Ifs::corners();
  const int a = orientation(c[1], c[2], p), b = orientation(c[2], c[0], p), d = orientation(c[0], c[1], p);
  return a >= 0 && b >= 0 && d >= 0 && (a == 0 || b == 0 || d == 0);
}

bool AttractorMembership::contains(const Point& p) {
  std::vector<Point> path;
  int budget = cap_;
  return descend(p, path, budget);
}

bool AttractorMembership::descend(const Point& p, std::vector<Point>& path, int& budget) {
  if (auto it = memo_.find(p); it != memo_.end()) return it->second;
  if (std::find(path.begin(), path.end(), p) != path.end()) return true;
  if (!in_triangle(p)) return memo_[p] = false;
  if (on_triangle_boundary(p)) return memo_[p] = true;
  if (--budget < 0)
    throw Error(ErrorKind::DepthExceeded, "membership descent exceeded " + std::to_string(cap_) + " pullbacks");
  path.push_back(p);
  bool found = false;
  for (int i = 1; i <= 4 && !found; ++i) {
    const Point q = ifs_->map(i).apply_inverse(p);
    if (in_triangle(q)) found = descend(q, path, budget);
  }
  path.pop_back();
  return memo_[p] = found;
}

bool point_in_attractor(const Ifs& ifs, const Point& p, int cap) {
  AttractorMembership m(ifs, cap);
  return m.contains(p);
}

const char* to_string(Edge e) {
  switch (e) {
    case Edge::Bottom: return "bottom";
    case Edge::Right: return "right";
    case Edge::Left: return "left";
  }
  return "?";
}

Point edge_point(Edge e, const Rational& t) {
  const auto& c = Ifs::corners();
  const Point *from = nullptr, *to = nullptr;
  switch (e) {
    case Edge::Bottom: from = &c[1]; to = &c[2]; break;
    case Edge::Right: from = &c[2]; to = &c[0]; break;
    case Edge::Left: from = &c[0]; to = &c[1]; break;
  }
  return *from + Scalar(t) * (*to - *from);
}

HausdorffEstimate hausdorff_distance(const Ifs& a, const Ifs& b, int depth, int cap) {
  if (depth < 0 || depth > cap)
    throw Error(ErrorKind::CapExceeded, "hausdorff depth " + std::to_string(depth) + " outside [0," + std::to_string(cap) + "]");
  const auto cloud = [depth](const Ifs& ifs) {
    std::vector<std::array<double, 2>> pts;
    std::vector<std::array<double, 2>> corners;
    for (const auto& c : Ifs::corners()) corners.push_back(c.to_double());
    std::function<void(const SimilarityD&, int)> rec = [&](const SimilarityD& s, int k) {
      if (k == depth) {
        for (const auto& c : corners) pts.push_back(s.apply(c[0], c[1]));
        return;
      }
      for (int i = 1; i <= 4; ++i) rec(s.compose(ifs.map_d(i)), k + 1);
    };
    rec(SimilarityD{}, 0);
    return pts;
  };
  const auto pa = cloud(a), pb = cloud(b);

  // Directed distance sup_{x in from} inf_{y in to} |x - y| via a uniform grid.
  const auto directed = [depth](const std::vector<std::array<double, 2>>& from,
                                const std::vector<std::array<double, 2>>& to) {
    const int n = std::max(1, 1 << std::min(depth, 9));
    const double h = 1.0 / n;
    std::vector<std::vector<int>> grid(static_cast<std::size_t>(n) * n);
    const auto cell = [&](double v) { return std::clamp(static_cast<int>(std::floor(v / h)), 0, n - 1); };
    for (std::size_t k = 0; k < to.size(); ++k) grid[cell(to[k][1]) * n + cell(to[k][0])].push_back(static_cast<int>(k));
    double worst = 0.0;
    for (const auto& x : from) {
      const int cx = cell(x[0]), cy = cell(x[1]);
      double best = std::numeric_limits<double>::infinity();
      for (int ring = 0; ring <= n; ++ring) {
        for (int gy = cy - ring; gy <= cy + ring; ++gy) {
          for (int gx = cx - ring; gx <= cx + ring; ++gx) {
            if (gx < 0 || gy < 0 || gx >= n || gy >= n) continue;
            if (std::max(std::abs(gx - cx), std::abs(gy - cy)) != ring) continue;
            for (int k : grid[gy * n + gx]) best = std::min(best, std::hypot(x[0] - to[k][0], x[1] - to[k][1]));
          }
        }
        // Points outside the searched square are at least ring * h away.
        if (best <= ring * h) break;
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  const double est = std::max(directed(pa, pb), directed(pb, pa));
  const Rational diff = abs(a.lambda() - b.lambda());
  return {est, 2.0 * diff.get_d()};
}

TrackedPair track_point(const Word& w, int i, const Rational& lambda1, const Rational& lambda2) {
  if (i < 1 || i > 3) throw Error(ErrorKind::DomainError, "corner index must be 1..3");
  const Ifs a = Ifs::make(lambda1), b = Ifs::make(lambda2);
  TrackedPair out{a.word_map(w).apply(Ifs::corner(i)), b.word_map(w).apply(Ifs::corner(i)), 0.0};
  out.dist = distance(out.p, out.q);
  const Rational diff = lambda1 - lambda2;
  if (compare(squared_distance(out.p, out.q), Scalar(Rational(4 * diff * diff))) > 0)
    throw Error(ErrorKind::TrackingError, "tracked point moved farther than 2|lambda1-lambda2| for word " + w.str());
  return out;
}

}  // namespace agres
