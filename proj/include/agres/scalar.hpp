#pragma once

#include <gmpxx.h>

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace agres {

using Rational = mpq_class;

/// Parses "p/q", an integer, or a finite decimal literal into an exact
/// rational. Throws Error(ParseError) on anything else.
Rational parse_rational(std::string_view text);

/// "p/q" (or "p" when the denominator is one).
std::string rational_string(const Rational& q);

/// Fixed 17-significant-digit rendering used for every float we emit.
std::string decimal_string(double value);

/// An element a + b*sqrt(3) of the quadratic field Q[sqrt 3].
class Scalar {
 public:
  Scalar() = default;
  Scalar(Rational a) : a_(std::move(a)) { a_.canonicalize(); }  // NOLINT: implicit by design of the field embedding
  Scalar(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {
    a_.canonicalize();
    b_.canonicalize();
  }
  Scalar(long a) : a_(a) {}  // NOLINT

  static Scalar sqrt3() { return Scalar(Rational(0), Rational(1)); }

  const Rational& rational_part() const { return a_; }
  const Rational& sqrt3_part() const { return b_; }

  Scalar operator-() const { return Scalar(Rational(-a_), Rational(-b_)); }
  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);

  friend Scalar operator+(Scalar l, const Scalar& r) { return l += r; }
  friend Scalar operator-(Scalar l, const Scalar& r) { return l -= r; }
  friend Scalar operator*(Scalar l, const Scalar& r) { return l *= r; }
  friend Scalar operator/(Scalar l, const Scalar& r) { return l /= r; }

  friend bool operator==(const Scalar& l, const Scalar& r) { return l.a_ == r.a_ && l.b_ == r.b_; }

  /// Exact sign (-1, 0, 1).
  int sign() const;
  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
  Scalar conjugate() const { return Scalar(a_, Rational(-b_)); }
  /// a^2 - 3 b^2, the field norm.
  Rational norm() const { return Rational(a_ * a_ - 3 * b_ * b_); }

  double to_double() const;
  /// "(a_num/a_den) + (b_num/b_den)*sqrt3"
  std::string exact_string() const;
  std::size_t hash() const noexcept;

 private:
  Rational a_{0};
  Rational b_{0};
};

/// Exact three-way comparison of field elements.
int compare(const Scalar& l, const Scalar& r);

struct Point {
  Scalar x;
  Scalar y;

  friend bool operator==(const Point& l, const Point& r) { return l.x == r.x && l.y == r.y; }
  friend Point operator+(const Point& l, const Point& r) { return {l.x + r.x, l.y + r.y}; }
  friend Point operator-(const Point& l, const Point& r) { return {l.x - r.x, l.y - r.y}; }
  friend Point operator*(const Scalar& k, const Point& p) { return {k * p.x, k * p.y}; }

  std::array<double, 2> to_double() const { return {x.to_double(), y.to_double()}; }
  std::string exact_string() const;
  std::string decimal_string() const;
};

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept {
    return p.x.hash() * 0x9E3779B97F4A7C15ull ^ (p.y.hash() + 0x632BE59BD9B4E019ull);
  }
};

/// Exact squared Euclidean distance.
Scalar squared_distance(const Point& p, const Point& q);
double distance(const Point& p, const Point& q);

/// Orientation of the triple (positive for counterclockwise), exact.
int orientation(const Point& a, const Point& b, const Point& c);

/// A planar similarity z -> alpha * z + beta written over C = R^2, with alpha
/// and beta carrying Q[sqrt 3] components. The linear part is therefore a
/// scalar multiple of a rotation: [[re, -im], [im, re]].
class Similarity {
 public:
  Similarity() : re_(1), im_(0), shift_{Scalar(0), Scalar(0)} {}
  Similarity(Scalar re, Scalar im, Point shift)
      : re_(std::move(re)), im_(std::move(im)), shift_(std::move(shift)) {}

  Point apply(const Point& p) const;
  Point apply_inverse(const Point& p) const;
  /// (*this) o inner
  Similarity compose(const Similarity& inner) const;
  Similarity inverse() const;

  std::array<std::array<Scalar, 2>, 2> linear() const;
  const Scalar& linear_re() const { return re_; }
  const Scalar& linear_im() const { return im_; }
  const Point& translation() const { return shift_; }

  Scalar ratio_squared() const { return re_ * re_ + im_ * im_; }
  double ratio() const;

  friend bool operator==(const Similarity& l, const Similarity& r) {
    return l.re_ == r.re_ && l.im_ == r.im_ && l.shift_ == r.shift_;
  }

 private:
  Scalar re_;
  Scalar im_;
  Point shift_;
};

/// Double-precision shadow of a Similarity, for fast approximate work.
struct SimilarityD {
  double re = 1, im = 0, tx = 0, ty = 0;

  static SimilarityD from(const Similarity& s);
  std::array<double, 2> apply(double x, double y) const {
    return {re * x - im * y + tx, im * x + re * y + ty};
  }
  SimilarityD compose(const SimilarityD& in) const {
    return {re * in.re - im * in.im, re * in.im + im * in.re, re * in.tx - im * in.ty + tx,
            im * in.tx + re * in.ty + ty};
  }
};

}  // namespace agres

template <>
struct std::hash<agres::Point> : agres::PointHash {};
