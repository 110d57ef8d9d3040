#include "agres/scalar.hpp"

#include <cmath>
#include <cstdio>
#include <regex>

#include "agres/errors.hpp"

namespace agres {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2));
}

std::size_t hash_integer(const mpz_class& z) {
  std::size_t h = static_cast<std::size_t>(mpz_size(z.get_mpz_t()));
  h = mix(h, static_cast<std::size_t>(sgn(z) + 1));
  if (mpz_size(z.get_mpz_t()) > 0) h = mix(h, static_cast<std::size_t>(mpz_getlimbn(z.get_mpz_t(), 0)));
  return h;
}

std::size_t hash_rational(const Rational& q) {
  return mix(hash_integer(q.get_num()), hash_integer(q.get_den()));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  static const std::regex fraction(R"(\s*([+-]?\d+)\s*/\s*(\d+)\s*)");
  static const std::regex decimal(R"(\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*)");
  const std::string s(text);
  std::smatch m;
  if (std::regex_match(s, m, fraction)) {
    // Base 10 explicitly: the default base 0 reads a leading zero as octal.
    std::string num_text = m[1].str();
    if (num_text[0] == '+') num_text.erase(0, 1);
    mpz_class num(num_text, 10), den(m[2].str(), 10);
    if (den == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + s + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  if (std::regex_match(s, m, decimal) && (m[2].length() > 0 || m[3].length() > 0)) {
    const std::string whole = m[2].str(), frac = m[3].str();
    mpz_class digits(whole + frac == "" ? "0" : whole + frac, 10);
    long exponent = -static_cast<long>(frac.size());
    if (m[4].matched) {
      try {
        exponent += std::stol(m[4].str());
      } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, "exponent out of range in '" + s + "'");
      }
    }
    if (exponent > 4096 || exponent < -4096) throw Error(ErrorKind::ParseError, "exponent out of range in '" + s + "'");
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    Rational q = exponent < 0 ? Rational(digits, scale) : Rational(digits * scale);
    q.canonicalize();
    if (m[1].str() == "-") q = -q;
    return q;
  }
  throw Error(ErrorKind::ParseError, "not a rational literal: '" + s + "'");
}

std::string rational_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string decimal_string(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

Scalar& Scalar::operator+=(const Scalar& o) {
  a_ += o.a_;
  b_ += o.b_;
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  a_ -= o.a_;
  b_ -= o.b_;
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  Rational a = a_ * o.a_ + 3 * b_ * o.b_;
  Rational b = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(a);
  b_ = std::move(b);
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
  const Rational n = o.norm();
  if (sgn(n) == 0) throw Error(ErrorKind::DomainError, "division by zero in Q[sqrt3]");
  *this *= o.conjugate();
  a_ /= n;
  b_ /= n;
  return *this;
}

int Scalar::sign() const {
  const int sa = sgn(a_), sb = sgn(b_);
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // Opposite signs: the larger magnitude wins. a^2 == 3 b^2 is impossible.
  return cmp(a_ * a_, 3 * b_ * b_) > 0 ? sa : sb;
}

double Scalar::to_double() const { return a_.get_d() + b_.get_d() * std::sqrt(3.0); }

std::string Scalar::exact_string() const {
  const auto part = [](const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
  };
  return "(" + part(a_) + ") + (" + part(b_) + ")*sqrt3";
}

std::size_t Scalar::hash() const noexcept { return mix(hash_rational(a_), hash_rational(b_)); }

int compare(const Scalar& l, const Scalar& r) { return (l - r).sign(); }

std::string Point::exact_string() const { return "[" + x.exact_string() + ", " + y.exact_string() + "]"; }

std::string Point::decimal_string() const {
  return "(" + agres::decimal_string(x.to_double()) + ", " + agres::decimal_string(y.to_double()) + ")";
}

Scalar squared_distance(const Point& p, const Point& q) {
  const Scalar dx = p.x - q.x, dy = p.y - q.y;
  return dx * dx + dy * dy;
}

double distance(const Point& p, const Point& q) {
  const auto a = p.to_double(), b = q.to_double();
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

int orientation(const Point& a, const Point& b, const Point& c) {
  return ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).sign();
}

Point Similarity::apply(const Point& p) const {
  return {re_ * p.x - im_ * p.y + shift_.x, im_ * p.x + re_ * p.y + shift_.y};
}

Point Similarity::apply_inverse(const Point& p) const {
  const Scalar n = ratio_squared();
  const Scalar dx = p.x - shift_.x, dy = p.y - shift_.y;
  return {(re_ * dx + im_ * dy) / n, (re_ * dy - im_ * dx) / n};
}

Similarity Similarity::compose(const Similarity& in) const {
  return Similarity(re_ * in.re_ - im_ * in.im_, re_ * in.im_ + im_ * in.re_, apply(in.shift_));
}

Similarity Similarity::inverse() const {
  const Scalar n = ratio_squared();
  const Scalar re = re_ / n, im = -im_ / n;
  const Similarity lin(re, im, Point{Scalar(0), Scalar(0)});
  const Point t = lin.apply(shift_);
  return Similarity(re, im, Point{-t.x, -t.y});
}

std::array<std::array<Scalar, 2>, 2> Similarity::linear() const {
  return {{{re_, -im_}, {im_, re_}}};
}

double Similarity::ratio() const { return std::sqrt(ratio_squared().to_double()); }

SimilarityD SimilarityD::from(const Similarity& s) {
  return {s.linear_re().to_double(), s.linear_im().to_double(), s.translation().x.to_double(),
          s.translation().y.to_double()};
}

}  // namespace agres
