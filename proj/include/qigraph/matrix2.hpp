#pragma once

#include <array>
#include <compare>
#include <string>

#include "qigraph/rational.hpp"

namespace qigraph {

struct Vec2 {
  Rational x;
  Rational y;

  bool is_zero() const { return x.is_zero() && y.is_zero(); }
  Vec2 operator-() const { return {-x, -y}; }
  friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(const Rational& s, const Vec2& v) { return {s * v.x, s * v.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
  friend auto operator<=>(const Vec2&, const Vec2&) = default;
};

/// Exact 2x2 rational matrix, entries in row-major order
///   [ a b ]
///   [ c d ].
/// Columns are images of the standard basis vectors.
class Matrix2 {
public:
  Matrix2() = default;
  Matrix2(Rational a, Rational b, Rational c, Rational d)
      : e_{std::move(a), std::move(b), std::move(c), std::move(d)} {}

  static Matrix2 identity() { return {1, 0, 0, 1}; }
  static Matrix2 scalar(const Rational& s) { return {s, 0, 0, s}; }
  /// Matrix whose columns are the given vectors.
  static Matrix2 from_columns(const Vec2& c0, const Vec2& c1) { return {c0.x, c1.x, c0.y, c1.y}; }

  const Rational& operator()(int row, int col) const { return e_[row * 2 + col]; }
  Rational& operator()(int row, int col) { return e_[row * 2 + col]; }
  const std::array<Rational, 4>& entries() const { return e_; }

  Vec2 column(int c) const { return {(*this)(0, c), (*this)(1, c)}; }

  Rational det() const { return e_[0] * e_[3] - e_[1] * e_[2]; }
  Rational trace() const { return e_[0] + e_[3]; }
  bool invertible() const { return !det().is_zero(); }
  /// Throws SingularMatrix when det = 0.
  Matrix2 inverse() const;
  Matrix2 transpose() const { return {e_[0], e_[2], e_[1], e_[3]}; }
  bool is_integral() const;
  bool is_identity() const { return *this == identity(); }

  Matrix2 pow(int k) const;

  friend Matrix2 operator*(const Matrix2& m, const Matrix2& n);
  friend Vec2 operator*(const Matrix2& m, const Vec2& v) {
    return {m.e_[0] * v.x + m.e_[1] * v.y, m.e_[2] * v.x + m.e_[3] * v.y};
  }
  friend Matrix2 operator*(const Rational& s, const Matrix2& m) {
    return {s * m.e_[0], s * m.e_[1], s * m.e_[2], s * m.e_[3]};
  }
  Matrix2 operator-() const { return Rational(-1) * *this; }

  friend bool operator==(const Matrix2&, const Matrix2&) = default;
  /// Lexicographic over the row-major entries.
  friend std::strong_ordering operator<=>(const Matrix2& m, const Matrix2& n) {
    for (int i = 0; i < 4; ++i) {
      if (auto c = m.e_[i] <=> n.e_[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

  /// "[a,b,c,d]" with canonical rational spellings; used in signatures.
  std::string str() const;

private:
  std::array<Rational, 4> e_{Rational(0), Rational(0), Rational(0), Rational(0)};
};

}  // namespace qigraph
