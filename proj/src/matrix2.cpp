#include "qigraph/matrix2.hpp"

#include "qigraph/error.hpp"

namespace qigraph {

Matrix2 Matrix2::inverse() const {
  const Rational d = det();
  if (d.is_zero()) throw SingularMatrix("matrix " + str() + " is not invertible");
  const Rational s = d.inverse();
  return {s * e_[3], -(s * e_[1]), -(s * e_[2]), s * e_[0]};
}

bool Matrix2::is_integral() const {
  for (const auto& x : e_) {
    if (!x.is_integer()) return false;
  }
  return true;
}

Matrix2 Matrix2::pow(int k) const {
  if (k < 0) return inverse().pow(-k);
  Matrix2 result = identity();
  for (int i = 0; i < k; ++i) result = result * *this;
  return result;
}

Matrix2 operator*(const Matrix2& m, const Matrix2& n) {
  const auto& a = m.e_;
  const auto& b = n.e_;
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

std::string Matrix2::str() const {
  return "[" + e_[0].str() + "," + e_[1].str() + "," + e_[2].str() + "," + e_[3].str() + "]";
}

}  // namespace qigraph
