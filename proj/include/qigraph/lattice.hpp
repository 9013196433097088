#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qigraph/matrix2.hpp"

namespace qigraph {

/// Full-rank lattice in the rational plane.  The basis is stored in
/// lower-triangular column Hermite form
///
///   [ a 0 ]      a > 0, d > 0, 0 <= c < d,
///   [ c d ]
///
/// so two generating sets of the same lattice produce identical bases and
/// lattice equality is basis equality.
class Lattice2 {
public:
  /// The standard lattice Z^2.
  Lattice2() : basis_(Matrix2::identity()) {}

  /// Lattice spanned by the columns of `m`; throws DegenerateLattice if
  /// the columns are dependent.
  static Lattice2 from_basis(const Matrix2& m);
  static Lattice2 standard() { return Lattice2(); }

  const Matrix2& basis() const { return basis_; }
  Rational covolume() const { return basis_.det(); }

  /// Coordinates of `v` in the stored basis.
  Vec2 coordinates(const Vec2& v) const;
  bool contains(const Vec2& v) const;
  bool contains(const Lattice2& sub) const;

  Lattice2 image(const Matrix2& m) const;
  Lattice2 dual() const;
  Lattice2 scaled(const Rational& s) const { return image(Matrix2::scalar(s)); }

  std::string str() const { return basis_.str(); }

  friend bool operator==(const Lattice2&, const Lattice2&) = default;
  friend std::strong_ordering operator<=>(const Lattice2& a, const Lattice2& b) {
    return a.basis_ <=> b.basis_;
  }

private:
  explicit Lattice2(Matrix2 hermite) : basis_(std::move(hermite)) {}
  friend Lattice2 canonical_lattice(std::span<const Vec2> generators);

  Matrix2 basis_;
};

/// Hermite-form lattice generated by `generators`.  Throws DegenerateLattice
/// unless the generators span the plane.
Lattice2 canonical_lattice(std::span<const Vec2> generators);

Lattice2 lattice_intersect(const Lattice2& a, const Lattice2& b);
Lattice2 lattice_sum(const Lattice2& a, const Lattice2& b);

struct LatticeIndex {
  Rational ratio;   ///< covolume(sub) / covolume(sup)
  bool contained;   ///< sub is a sublattice of sup; then ratio is the group index
};

LatticeIndex lattice_index(const Lattice2& sub, const Lattice2& sup);

/// Finite cyclic rotation group of a cusp tangent plane.
struct CyclicSymmetry {
  int order = 1;
  Matrix2 generator = Matrix2::identity();

  static CyclicSymmetry trivial() { return {}; }
  /// Order 1 or 2 (the only degrees with a coordinate-free generator).
  static CyclicSymmetry of_degree_at_most_two(int degree);
  /// Rotation group of the given order preserving Z^2 (hexagonal frame for
  /// orders 3 and 6).  Throws InvalidTarget for other orders.
  static CyclicSymmetry standard(int degree);

  std::vector<Matrix2> elements() const;
  bool contains(const Matrix2& m) const;

  friend bool operator==(const CyclicSymmetry&, const CyclicSymmetry&) = default;
};

/// Reason `sym` is not a valid cyclic symmetry of `lattice`, if any.
std::optional<std::string> symmetry_defect(const CyclicSymmetry& sym, const Lattice2& lattice);

/// Lexicographically least element of the coset l*F.
Matrix2 coset_canonical(const Matrix2& l, const CyclicSymmetry& f);

/// Whether l * f_src.generator * l^{-1} lies in f_dst.  Throws SingularMatrix
/// when l is not invertible.
bool conjugates_into(const Matrix2& l, const CyclicSymmetry& f_src, const CyclicSymmetry& f_dst);

/// Vector `v` divided by the positive rational content of its coordinates in
/// `lattice`: the primitive lattice vector on the ray through v.
Vec2 primitive_on_ray(const Vec2& v, const Lattice2& lattice);

}  // namespace qigraph
