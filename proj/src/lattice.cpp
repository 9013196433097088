#include "qigraph/lattice.hpp"

#include <algorithm>

#include "qigraph/error.hpp"

namespace qigraph {

namespace {

struct IntVec {
  mpz_class x;
  mpz_class y;
};

mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

mpz_class mod_nonneg(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

// Content of a list of rationals: gcd of numerators over lcm of denominators.
Rational rational_content(std::initializer_list<Rational> xs) {
  mpz_class g = 0;
  mpz_class l = 1;
  for (const auto& x : xs) {
    g = gcd(g, x.num());
    l = lcm(l, x.den());
  }
  return Rational(g, l);
}

}  // namespace

Lattice2 canonical_lattice(std::span<const Vec2> generators) {
  if (generators.size() < 2) throw DegenerateLattice("need at least two generators");
  mpz_class scale = 1;
  for (const auto& v : generators) scale = lcm(scale, lcm(v.x.den(), v.y.den()));

  std::vector<IntVec> vs;
  vs.reserve(generators.size());
  for (const auto& v : generators) {
    vs.push_back({(v.x * Rational(scale)).num(), (v.y * Rational(scale)).num()});
  }

  // Euclid on the x-coordinates until a single vector with nonzero x remains.
  while (true) {
    std::size_t pivot = vs.size();
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (vs[i].x == 0) continue;
      if (pivot == vs.size() || abs(vs[i].x) < abs(vs[pivot].x)) pivot = i;
    }
    if (pivot == vs.size()) throw DegenerateLattice("generators lie on a line");
    bool reduced = false;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (i == pivot || vs[i].x == 0) continue;
      const mpz_class q = floor_div(vs[i].x, vs[pivot].x);
      vs[i].x -= q * vs[pivot].x;
      vs[i].y -= q * vs[pivot].y;
      reduced = true;
    }
    if (!reduced) {
      std::swap(vs[0], vs[pivot]);
      break;
    }
  }
  if (vs[0].x < 0) {
    vs[0].x = -vs[0].x;
    vs[0].y = -vs[0].y;
  }
  mpz_class d = 0;
  for (std::size_t i = 1; i < vs.size(); ++i) d = gcd(d, vs[i].y);
  if (d == 0) throw DegenerateLattice("generators lie on a line");
  const mpz_class c = mod_nonneg(vs[0].y, d);

  const Rational inv(mpz_class(1), scale);
  return Lattice2(Matrix2(Rational(vs[0].x) * inv, 0, Rational(c) * inv, Rational(d) * inv));
}

Lattice2 Lattice2::from_basis(const Matrix2& m) {
  const Vec2 cols[2] = {m.column(0), m.column(1)};
  return canonical_lattice(cols);
}

Vec2 Lattice2::coordinates(const Vec2& v) const { return basis_.inverse() * v; }

bool Lattice2::contains(const Vec2& v) const {
  const Vec2 c = coordinates(v);
  return c.x.is_integer() && c.y.is_integer();
}

bool Lattice2::contains(const Lattice2& sub) const {
  return (basis_.inverse() * sub.basis_).is_integral();
}

Lattice2 Lattice2::image(const Matrix2& m) const { return from_basis(m * basis_); }

Lattice2 Lattice2::dual() const { return from_basis(basis_.inverse().transpose()); }

Lattice2 lattice_sum(const Lattice2& a, const Lattice2& b) {
  const Vec2 gens[4] = {a.basis().column(0), a.basis().column(1), b.basis().column(0),
                        b.basis().column(1)};
  return canonical_lattice(gens);
}

// The intersection is dual to the sum of the duals.
Lattice2 lattice_intersect(const Lattice2& a, const Lattice2& b) {
  return lattice_sum(a.dual(), b.dual()).dual();
}

LatticeIndex lattice_index(const Lattice2& sub, const Lattice2& sup) {
  return {sub.covolume() / sup.covolume(), sup.contains(sub)};
}

CyclicSymmetry CyclicSymmetry::of_degree_at_most_two(int degree) {
  if (degree == 1) return {};
  if (degree == 2) return {2, Matrix2::scalar(-1)};
  throw InvalidTarget("degree " + std::to_string(degree) + " needs an explicit generator");
}

CyclicSymmetry CyclicSymmetry::standard(int degree) {
  switch (degree) {
    case 1: return {};
    case 2: return {2, Matrix2::scalar(-1)};
    case 3: return {3, Matrix2(0, -1, 1, -1)};
    case 4: return {4, Matrix2(0, -1, 1, 0)};
    case 6: return {6, Matrix2(1, -1, 1, 0)};
    default: throw InvalidTarget("no rotation of order " + std::to_string(degree));
  }
}

std::vector<Matrix2> CyclicSymmetry::elements() const {
  std::vector<Matrix2> out;
  Matrix2 g = Matrix2::identity();
  for (int k = 0; k < order; ++k) {
    out.push_back(g);
    g = g * generator;
  }
  return out;
}

bool CyclicSymmetry::contains(const Matrix2& m) const {
  const auto els = elements();
  return std::find(els.begin(), els.end(), m) != els.end();
}

std::optional<std::string> symmetry_defect(const CyclicSymmetry& sym, const Lattice2& lattice) {
  switch (sym.order) {
    case 1: case 2: case 3: case 4: case 6: break;
    default: return "order " + std::to_string(sym.order) + " not in {1,2,3,4,6}";
  }
  if (sym.generator.det() != Rational(1)) return "generator determinant is not 1";
  Matrix2 g = Matrix2::identity();
  for (int k = 1; k <= sym.order; ++k) {
    g = g * sym.generator;
    if (g.is_identity() && k < sym.order) return "generator has order " + std::to_string(k);
  }
  if (!g.is_identity()) return "generator^order is not the identity";
  // Trace pins the rotation angle 2*pi/order.
  static const int traces[] = {0, 2, -2, -1, 0, 0, 1};
  if (sym.generator.trace() != Rational(traces[sym.order]))
    return "generator trace does not match a rotation of order " + std::to_string(sym.order);
  if (lattice.image(sym.generator) != lattice) return "generator does not preserve the lattice";
  return std::nullopt;
}

Matrix2 coset_canonical(const Matrix2& l, const CyclicSymmetry& f) {
  Matrix2 best = l;
  Matrix2 cur = l;
  for (int k = 1; k < f.order; ++k) {
    cur = cur * f.generator;
    if (cur < best) best = cur;
  }
  return best;
}

bool conjugates_into(const Matrix2& l, const CyclicSymmetry& f_src, const CyclicSymmetry& f_dst) {
  const Matrix2 conj = l * f_src.generator * l.inverse();
  return f_dst.contains(conj);
}

Vec2 primitive_on_ray(const Vec2& v, const Lattice2& lattice) {
  const Vec2 c = lattice.coordinates(v);
  const Rational content = rational_content({c.x, c.y});
  return content.inverse() * v;
}

}  // namespace qigraph
