#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qigraph/lattice.hpp"
#include "qigraph/report.hpp"

namespace qigraph {

/// A cusp of a declared orbifold: its orbifold degree, the maximal lattice in
/// its tangent plane, and the rotation group by which the toral cover wraps it.
struct CuspSpec {
  std::string id;
  int degree = 1;
  Lattice2 lattice;
  CyclicSymmetry symmetry;
};

/// Declared quotient to the minimal orbifold for one assignment of target
/// degrees (one per cusp).
struct QuotientDecl {
  std::map<std::string, int> targets;
  std::string covering;
};

struct OrbifoldEntry {
  std::string id;
  bool arithmetic = false;
  bool is_minimal = false;
  std::vector<CuspSpec> cusps;
  std::vector<QuotientDecl> minimal_quotients;

  /// nullptr when absent.
  const CuspSpec* cusp(const std::string& cusp_id) const;
  std::map<std::string, int> own_degrees() const;
};

/// Tangent identification of one source cusp with the target cusp it covers.
struct CuspAssignment {
  std::string source_cusp;
  std::string target_cusp;
  Matrix2 psi;
};

struct CoveringEntry {
  std::string id;
  std::string source;
  std::string target;
  long total_degree = 1;
  std::vector<CuspAssignment> cusps;

  const CuspAssignment* for_source(const std::string& cusp_id) const;
};

/// Degree of the cover of cusp orbifolds given by psi:
/// [target lattice : psi(source lattice)] * f_target / f_source.
Rational cusp_cover_degree(const Matrix2& psi, const CuspSpec& source, const CuspSpec& target);

/// Declared orbifolds and coverings.  Identity coverings ("id(X)") and
/// composites ("a;b", apply a then b) are resolved on demand and never stored.
class Catalog {
public:
  std::map<std::string, OrbifoldEntry> orbifolds;
  std::map<std::string, CoveringEntry> coverings;
  /// Free-form remark carried through serialization (empty when absent).
  std::string note;

  /// Throws NotDeclared.
  const OrbifoldEntry& orbifold(const std::string& id) const;
  bool has_orbifold(const std::string& id) const { return orbifolds.count(id) != 0; }
  /// Resolves declared, identity, and composite ids.  Throws NotDeclared.
  CoveringEntry covering(const std::string& id) const;

  /// Adds every entry of `fragment`; ids already present are overwritten.
  void merge(const Catalog& fragment);
};

std::string identity_covering_id(const std::string& orbifold_id);
CoveringEntry identity_covering(const OrbifoldEntry& orbifold);

Report validate_covering(const Catalog& cat, const CoveringEntry& cov);
Report validate_catalog(const Catalog& cat);

/// Throws MismatchedEnds unless first.target == second.source.
CoveringEntry compose_coverings(const CoveringEntry& first, const CoveringEntry& second);

/// Covering from `orbifold_id` to its minimal orbifold for the given target
/// degrees.  Throws InvalidTarget or NotDeclared.
CoveringEntry minimal_quotient_of(const Catalog& cat, const std::string& orbifold_id,
                                  const std::map<std::string, int>& targets);

}  // namespace qigraph
