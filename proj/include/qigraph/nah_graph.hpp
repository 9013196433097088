#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qigraph/catalog.hpp"
#include "qigraph/report.hpp"

namespace qigraph {

/// An undirected edge stored once, with an explicit direction.  `label` maps
/// the head cusp tangent plane to the tail cusp tangent plane; the reversed
/// edge carries label^{-1}.
struct Edge {
  std::string id;
  std::string head;
  std::string head_cusp;
  std::string tail;
  std::string tail_cusp;
  Matrix2 label;

  bool is_loop() const { return head == tail; }
  bool self_paired() const { return head == tail && head_cusp == tail_cusp; }
};

/// One orientation of a stored edge.  Written "e" or "~e" in files.
struct DirectedEdge {
  std::string edge;
  bool reversed = false;

  DirectedEdge flipped() const { return {edge, !reversed}; }
  std::string str() const { return reversed ? "~" + edge : edge; }
  static DirectedEdge parse(const std::string& s);

  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
  friend auto operator<=>(const DirectedEdge&, const DirectedEdge&) = default;
};

class NahGraph {
public:
  std::shared_ptr<const Catalog> catalog;
  /// Catalog path as written in the source document; empty when inline.
  std::string catalog_ref;
  std::map<std::string, std::string> vertices;  ///< vertex id -> orbifold id
  std::map<std::string, Edge> edges;

  /// Throws UnknownEdge.
  const Edge& edge(const std::string& id) const;
  const std::string& head(const DirectedEdge& d) const;
  const std::string& tail(const DirectedEdge& d) const;
  const std::string& head_cusp(const DirectedEdge& d) const;
  const std::string& tail_cusp(const DirectedEdge& d) const;
  Matrix2 label(const DirectedEdge& d) const;

  const OrbifoldEntry& orbifold_of(const std::string& vertex) const;
  /// Throws UnknownVertex / NotDeclared.
  const CuspSpec& cusp_spec(const std::string& vertex, const std::string& cusp) const;

  /// Directed edges leaving `vertex`; a loop contributes both orientations.
  std::vector<DirectedEdge> out_edges(const std::string& vertex) const;
  /// Directed edge leaving `vertex` at `cusp`, if any (the first in id order).
  std::optional<DirectedEdge> edge_at(const std::string& vertex, const std::string& cusp) const;

  void add_edge(Edge e) { edges[e.id] = std::move(e); }
};

/// out_edges for every vertex at once, in one pass over the edges.
std::map<std::string, std::vector<DirectedEdge>> adjacency(const NahGraph& g);

/// Check of the graph conditions.  Violations carry rule tags "structure",
/// "connected", "cond1" ... "cond6", and "surjective" (unglued cusps, only
/// when `strict`).
Report validate(const NahGraph& g, bool strict = true);

/// Negative determinant of the edge label measured in lattice bases of the
/// two cusps: -det(label) * covol(head lattice) / covol(tail lattice).
/// Equals -det(label) when both lattices are Z^2.  Throws UnknownEdge.
Rational delta(const NahGraph& g, const DirectedEdge& d);

struct BalanceResult {
  bool balanced = false;
  /// m(v) with m(tail e) = delta(e) * m(head e), m = 1 at the least vertex id.
  std::map<std::string, Rational> potential;
  /// When unbalanced: a non-tree edge whose fundamental cycle has product != 1.
  std::optional<DirectedEdge> witness;
};

BalanceResult balanced(const NahGraph& g);

struct IntegralityResult {
  bool integral = false;
  std::vector<std::string> non_integral_edges;
};

IntegralityResult is_integral(const NahGraph& g);

struct Pairing {
  std::string id;
  std::string a;
  std::string a_cusp;
  std::string b;
  std::string b_cusp;
  Matrix2 gluing;  ///< tangent map from (a, a_cusp) to (b, b_cusp)
};

/// Combinatorial recipe for gluing neutered orbifold pieces along cusps.
struct GluingManifest {
  std::shared_ptr<const Catalog> catalog;
  std::string catalog_ref;
  std::map<std::string, std::string> pieces;  ///< piece id -> orbifold id
  std::map<std::string, Pairing> pairings;
};

/// One vertex per piece and one edge per pairing.  Throws UnpairedCusp,
/// NonIntegralGluing, or InvalidGraph when the result fails validation.
NahGraph from_manifest(const GluingManifest& m);
/// Inverse of from_manifest for integral graphs; throws NonIntegralGluing.
GluingManifest to_manifest(const NahGraph& g);

/// Connected components of the underlying graph, vertices in id order.
std::vector<std::vector<std::string>> components(const std::vector<std::string>& vertices,
                                                 const std::vector<std::pair<std::string, std::string>>& links);

}  // namespace qigraph
