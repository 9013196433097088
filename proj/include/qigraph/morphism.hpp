#pragma once

#include <map>
#include <string>
#include <vector>

#include "qigraph/nah_graph.hpp"

namespace qigraph {

/// Graph homomorphism plus one catalog covering per source vertex.  Edges
/// are keyed by the stored direction of the source edge; the image of the
/// reversed edge is the flipped image.
struct GraphMorphism {
  std::map<std::string, std::string> vertex_map;
  std::map<std::string, DirectedEdge> edge_map;
  std::map<std::string, std::string> vertex_coverings;  ///< covering ids

  /// Image of a directed source edge.  Throws UnknownEdge.
  DirectedEdge image(const DirectedEdge& d) const;
};

GraphMorphism identity_morphism(const NahGraph& g);

/// Id of the covering "first, then second", dropping identities.
std::string compose_covering_ids(const std::string& first, const std::string& second);

/// first: A -> B, second: B -> C.  Throws UnknownVertex/UnknownEdge when the
/// maps do not chain.
GraphMorphism compose_morphisms(const GraphMorphism& first, const GraphMorphism& second);

/// Resolves a covering id against the source catalog, then the target one.
CoveringEntry resolve_covering(const NahGraph& src, const NahGraph& dst, const std::string& id);

/// Rule tags: "vertex_map", "edge_map", "homomorphism", "covering",
/// "cusps", "commute".
Report verify_morphism(const NahGraph& src, const NahGraph& dst, const GraphMorphism& m);

/// psi_tail * l * psi_head^{-1}.  Throws SingularMatrix.
Matrix2 pushforward_edge_label(const Matrix2& l, const Matrix2& psi_head, const Matrix2& psi_tail);

struct BalanceTransferRow {
  std::string edge;
  Rational d_head;      ///< cusp covering degree at the head end
  Rational d_tail;      ///< cusp covering degree at the tail end
  Rational delta_src;   ///< delta of the source edge
  Rational delta_dst;   ///< delta of its image
  bool holds = false;   ///< d_head * delta_dst == delta_src * d_tail
};

/// One row per source edge.  Assumes verify_morphism passes.
std::vector<BalanceTransferRow> check_balance_transfer(const NahGraph& src, const NahGraph& dst,
                                                       const GraphMorphism& m);

}  // namespace qigraph
