#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qigraph/morphism.hpp"

namespace qigraph {

enum class SeifertColor { Black, White };
enum class FiberType { O, N };

std::string to_string(SeifertColor c);
std::string to_string(FiberType t);

struct SeifertVertex {
  SeifertColor color = SeifertColor::White;
  FiberType type = FiberType::O;
  friend bool operator==(const SeifertVertex&, const SeifertVertex&) = default;
};

/// Edge from a cusp of a hyperbolic vertex to a Seifert vertex, labelled by
/// the fiber slope in that cusp's tangent plane.
struct SlopeEdge {
  std::string id;
  std::string vertex;
  std::string cusp;
  std::string seifert;
  Vec2 slope;
  friend bool operator==(const SlopeEdge&, const SlopeEdge&) = default;
};

/// Edge between two Seifert vertices.  `degree` is the order of the
/// symmetry group of the gluing torus (1, or 2 for a pillow).
struct SeifertEdge {
  std::string id;
  std::string a;
  std::string b;
  int degree = 1;
  bool is_loop() const { return a == b; }
  friend bool operator==(const SeifertEdge&, const SeifertEdge&) = default;
};

/// Graph with hyperbolic vertices (held in `hyperbolic`, which also owns
/// the catalog and the edges between hyperbolic vertices) and Seifert
/// vertices.  Signs live on the edges whose ends are both type o Seifert
/// vertices, or one hyperbolic vertex and one type o Seifert vertex.
struct HGraph {
  NahGraph hyperbolic;
  std::map<std::string, SeifertVertex> seifert;
  std::map<std::string, SlopeEdge> slopes;
  std::map<std::string, SeifertEdge> seifert_edges;
  std::map<std::string, int> signs;

  bool is_seifert_free() const { return seifert.empty() && slopes.empty() && seifert_edges.empty(); }
  /// Whether the edge with this id (slope or Seifert edge) must carry a sign.
  bool needs_sign(const std::string& edge_id) const;
  int sign(const std::string& edge_id) const;
};

HGraph from_nah(const NahGraph& g);

/// Rule tags: those of validate() for the hyperbolic part, plus
/// "structure", "connected", "surjective", "seifert_symmetry", "slope",
/// "sign".
Report validate_h(const HGraph& h);

// The three equivalence moves.
/// Flips every sign at a type o Seifert vertex.  A loop keeps its sign.
HGraph flip_signs_at(const HGraph& h, const std::string& seifert_vertex);
/// Negates the slope on a slope edge, and its sign if it carries one.
HGraph negate_slope(const HGraph& h, const std::string& slope_edge);
/// Multiplies every slope at a Seifert vertex by a positive rational.
HGraph scale_slopes(const HGraph& h, const std::string& seifert_vertex, const Rational& factor);

/// Canonical representative of the move class of h (for its own ids).
HGraph h_canonical_moves(const HGraph& h);

/// Open graph homomorphism between H-graphs.  Seifert edges map with an
/// orientation: a reversed image means ends a, b go to the image's b, a.
struct HMorphism {
  GraphMorphism hyperbolic;
  std::map<std::string, std::string> seifert_map;
  std::map<std::string, std::string> slope_map;
  std::map<std::string, DirectedEdge> seifert_edge_map;
};

HMorphism identity_h_morphism(const HGraph& h);
HMorphism compose_h_morphisms(const HMorphism& first, const HMorphism& second);

/// Rule tags: those of verify_morphism() for the hyperbolic part, plus
/// "vertex_map", "edge_map", "homomorphism", "open", "color", "type",
/// "degree", "slope", "sign", "o_to_n".
Report verify_h_morphism(const HGraph& src, const HGraph& dst, const HMorphism& m);

struct HQuotient {
  HGraph graph;
  HMorphism morphism;  ///< from h_canonical_moves(input)
};

HQuotient minimize_h(const HGraph& h);

/// A vertex and edge bijection under which the move classes agree, if any.
std::optional<HMorphism> find_h_isomorphism(const HGraph& a, const HGraph& b);
bool h_isomorphic(const HGraph& a, const HGraph& b);

}  // namespace qigraph
