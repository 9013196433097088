#pragma once

#include <map>
#include <memory>
#include <string>

#include "qigraph/minimization.hpp"

namespace qigraph {

/// Lattice data chosen for one edge, in tail-cusp coordinates.
struct EdgePlan {
  Lattice2 intersection;  ///< tail lattice intersected with label(head lattice)
  Lattice2 chosen;        ///< sublattice realized by the covers
  Rational d_head;        ///< cusp covering degree at the head end
  Rational d_tail;        ///< cusp covering degree at the tail end
};

struct RealizationPlan {
  std::map<std::string, EdgePlan> edges;
  std::map<std::string, std::string> vertex_covers;  ///< vertex -> covering id
  std::map<std::string, long> vertex_degrees;         ///< d_v
  std::map<std::string, Rational> potential;          ///< m(v)
  long scale = 1;                                     ///< b
  std::map<std::string, long> copies;                 ///< n(v)
  /// Whether the assembled graph had to be cut down to one component.
  bool took_component = false;
};

/// Tail lattice intersected with the image of the head lattice under the
/// edge label.  Throws UnknownEdge.
Lattice2 common_sublattice(const NahGraph& g, const std::string& edge);

struct SyntheticCovers {
  /// New orbifolds and coverings only; `note` carries the existence caveat.
  Catalog fragment;
  /// vertex -> covering id ("id(...)" where no cover is needed)
  std::map<std::string, std::string> covers;
};

/// Fabricates one cover per vertex whose cusps over each edge end carry the
/// chosen lattice.  Throws LatticeNotContained when a chosen lattice is not
/// inside the edge's intersection lattice.
SyntheticCovers synthesize_covers(const NahGraph& g, const std::map<std::string, Lattice2>& chosen);

struct Realization {
  NahGraph graph;                 ///< integral, catalog includes the fragment
  GluingManifest manifest;
  NahGraph minimal;               ///< minimize(input)
  GraphMorphism morphism;         ///< graph -> minimal
  RealizationPlan plan;
  Catalog fragment;               ///< synthesized entries (may be empty)
};

/// Builds an integral graph bisimilar to `g`.  `covers` overrides the
/// synthesized cover per vertex; `sublattices` overrides the chosen lattice
/// per edge.  Throws Unbalanced, InvalidGraph, LatticeNotContained,
/// CoverMismatch, NotDeclared.
Realization realize(const NahGraph& g, const std::map<std::string, std::string>& covers = {},
                    const std::map<std::string, Lattice2>& sublattices = {});

}  // namespace qigraph
