#pragma once

#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "qigraph/common_cover.hpp"
#include "qigraph/hgraph.hpp"

namespace qigraph {

/// Random fixture generation.  Orbifolds come in families: member k of a
/// family has, at every cusp, lattice frame^{-1}(scale * Z^2) and symmetry
/// frame^{-1} R frame, where R is the standard rotation of the cusp degree;
/// member 0 has identity frames and scale 1 and is the family's minimal
/// orbifold.  Member i covers member j < i whenever scale_j divides scale_i.
struct MemberFrame {
  std::string family;
  int rank = 0;
  long scale = 1;
  bool arithmetic = false;
  std::map<std::string, Matrix2> frame;  ///< per cusp
};

struct GeneratedCatalog {
  std::shared_ptr<const Catalog> catalog;
  std::map<std::string, MemberFrame> members;
  std::map<std::string, std::vector<std::string>> families;  ///< ids by rank
};

GeneratedCatalog generate_catalog(std::mt19937_64& rng);

enum class LabelMode { Any, Balanced, Integral };

struct GraphShape {
  int max_vertices = 8;
  int max_edges = 12;
  LabelMode mode = LabelMode::Any;
  /// Use only rank-0 members as vertex labels.
  bool minimal_labels = false;
};

/// A valid graph whose vertex and edge ids are "v<i>" and "e<i>".
NahGraph generate_graph(const GeneratedCatalog& cat, std::mt19937_64& rng, const GraphShape& shape);

struct GeneratedCover {
  NahGraph graph;
  GraphMorphism morphism;  ///< graph -> base
};

/// Connected graph covering `base` with at most `max_sheets` sheets, each
/// copy relabelled by a random family member covering the base label.
GeneratedCover generate_cover(const GeneratedCatalog& cat, const NahGraph& base, std::mt19937_64& rng,
                              int max_sheets);

/// Copy of `g` with vertex and edge ids replaced by random fresh names and
/// every stored edge direction flipped at random.
NahGraph shuffle_ids(const NahGraph& g, std::mt19937_64& rng);

struct HShape {
  int max_vertices = 5;   ///< hyperbolic vertices before cutting
  int max_edges = 8;
  int max_cuts = 3;       ///< edges replaced by a Seifert vertex
  int max_seifert = 4;
  int extra_seifert_edges = 2;
  bool hyperbolic = true; ///< false: Seifert vertices only
};

/// A valid H-graph: a generated graph with some edges cut open at a
/// Seifert vertex, plus extra Seifert vertices and edges.  Seifert ids are
/// "s<i>", slope edges "x<i>", Seifert edges "f<i>".
HGraph generate_h_graph(const GeneratedCatalog& cat, std::mt19937_64& rng, const HShape& shape);

struct GeneratedHCover {
  HGraph graph;
  HMorphism morphism;  ///< graph -> base
};

/// Connected cover of `base` with at most `sheets` sheets, identity
/// coverings on hyperbolic vertices, slopes rescaled per Seifert copy and
/// random moves applied afterwards.
GeneratedHCover generate_h_cover(const HGraph& base, std::mt19937_64& rng, int sheets);

/// `count` random moves of the three kinds.
HGraph random_h_moves(const HGraph& h, std::mt19937_64& rng, int count);

/// Tree of `vertices` vertices "u<i>" of distinct types "t<i>"; tree edge
/// i becomes 1..max_parallel parallel edges "k<i>_<j>" of type "k<i>".
TypedGraph generate_typed_tree(std::mt19937_64& rng, int vertices, int max_parallel);

struct GeneratedTypedCover {
  TypedGraph graph;
  CoveringMap map;  ///< graph -> base
};

/// Connected permutation cover of `base` with at most `sheets` sheets.
GeneratedTypedCover generate_typed_cover(const TypedGraph& base, std::mt19937_64& rng, int sheets);

}  // namespace qigraph
