#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "qigraph/nah_graph.hpp"

namespace qigraph {

struct TypedEdge {
  std::string id;
  std::string a;
  std::string b;
  std::string type;
  friend bool operator==(const TypedEdge&, const TypedEdge&) = default;
};

/// Undirected graph with typed vertices and edges.  `permutations` may give,
/// per vertex type, generators of the group of allowed identifications
/// between the edge slots of two vertices of that type; slots are the edge
/// ends at a vertex ordered by (edge type, edge id, end).
struct TypedGraph {
  std::map<std::string, std::string> vertices;  ///< id -> type
  std::map<std::string, TypedEdge> edges;
  std::map<std::string, std::vector<std::vector<int>>> permutations;
};

/// Rule tags: "structure", "connected", "edge_type", "permutation".
Report validate_typed(const TypedGraph& g);

/// Vertex map plus, per cover edge, the base edge traversed in the
/// direction a -> b of the cover edge ("~e" when it runs b -> a).
struct CoveringMap {
  std::map<std::string, std::string> vertex_map;
  std::map<std::string, DirectedEdge> edge_map;
};

bool verify_covering(const TypedGraph& cover, const TypedGraph& base, const CoveringMap& map);

/// Blocks are numbered 0.. in the order of their final signatures, so
/// graphs with a common universal cover get identical numberings.
struct Refinement {
  std::map<std::string, int> block_of;
  int blocks = 0;
  /// (block, neighbour block, edge type) -> number of edge ends at any
  /// vertex of the block leading into the neighbour block.
  std::map<std::tuple<int, int, std::string>, int> matrix;
  std::map<int, std::string> block_type;
};

Refinement degree_refinement(const TypedGraph& g);

struct CommonCover {
  TypedGraph cover;
  CoveringMap to_first;
  CoveringMap to_second;
};

/// Bounded search for a connected common cover with at most `max_size`
/// vertices.  Throws IncompatibleRefinement when the refinements differ and
/// BaseNotTree when the refinement quotient is not a tree (unless `force`).
/// nullopt means the bounded search found nothing, not that no cover exists.
std::optional<CommonCover> find_common_cover(const TypedGraph& g1, const TypedGraph& g2, int max_size,
                                             bool force = false, long max_steps = 20'000'000);

}  // namespace qigraph
