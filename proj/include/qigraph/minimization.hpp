#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qigraph/morphism.hpp"

namespace qigraph {

/// A graph together with a verified morphism onto it from the input.
struct Quotient {
  NahGraph graph;
  GraphMorphism morphism;
};

/// Blocks of a vertex partition, each sorted, ordered by least member.
using VertexPartition = std::vector<std::vector<std::string>>;

/// Quotient of `g` where vertex v goes to block_of[v] along the covering
/// covering_of[v].  Edge ends landing on the same (block, cusp) are
/// identified.  Returns nullopt (with the reason in `why`) when the result
/// is not a valid graph or the morphism does not verify; `check` = false
/// skips those two checks (for subgraphs of larger structures).
std::optional<Quotient> quotient_by(const NahGraph& g, const std::map<std::string, std::string>& block_of,
                                    const std::map<std::string, std::string>& covering_of,
                                    std::string* why = nullptr, bool check = true);

/// Replaces every vertex label by its declared minimal quotient (targets
/// are the vertex's own cusp degrees) and pushes edge labels forward.
/// Throws NotDeclared.
Quotient normalize_labels(const NahGraph& g);

/// Coarsest partition in which block members share the orbifold label and,
/// cusp by cusp, the opposite block, the opposite cusp, and the edge label
/// coset.
VertexPartition stable_partition(const NahGraph& g);

/// Minimal graph of the bisimilarity class of `g`, with the composite
/// morphism g -> result.
Quotient minimize(const NahGraph& g);

/// Serialization invariant under isomorphism (vertex and edge ids are not
/// part of it).
std::string canonical_form(const NahGraph& g);

bool isomorphic(const NahGraph& a, const NahGraph& b);
bool bisimilar(const NahGraph& a, const NahGraph& b);

/// Exhaustive search over iterated quotients.  Returns the least, by
/// (vertex count, edge count, canonical form), of the reachable graphs that
/// admit no further proper quotient.  Throws TooLarge when g has more than
/// max_vertices vertices.
NahGraph brute_force_minimize(const NahGraph& g, int max_vertices = 6);

}  // namespace qigraph
