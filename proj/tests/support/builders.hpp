#pragma once

// Terse constructors for hand-built catalogs and graphs in tests.

#include <initializer_list>
#include <memory>
#include <string>
#include <utility>

#include "qigraph/nah_graph.hpp"

namespace testing_support {

inline qigraph::CuspSpec cusp(const std::string& id, int degree = 1, qigraph::Lattice2 lattice = {}) {
  qigraph::CuspSpec c;
  c.id = id;
  c.degree = degree;
  c.lattice = lattice;
  c.symmetry = qigraph::CyclicSymmetry::standard(degree);
  return c;
}

inline qigraph::OrbifoldEntry orbifold(const std::string& id, std::initializer_list<qigraph::CuspSpec> cusps,
                                       bool arithmetic = false, bool minimal = true) {
  qigraph::OrbifoldEntry o;
  o.id = id;
  o.arithmetic = arithmetic;
  o.is_minimal = minimal;
  o.cusps = cusps;
  return o;
}

inline qigraph::CoveringEntry covering(const std::string& id, const std::string& source, const std::string& target,
                                       long degree, std::initializer_list<qigraph::CuspAssignment> cusps) {
  qigraph::CoveringEntry c;
  c.id = id;
  c.source = source;
  c.target = target;
  c.total_degree = degree;
  c.cusps = cusps;
  return c;
}

inline void declare(qigraph::Catalog& cat, qigraph::OrbifoldEntry o) { cat.orbifolds[o.id] = std::move(o); }
inline void declare(qigraph::Catalog& cat, qigraph::CoveringEntry c) { cat.coverings[c.id] = std::move(c); }

inline qigraph::Edge edge(const std::string& id, const std::string& tail, const std::string& tail_cusp,
                          const std::string& head, const std::string& head_cusp, const qigraph::Matrix2& label) {
  return qigraph::Edge{id, head, head_cusp, tail, tail_cusp, label};
}

inline qigraph::NahGraph graph(const qigraph::Catalog& cat,
                               std::initializer_list<std::pair<const std::string, std::string>> vertices,
                               std::initializer_list<qigraph::Edge> edges) {
  qigraph::NahGraph g;
  g.catalog = std::make_shared<const qigraph::Catalog>(cat);
  g.vertices = vertices;
  for (const auto& e : edges) g.add_edge(e);
  return g;
}

}  // namespace testing_support
