#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace oracle {

using namespace qigraph;

namespace {

std::vector<DirectedEdge> both_orientations(const NahGraph& g) {
  std::vector<DirectedEdge> out;
  for (const auto& [id, _] : g.edges) {
    out.push_back({id, false});
    out.push_back({id, true});
  }
  return out;
}

Rational delta_of(const NahGraph& g, const DirectedEdge& d) {
  const Rational head_covol = g.cusp_spec(g.head(d), g.head_cusp(d)).lattice.basis().det();
  const Rational tail_covol = g.cusp_spec(g.tail(d), g.tail_cusp(d)).lattice.basis().det();
  return -g.label(d).det() * head_covol / tail_covol;
}

}  // namespace

std::vector<std::vector<DirectedEdge>> simple_cycles(const NahGraph& g) {
  const auto all = both_orientations(g);
  std::vector<std::vector<DirectedEdge>> cycles;
  std::vector<DirectedEdge> path;
  std::set<std::string> on_path;
  std::set<std::string> used_edges;
  std::string start;
  std::function<void(const std::string&)> walk = [&](const std::string& v) {
    for (const auto& d : all) {
      if (g.tail(d) != v || used_edges.count(d.edge)) continue;
      const std::string& w = g.head(d);
      if (w == start) {
        path.push_back(d);
        cycles.push_back(path);
        path.pop_back();
        continue;
      }
      if (w < start || on_path.count(w)) continue;
      path.push_back(d);
      on_path.insert(w);
      used_edges.insert(d.edge);
      walk(w);
      used_edges.erase(d.edge);
      on_path.erase(w);
      path.pop_back();
    }
  };
  for (const auto& [v, _] : g.vertices) {
    start = v;
    on_path = {v};
    walk(v);
  }
  return cycles;
}

bool balanced_by_cycles(const NahGraph& g) {
  for (const auto& cycle : simple_cycles(g)) {
    Rational product(1);
    for (const auto& d : cycle) product *= delta_of(g, d);
    if (product != Rational(1)) return false;
  }
  return true;
}

std::vector<IntBasis> sublattices_of_z2(long n) {
  std::vector<IntBasis> out;
  for (long a = 1; a <= n; ++a) {
    for (long d = 1; a * d <= n; ++d) {
      for (long c = 0; c < d; ++c) out.push_back({a, 0, c, d});
    }
  }
  return out;
}

bool int_contains(const IntBasis& l, long x, long y) {
  const long det = l[0] * l[3] - l[1] * l[2];
  return (l[3] * x - l[1] * y) % det == 0 && (-l[2] * x + l[0] * y) % det == 0;
}

bool int_contains(const IntBasis& sup, const IntBasis& sub) {
  return int_contains(sup, sub[0], sub[2]) && int_contains(sup, sub[1], sub[3]);
}

long int_index(const IntBasis& b) { return std::abs(b[0] * b[3] - b[1] * b[2]); }

std::optional<IntBasis> intersect_by_enumeration(const IntBasis& a, const IntBasis& b, long n) {
  std::optional<IntBasis> best;
  for (const auto& s : sublattices_of_z2(n)) {
    if (!int_contains(a, s) || !int_contains(b, s)) continue;
    if (!best || int_index(s) < int_index(*best)) best = s;
  }
  return best;
}

namespace {

bool same_coset(const Matrix2& la, const Matrix2& lb, const CyclicSymmetry& f) {
  Matrix2 power = Matrix2::identity();
  for (int k = 0; k < f.order; ++k) {
    if (la * power == lb) return true;
    power = power * f.generator;
  }
  return false;
}

// The stored edge of b with an end at (v, cusp), oriented to end there.
std::optional<DirectedEdge> edge_into(const NahGraph& b, const std::string& v, const std::string& cusp) {
  for (const auto& [id, e] : b.edges) {
    if (e.head == v && e.head_cusp == cusp) return DirectedEdge{id, false};
    if (e.tail == v && e.tail_cusp == cusp) return DirectedEdge{id, true};
  }
  return std::nullopt;
}

bool check_bijection(const NahGraph& a, const NahGraph& b, const std::map<std::string, std::string>& phi) {
  for (const auto& [id, e] : a.edges) {
    const auto d = edge_into(b, phi.at(e.head), e.head_cusp);
    if (!d) return false;
    if (b.tail(*d) != phi.at(e.tail) || b.tail_cusp(*d) != e.tail_cusp) return false;
    const CyclicSymmetry& f = a.cusp_spec(e.head, e.head_cusp).symmetry;
    if (!same_coset(e.label, b.label(*d), f)) return false;
  }
  return true;
}

}  // namespace

bool isomorphic_by_search(const NahGraph& a, const NahGraph& b) {
  if (a.vertices.size() != b.vertices.size() || a.edges.size() != b.edges.size()) return false;
  std::vector<std::string> va;
  std::vector<std::string> vb;
  for (const auto& [v, _] : a.vertices) va.push_back(v);
  for (const auto& [v, _] : b.vertices) vb.push_back(v);
  std::sort(vb.begin(), vb.end());
  do {
    std::map<std::string, std::string> phi;
    bool labels_ok = true;
    for (std::size_t i = 0; i < va.size() && labels_ok; ++i) {
      labels_ok = a.vertices.at(va[i]) == b.vertices.at(vb[i]);
      phi[va[i]] = vb[i];
    }
    if (labels_ok && check_bijection(a, b, phi)) return true;
  } while (std::next_permutation(vb.begin(), vb.end()));
  return false;
}

bool signs_equivalent_by_enumeration(const HGraph& h, const std::map<std::string, int>& s1,
                                     const std::map<std::string, int>& s2) {
  std::vector<std::string> o_vertices;
  for (const auto& [w, sv] : h.seifert) {
    if (sv.type == FiberType::O) o_vertices.push_back(w);
  }
  for (unsigned long mask = 0; mask < (1UL << o_vertices.size()); ++mask) {
    std::set<std::string> flipped;
    for (std::size_t i = 0; i < o_vertices.size(); ++i) {
      if (mask & (1UL << i)) flipped.insert(o_vertices[i]);
    }
    std::map<std::string, int> moved = s1;
    for (auto& [id, s] : moved) {
      std::vector<std::string> ends;
      if (auto it = h.slopes.find(id); it != h.slopes.end()) {
        ends = {it->second.seifert};
      } else {
        const SeifertEdge& e = h.seifert_edges.at(id);
        ends = {e.a, e.b};
      }
      for (const auto& w : ends) {
        if (flipped.count(w)) s = -s;
      }
    }
    if (moved == s2) return true;
  }
  return false;
}

std::size_t fiber_product_component_size(const TypedGraph& g1, const CoveringMap& m1, const TypedGraph& g2,
                                         const CoveringMap& m2) {
  using Pair = std::pair<std::string, std::string>;
  std::map<Pair, std::vector<Pair>> links;
  for (const auto& [v1, _] : g1.vertices) {
    for (const auto& [v2, _2] : g2.vertices) {
      if (m1.vertex_map.at(v1) == m2.vertex_map.at(v2)) links[{v1, v2}];
    }
  }
  // Ends of a cover edge over the base edge's a and b ends.
  auto ends = [](const TypedEdge& e, const DirectedEdge& d) {
    return d.reversed ? Pair{e.b, e.a} : Pair{e.a, e.b};
  };
  for (const auto& [id1, e1] : g1.edges) {
    for (const auto& [id2, e2] : g2.edges) {
      const DirectedEdge& d1 = m1.edge_map.at(id1);
      const DirectedEdge& d2 = m2.edge_map.at(id2);
      if (d1.edge != d2.edge) continue;
      const auto [a1, b1] = ends(e1, d1);
      const auto [a2, b2] = ends(e2, d2);
      links[{a1, a2}].push_back({b1, b2});
      links[{b1, b2}].push_back({a1, a2});
    }
  }
  if (links.empty()) return 0;
  std::set<Pair> seen{links.begin()->first};
  std::vector<Pair> stack{links.begin()->first};
  while (!stack.empty()) {
    const Pair p = stack.back();
    stack.pop_back();
    for (const auto& q : links.at(p)) {
      if (seen.insert(q).second) stack.push_back(q);
    }
  }
  return seen.size();
}

}  // namespace oracle
