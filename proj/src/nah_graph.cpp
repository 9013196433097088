#include "qigraph/nah_graph.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "qigraph/error.hpp"

namespace qigraph {

DirectedEdge DirectedEdge::parse(const std::string& s) {
  if (!s.empty() && s[0] == '~') return {s.substr(1), true};
  return {s, false};
}

const Edge& NahGraph::edge(const std::string& id) const {
  auto it = edges.find(id);
  if (it == edges.end()) throw UnknownEdge("edge '" + id + "'");
  return it->second;
}

const std::string& NahGraph::head(const DirectedEdge& d) const {
  const Edge& e = edge(d.edge);
  return d.reversed ? e.tail : e.head;
}

const std::string& NahGraph::tail(const DirectedEdge& d) const {
  const Edge& e = edge(d.edge);
  return d.reversed ? e.head : e.tail;
}

const std::string& NahGraph::head_cusp(const DirectedEdge& d) const {
  const Edge& e = edge(d.edge);
  return d.reversed ? e.tail_cusp : e.head_cusp;
}

const std::string& NahGraph::tail_cusp(const DirectedEdge& d) const {
  const Edge& e = edge(d.edge);
  return d.reversed ? e.head_cusp : e.tail_cusp;
}

Matrix2 NahGraph::label(const DirectedEdge& d) const {
  const Edge& e = edge(d.edge);
  return d.reversed ? e.label.inverse() : e.label;
}

const OrbifoldEntry& NahGraph::orbifold_of(const std::string& vertex) const {
  auto it = vertices.find(vertex);
  if (it == vertices.end()) throw UnknownVertex("vertex '" + vertex + "'");
  return catalog->orbifold(it->second);
}

const CuspSpec& NahGraph::cusp_spec(const std::string& vertex, const std::string& cusp) const {
  const OrbifoldEntry& orb = orbifold_of(vertex);
  const CuspSpec* c = orb.cusp(cusp);
  if (c == nullptr) throw NotDeclared("cusp '" + cusp + "' of orbifold '" + orb.id + "'");
  return *c;
}

std::vector<DirectedEdge> NahGraph::out_edges(const std::string& vertex) const {
  std::vector<DirectedEdge> out;
  for (const auto& [id, e] : edges) {
    if (e.head == vertex) out.push_back({id, false});
    if (e.tail == vertex) out.push_back({id, true});
  }
  return out;
}

std::map<std::string, std::vector<DirectedEdge>> adjacency(const NahGraph& g) {
  std::map<std::string, std::vector<DirectedEdge>> adj;
  for (const auto& [v, _] : g.vertices) adj[v];
  for (const auto& [id, e] : g.edges) {
    adj[e.head].push_back({id, false});
    adj[e.tail].push_back({id, true});
  }
  return adj;
}

std::optional<DirectedEdge> NahGraph::edge_at(const std::string& vertex, const std::string& cusp) const {
  for (const auto& [id, e] : edges) {
    if (e.head == vertex && e.head_cusp == cusp) return DirectedEdge{id, false};
    if (e.tail == vertex && e.tail_cusp == cusp) return DirectedEdge{id, true};
  }
  return std::nullopt;
}

std::vector<std::vector<std::string>> components(
    const std::vector<std::string>& vertices,
    const std::vector<std::pair<std::string, std::string>>& links) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& v : vertices) adj[v];
  for (const auto& [a, b] : links) {
    if (!adj.count(a) || !adj.count(b)) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::set<std::string> seen;
  std::vector<std::vector<std::string>> out;
  for (const auto& [start, _] : adj) {
    if (seen.count(start)) continue;
    std::vector<std::string> comp;
    std::deque<std::string> queue{start};
    seen.insert(start);
    while (!queue.empty()) {
      auto v = queue.front();
      queue.pop_front();
      comp.push_back(v);
      for (const auto& w : adj[v]) {
        if (seen.insert(w).second) queue.push_back(w);
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

Report validate(const NahGraph& g, bool strict) {
  Report r;
  if (!g.catalog) {
    r.add("graph", "structure", "no catalog");
    return r;
  }
  if (g.vertices.empty()) r.add("graph", "structure", "no vertices");
  bool structure_ok = true;
  for (const auto& [v, orb] : g.vertices) {
    if (!g.catalog->has_orbifold(orb)) {
      r.add("vertex " + v, "structure", "orbifold '" + orb + "' not in catalog");
      structure_ok = false;
    }
  }
  for (const auto& [id, e] : g.edges) {
    const std::string where = "edge " + id;
    if (e.id != id) r.add(where, "structure", "edge id differs from its key");
    for (const auto& [v, c] : {std::pair{e.head, e.head_cusp}, std::pair{e.tail, e.tail_cusp}}) {
      auto it = g.vertices.find(v);
      if (it == g.vertices.end()) {
        r.add(where, "structure", "unknown vertex '" + v + "'");
        structure_ok = false;
      } else if (g.catalog->has_orbifold(it->second) &&
                 g.catalog->orbifold(it->second).cusp(c) == nullptr) {
        r.add(where, "structure", "orbifold '" + it->second + "' has no cusp '" + c + "'");
        structure_ok = false;
      }
    }
  }
  if (!structure_ok) return r;

  std::vector<std::string> vs;
  for (const auto& [v, _] : g.vertices) vs.push_back(v);
  std::vector<std::pair<std::string, std::string>> links;
  for (const auto& [_, e] : g.edges) links.emplace_back(e.head, e.tail);
  if (components(vs, links).size() > 1) r.add("graph", "connected", "graph is not connected");

  // (1) each cusp carries at most one edge end; a self-paired loop counts once.
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> usage;
  for (const auto& [id, e] : g.edges) {
    usage[{e.head, e.head_cusp}].push_back(id);
    if (!e.self_paired()) usage[{e.tail, e.tail_cusp}].push_back(id);
  }
  for (const auto& [key, ids] : usage) {
    if (ids.size() > 1) {
      std::string list;
      for (const auto& id : ids) list += (list.empty() ? "" : ",") + id;
      r.add("vertex " + key.first, "cond1", "cusp '" + key.second + "' used by edges " + list);
    }
  }
  if (strict) {
    for (const auto& [v, orb] : g.vertices) {
      for (const auto& c : g.catalog->orbifold(orb).cusps) {
        if (!usage.count({v, c.id})) r.add("vertex " + v, "surjective", "cusp '" + c.id + "' is not glued");
      }
    }
  }

  for (const auto& [id, e] : g.edges) {
    const std::string where = "edge " + id;
    const CuspSpec& hc = g.cusp_spec(e.head, e.head_cusp);
    const CuspSpec& tc = g.cusp_spec(e.tail, e.tail_cusp);
    if (hc.degree != tc.degree) {
      r.add(where, "cond2", "cusp degrees " + std::to_string(hc.degree) + " and " +
                                std::to_string(tc.degree) + " differ");
    }
    const Rational det = e.label.det();
    if (det.sign() >= 0) {
      r.add(where, "cond3", "label " + e.label.str() + " has determinant " + det.str() + ", not negative");
      continue;
    }
    if (e.self_paired() &&
        coset_canonical(e.label.inverse(), hc.symmetry) != coset_canonical(e.label, hc.symmetry)) {
      r.add(where, "cond3", "self-paired loop label is not coset-equal to its inverse");
    }
    if (hc.degree == tc.degree && !conjugates_into(e.label, hc.symmetry, tc.symmetry)) {
      r.add(where, "cond5", "label does not conjugate the head symmetry group to the tail one");
    }
  }

  bool any_nonarithmetic = false;
  for (const auto& [_, orb] : g.vertices) {
    if (!g.catalog->orbifold(orb).arithmetic) any_nonarithmetic = true;
  }
  if (!g.vertices.empty() && !any_nonarithmetic) {
    r.add("graph", "cond6", "every vertex label is arithmetic");
  }
  return r;
}

Rational delta(const NahGraph& g, const DirectedEdge& d) {
  const Matrix2 l = g.label(d);
  const CuspSpec& hc = g.cusp_spec(g.head(d), g.head_cusp(d));
  const CuspSpec& tc = g.cusp_spec(g.tail(d), g.tail_cusp(d));
  return -l.det() * hc.lattice.covolume() / tc.lattice.covolume();
}

BalanceResult balanced(const NahGraph& g) {
  BalanceResult res;
  const auto adj = adjacency(g);
  for (const auto& [root, _] : g.vertices) {
    if (res.potential.count(root)) continue;
    res.potential[root] = Rational(1);
    std::deque<std::string> queue{root};
    while (!queue.empty()) {
      const std::string v = queue.front();
      queue.pop_front();
      for (const auto& d : adj.at(v)) {
        const std::string& w = g.tail(d);
        if (res.potential.count(w)) continue;
        res.potential[w] = delta(g, d) * res.potential[v];
        queue.push_back(w);
      }
    }
  }
  for (const auto& [id, e] : g.edges) {
    const DirectedEdge d{id, false};
    if (res.potential[e.tail] != delta(g, d) * res.potential[e.head]) {
      res.witness = d;
      res.potential.clear();
      return res;
    }
  }
  res.balanced = true;
  return res;
}

IntegralityResult is_integral(const NahGraph& g) {
  IntegralityResult res;
  for (const auto& [id, e] : g.edges) {
    const CuspSpec& hc = g.cusp_spec(e.head, e.head_cusp);
    const CuspSpec& tc = g.cusp_spec(e.tail, e.tail_cusp);
    if (!e.label.invertible() || hc.lattice.image(e.label) != tc.lattice) {
      res.non_integral_edges.push_back(id);
    }
  }
  res.integral = res.non_integral_edges.empty();
  return res;
}

NahGraph from_manifest(const GluingManifest& m) {
  NahGraph g;
  g.catalog = m.catalog;
  g.catalog_ref = m.catalog_ref;
  for (const auto& [piece, orb] : m.pieces) {
    g.catalog->orbifold(orb);
    g.vertices[piece] = orb;
  }
  std::map<std::pair<std::string, std::string>, std::string> used;
  for (const auto& [id, p] : m.pairings) {
    for (const auto& [piece, cusp] : {std::pair{p.a, p.a_cusp}, std::pair{p.b, p.b_cusp}}) {
      if (!m.pieces.count(piece)) throw UnknownVertex("pairing '" + id + "' names piece '" + piece + "'");
      g.cusp_spec(piece, cusp);
    }
    const bool self = p.a == p.b && p.a_cusp == p.b_cusp;
    for (const auto& key : {std::pair{p.a, p.a_cusp}, std::pair{p.b, p.b_cusp}}) {
      auto [it, fresh] = used.emplace(key, id);
      if (!fresh && !(self && it->second == id)) {
        throw InvalidGraph("cusp '" + key.second + "' of piece '" + key.first +
                           "' appears in pairings '" + it->second + "' and '" + id + "'");
      }
    }
    const CuspSpec& ac = g.cusp_spec(p.a, p.a_cusp);
    const CuspSpec& bc = g.cusp_spec(p.b, p.b_cusp);
    if (p.gluing.det().sign() >= 0) {
      throw NonIntegralGluing("pairing '" + id + "' gluing " + p.gluing.str() + " preserves orientation");
    }
    if (ac.lattice.image(p.gluing) != bc.lattice) {
      throw NonIntegralGluing("pairing '" + id + "' gluing " + p.gluing.str() +
                              " is not an isomorphism of cusp lattices");
    }
    g.add_edge({id, p.a, p.a_cusp, p.b, p.b_cusp, p.gluing});
  }
  for (const auto& [piece, orb] : m.pieces) {
    for (const auto& c : g.catalog->orbifold(orb).cusps) {
      if (!used.count({piece, c.id})) {
        throw UnpairedCusp("cusp '" + c.id + "' of piece '" + piece + "' is not paired");
      }
    }
  }
  const Report r = validate(g);
  if (!r.ok()) throw InvalidGraph("manifest does not describe a valid graph:\n" + r.str());
  return g;
}

GluingManifest to_manifest(const NahGraph& g) {
  const auto integ = is_integral(g);
  if (!integ.integral) {
    throw NonIntegralGluing("edge '" + integ.non_integral_edges.front() + "' is not integral");
  }
  GluingManifest m;
  m.catalog = g.catalog;
  m.catalog_ref = g.catalog_ref;
  m.pieces = g.vertices;
  for (const auto& [id, e] : g.edges) {
    m.pairings[id] = {id, e.head, e.head_cusp, e.tail, e.tail_cusp, e.label};
  }
  return m;
}

}  // namespace qigraph
