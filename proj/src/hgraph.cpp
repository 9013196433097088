#include "qigraph/hgraph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <tuple>

#include "qigraph/error.hpp"
#include "qigraph/minimization.hpp"

namespace qigraph {

namespace {

// Solutions of a linear system over Z/2.  Each equation is a set of
// variable indices whose sum must equal the right-hand side.
class Gf2System {
public:
  explicit Gf2System(std::size_t vars) : vars_(vars) {}

  void add(std::vector<std::size_t> vars, bool rhs) {
    std::vector<char> row(vars_ + 1, 0);
    for (auto v : vars) row[v] ^= 1;
    row[vars_] = rhs ? 1 : 0;
    rows_.push_back(std::move(row));
  }

  /// Some solution with every free variable zero, or nullopt.
  std::optional<std::vector<bool>> solve() const {
    auto rows = rows_;
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < vars_ && r < rows.size(); ++c) {
      std::size_t p = r;
      while (p < rows.size() && rows[p][c] == 0) ++p;
      if (p == rows.size()) continue;
      std::swap(rows[p], rows[r]);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i != r && rows[i][c] != 0) {
          for (std::size_t k = c; k <= vars_; ++k) rows[i][k] ^= rows[r][k];
        }
      }
      pivot_col.push_back(c);
      ++r;
    }
    for (std::size_t i = r; i < rows.size(); ++i) {
      if (rows[i][vars_] != 0) return std::nullopt;
    }
    std::vector<bool> x(vars_, false);
    for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = rows[i][vars_] != 0;
    return x;
  }

private:
  std::size_t vars_;
  std::vector<std::vector<char>> rows_;
};

bool canonical_direction(const Vec2& v) { return v.x.sign() > 0 || (v.x.is_zero() && v.y.sign() > 0); }

// The factor s with v = s * w, or nullopt when v and w are not parallel.
std::optional<Rational> ratio(const Vec2& v, const Vec2& w) {
  if (w.is_zero() || v.x * w.y != v.y * w.x) return std::nullopt;
  return w.x.is_zero() ? v.y / w.y : v.x / w.x;
}

const CuspSpec& slope_cusp(const HGraph& h, const SlopeEdge& s) { return h.hyperbolic.cusp_spec(s.vertex, s.cusp); }

// Seifert-side incidence: the edge ids touching each Seifert vertex.
std::map<std::string, std::vector<std::string>> seifert_star(const HGraph& h) {
  std::map<std::string, std::vector<std::string>> star;
  for (const auto& [w, _] : h.seifert) star[w];
  for (const auto& [id, s] : h.slopes) star[s.seifert].push_back(id);
  for (const auto& [id, e] : h.seifert_edges) {
    star[e.a].push_back(id);
    if (!e.is_loop()) star[e.b].push_back(id);
  }
  for (auto& [_, ids] : star) std::sort(ids.begin(), ids.end());
  return star;
}

// Hyperbolic-side incidence: every edge id (both kinds) at each hyperbolic vertex.
std::map<std::string, std::set<std::string>> hyperbolic_star(const HGraph& h) {
  std::map<std::string, std::set<std::string>> star;
  for (const auto& [v, _] : h.hyperbolic.vertices) star[v];
  for (const auto& [id, e] : h.hyperbolic.edges) {
    star[e.head].insert(id);
    star[e.tail].insert(id);
  }
  for (const auto& [id, s] : h.slopes) star[s.vertex].insert(id);
  return star;
}

}  // namespace

std::string to_string(SeifertColor c) { return c == SeifertColor::Black ? "black" : "white"; }
std::string to_string(FiberType t) { return t == FiberType::O ? "o" : "n"; }

bool HGraph::needs_sign(const std::string& edge_id) const {
  auto is_o = [this](const std::string& w) {
    auto it = seifert.find(w);
    return it != seifert.end() && it->second.type == FiberType::O;
  };
  if (auto it = slopes.find(edge_id); it != slopes.end()) return is_o(it->second.seifert);
  if (auto it = seifert_edges.find(edge_id); it != seifert_edges.end()) {
    return is_o(it->second.a) && is_o(it->second.b);
  }
  return false;
}

int HGraph::sign(const std::string& edge_id) const {
  auto it = signs.find(edge_id);
  if (it == signs.end()) throw UnknownEdge("edge '" + edge_id + "' carries no sign");
  return it->second;
}

HGraph from_nah(const NahGraph& g) {
  HGraph h;
  h.hyperbolic = g;
  return h;
}

Report validate_h(const HGraph& h) {
  Report r;
  const NahGraph& g = h.hyperbolic;
  if (!g.catalog) {
    r.add("graph", "structure", "no catalog");
    return r;
  }
  if (g.vertices.empty() && h.seifert.empty()) {
    r.add("graph", "structure", "no vertices");
    return r;
  }
  bool structure_ok = true;
  for (const auto& [w, _] : h.seifert) {
    if (g.vertices.count(w)) {
      r.add("vertex " + w, "structure", "id used by a hyperbolic and a Seifert vertex");
      structure_ok = false;
    }
  }
  std::set<std::string> edge_ids;
  for (const auto& [id, _] : g.edges) edge_ids.insert(id);
  for (const auto& [id, s] : h.slopes) {
    const std::string where = "edge " + id;
    if (s.id != id) r.add(where, "structure", "edge id differs from its key");
    if (!edge_ids.insert(id).second) {
      r.add(where, "structure", "edge id used twice");
      structure_ok = false;
    }
    auto v = g.vertices.find(s.vertex);
    if (v == g.vertices.end()) {
      r.add(where, "structure", "unknown hyperbolic vertex '" + s.vertex + "'");
      structure_ok = false;
    } else if (g.catalog->has_orbifold(v->second) && g.catalog->orbifold(v->second).cusp(s.cusp) == nullptr) {
      r.add(where, "structure", "orbifold '" + v->second + "' has no cusp '" + s.cusp + "'");
      structure_ok = false;
    }
    if (!h.seifert.count(s.seifert)) {
      r.add(where, "structure", "unknown Seifert vertex '" + s.seifert + "'");
      structure_ok = false;
    }
  }
  for (const auto& [id, e] : h.seifert_edges) {
    const std::string where = "edge " + id;
    if (e.id != id) r.add(where, "structure", "edge id differs from its key");
    if (!edge_ids.insert(id).second) {
      r.add(where, "structure", "edge id used twice");
      structure_ok = false;
    }
    for (const auto& w : {e.a, e.b}) {
      if (!h.seifert.count(w)) {
        r.add(where, "structure", "unknown Seifert vertex '" + w + "'");
        structure_ok = false;
      }
    }
  }
  for (const auto& [id, _] : h.signs) {
    if (!edge_ids.count(id)) r.add("edge " + id, "sign", "sign on an unknown edge");
  }

  // Hyperbolic part: everything validate() checks except global
  // connectivity and the global non-arithmetic vertex, which apply per
  // component here.
  if (!g.vertices.empty()) {
    for (const auto& v : validate(g, false).items()) {
      if (v.rule == "connected" || v.rule == "cond6") continue;
      r.add(v.subject, v.rule, v.detail);
      if (v.rule == "structure") structure_ok = false;
    }
  }
  if (!structure_ok) return r;

  {
    std::vector<std::string> hv;
    for (const auto& [v, _] : g.vertices) hv.push_back(v);
    std::vector<std::pair<std::string, std::string>> links;
    for (const auto& [_, e] : g.edges) links.emplace_back(e.head, e.tail);
    for (const auto& comp : components(hv, links)) {
      bool ok = false;
      for (const auto& v : comp) ok = ok || !g.orbifold_of(v).arithmetic;
      if (!ok) r.add("vertex " + comp.front(), "cond6", "hyperbolic component has only arithmetic labels");
    }

    std::vector<std::string> all = hv;
    for (const auto& [w, _] : h.seifert) all.push_back(w);
    for (const auto& [_, s] : h.slopes) links.emplace_back(s.vertex, s.seifert);
    for (const auto& [_, e] : h.seifert_edges) links.emplace_back(e.a, e.b);
    if (components(all, links).size() > 1) r.add("graph", "connected", "graph is not connected");
  }

  std::map<std::pair<std::string, std::string>, std::vector<std::string>> usage;
  for (const auto& [id, e] : g.edges) {
    usage[{e.head, e.head_cusp}].push_back(id);
    if (!e.self_paired()) usage[{e.tail, e.tail_cusp}].push_back(id);
  }
  for (const auto& [id, s] : h.slopes) usage[{s.vertex, s.cusp}].push_back(id);
  for (const auto& [key, ids] : usage) {
    bool has_slope = false;
    for (const auto& id : ids) has_slope = has_slope || h.slopes.count(id);
    if (ids.size() > 1 && has_slope) {
      std::string list;
      for (const auto& id : ids) list += (list.empty() ? "" : ",") + id;
      r.add("vertex " + key.first, "cond1", "cusp '" + key.second + "' used by edges " + list);
    }
  }
  for (const auto& [v, orb] : g.vertices) {
    for (const auto& c : g.catalog->orbifold(orb).cusps) {
      if (!usage.count({v, c.id})) r.add("vertex " + v, "surjective", "cusp '" + c.id + "' is not glued");
    }
  }

  for (const auto& [id, s] : h.slopes) {
    const std::string where = "edge " + id;
    const int degree = slope_cusp(h, s).degree;
    if (degree != 1 && degree != 2) {
      r.add(where, "seifert_symmetry", "cusp '" + s.cusp + "' has degree " + std::to_string(degree));
    } else if (degree == 2 && h.seifert.at(s.seifert).type != FiberType::N) {
      r.add(where, "seifert_symmetry", "degree 2 cusp glued to type o vertex '" + s.seifert + "'");
    }
    if (s.slope.is_zero()) r.add(where, "slope", "slope is zero");
  }
  for (const auto& [id, e] : h.seifert_edges) {
    const std::string where = "edge " + id;
    if (e.degree != 1 && e.degree != 2) {
      r.add(where, "seifert_symmetry", "degree " + std::to_string(e.degree) + " is not 1 or 2");
    } else if (e.degree == 2 &&
               (h.seifert.at(e.a).type != FiberType::N || h.seifert.at(e.b).type != FiberType::N)) {
      r.add(where, "seifert_symmetry", "degree 2 edge at a type o vertex");
    }
  }

  std::vector<std::string> seifert_edge_ids;
  for (const auto& [id, _] : h.slopes) seifert_edge_ids.push_back(id);
  for (const auto& [id, _] : h.seifert_edges) seifert_edge_ids.push_back(id);
  for (const auto& id : seifert_edge_ids) {
    auto it = h.signs.find(id);
    if (h.needs_sign(id)) {
      if (it == h.signs.end()) r.add("edge " + id, "sign", "sign label missing");
      else if (it->second != 1 && it->second != -1) r.add("edge " + id, "sign", "sign is not +1 or -1");
    } else if (it != h.signs.end()) {
      r.add("edge " + id, "sign", "sign label on an edge at a type n vertex");
    }
  }
  for (const auto& [id, _] : g.edges) {
    if (h.signs.count(id)) r.add("edge " + id, "sign", "sign label on an edge between hyperbolic vertices");
  }
  return r;
}

HGraph flip_signs_at(const HGraph& h, const std::string& seifert_vertex) {
  auto it = h.seifert.find(seifert_vertex);
  if (it == h.seifert.end()) throw UnknownVertex("no Seifert vertex '" + seifert_vertex + "'");
  if (it->second.type != FiberType::O) throw InvalidTarget("vertex '" + seifert_vertex + "' is not type o");
  HGraph out = h;
  for (const auto& [id, s] : h.slopes) {
    if (s.seifert == seifert_vertex && out.signs.count(id)) out.signs[id] = -out.signs[id];
  }
  for (const auto& [id, e] : h.seifert_edges) {
    if (!e.is_loop() && (e.a == seifert_vertex || e.b == seifert_vertex) && out.signs.count(id)) {
      out.signs[id] = -out.signs[id];
    }
  }
  return out;
}

HGraph negate_slope(const HGraph& h, const std::string& slope_edge) {
  auto it = h.slopes.find(slope_edge);
  if (it == h.slopes.end()) throw UnknownEdge("no slope edge '" + slope_edge + "'");
  HGraph out = h;
  out.slopes[slope_edge].slope = -it->second.slope;
  if (auto s = out.signs.find(slope_edge); s != out.signs.end()) s->second = -s->second;
  return out;
}

HGraph scale_slopes(const HGraph& h, const std::string& seifert_vertex, const Rational& factor) {
  if (!h.seifert.count(seifert_vertex)) throw UnknownVertex("no Seifert vertex '" + seifert_vertex + "'");
  if (factor.sign() <= 0) throw InvalidTarget("slope scale " + factor.str() + " is not positive");
  HGraph out = h;
  for (auto& [_, s] : out.slopes) {
    if (s.seifert == seifert_vertex) s.slope = factor * s.slope;
  }
  return out;
}

HGraph h_canonical_moves(const HGraph& h) {
  HGraph out = h;
  for (auto& [id, s] : out.slopes) {
    if (!canonical_direction(s.slope)) {
      s.slope = -s.slope;
      if (auto it = out.signs.find(id); it != out.signs.end()) it->second = -it->second;
    }
  }
  std::map<std::string, Rational> factor;
  for (const auto& [id, s] : out.slopes) {
    if (factor.count(s.seifert)) continue;  // ids are visited in order, so the first is the least
    const Vec2 p = primitive_on_ray(s.slope, slope_cusp(out, s).lattice);
    factor[s.seifert] = *ratio(p, s.slope);
  }
  for (auto& [_, s] : out.slopes) s.slope = factor.at(s.seifert) * s.slope;

  // Gauge the signs: vertex "" stands for all hyperbolic vertices at once.
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> adj;  // vertex -> (edge, other end)
  for (const auto& [id, s] : out.slopes) {
    if (!out.signs.count(id)) continue;
    adj[""].emplace_back(id, s.seifert);
    adj[s.seifert].emplace_back(id, "");
  }
  for (const auto& [id, e] : out.seifert_edges) {
    if (!out.signs.count(id) || e.is_loop()) continue;
    adj[e.a].emplace_back(id, e.b);
    adj[e.b].emplace_back(id, e.a);
  }
  for (auto& [_, list] : adj) std::sort(list.begin(), list.end());
  std::map<std::string, bool> flip;
  std::vector<std::string> roots{""};
  for (const auto& [w, sv] : out.seifert) {
    if (sv.type == FiberType::O) roots.push_back(w);
  }
  for (const auto& root : roots) {
    if (flip.count(root)) continue;
    flip[root] = false;
    std::deque<std::string> queue{root};
    while (!queue.empty()) {
      const std::string u = queue.front();
      queue.pop_front();
      for (const auto& [id, w] : adj[u]) {
        if (flip.count(w)) continue;
        flip[w] = flip[u] != (out.signs.at(id) == -1);
        queue.push_back(w);
      }
    }
  }
  auto flipped = [&](const std::string& w) { return flip.count(w) && flip.at(w); };
  for (const auto& [id, s] : out.slopes) {
    if (out.signs.count(id) && flipped(s.seifert)) out.signs[id] = -out.signs[id];
  }
  for (const auto& [id, e] : out.seifert_edges) {
    if (out.signs.count(id) && !e.is_loop() && flipped(e.a) != flipped(e.b)) out.signs[id] = -out.signs[id];
  }
  return out;
}

HMorphism identity_h_morphism(const HGraph& h) {
  HMorphism m;
  m.hyperbolic = identity_morphism(h.hyperbolic);
  for (const auto& [w, _] : h.seifert) m.seifert_map[w] = w;
  for (const auto& [id, _] : h.slopes) m.slope_map[id] = id;
  for (const auto& [id, _] : h.seifert_edges) m.seifert_edge_map[id] = {id, false};
  return m;
}

HMorphism compose_h_morphisms(const HMorphism& first, const HMorphism& second) {
  HMorphism out;
  out.hyperbolic = compose_morphisms(first.hyperbolic, second.hyperbolic);
  for (const auto& [w, x] : first.seifert_map) out.seifert_map[w] = second.seifert_map.at(x);
  for (const auto& [e, x] : first.slope_map) out.slope_map[e] = second.slope_map.at(x);
  for (const auto& [e, d] : first.seifert_edge_map) {
    const DirectedEdge img = second.seifert_edge_map.at(d.edge);
    out.seifert_edge_map[e] = d.reversed ? img.flipped() : img;
  }
  return out;
}

Report verify_h_morphism(const HGraph& src, const HGraph& dst, const HMorphism& m) {
  Report r = verify_morphism(src.hyperbolic, dst.hyperbolic, m.hyperbolic);

  for (const auto& [w, sv] : src.seifert) {
    const std::string where = "vertex " + w;
    auto it = m.seifert_map.find(w);
    if (it == m.seifert_map.end() || !dst.seifert.count(it->second)) {
      r.add(where, "vertex_map", it == m.seifert_map.end() ? "no image" : "image '" + it->second + "' not in target");
      continue;
    }
    const SeifertVertex& img = dst.seifert.at(it->second);
    if (img.color != sv.color) r.add(where, "color", to_string(sv.color) + " maps to " + to_string(img.color));
    if (sv.type == FiberType::N && img.type != FiberType::N) r.add(where, "type", "type n maps to type o");
  }
  for (const auto& [w, _] : m.seifert_map) {
    if (!src.seifert.count(w)) r.add("vertex " + w, "vertex_map", "not a source Seifert vertex");
  }
  if (!r.ok()) return r;

  // Slope edges.  lambda[e] is the factor with image slope = lambda * psi(slope).
  std::map<std::string, Rational> lambda;
  std::map<std::string, Rational> vertex_scale;
  for (const auto& [id, s] : src.slopes) {
    const std::string where = "edge " + id;
    auto it = m.slope_map.find(id);
    if (it == m.slope_map.end() || !dst.slopes.count(it->second)) {
      r.add(where, "edge_map", it == m.slope_map.end() ? "no image" : "image '" + it->second + "' not in target");
      continue;
    }
    const SlopeEdge& img = dst.slopes.at(it->second);
    auto vm = m.hyperbolic.vertex_map.find(s.vertex);
    if (vm == m.hyperbolic.vertex_map.end() || vm->second != img.vertex || m.seifert_map.at(s.seifert) != img.seifert) {
      r.add(where, "homomorphism", "image '" + img.id + "' does not join the images of the ends");
      continue;
    }
    CoveringEntry cov;
    try {
      cov = resolve_covering(src.hyperbolic, dst.hyperbolic, m.hyperbolic.vertex_coverings.at(s.vertex));
    } catch (const std::exception&) {
      continue;  // already reported by the hyperbolic check
    }
    const CuspAssignment* a = cov.for_source(s.cusp);
    if (a == nullptr || a->target_cusp != img.cusp) {
      r.add(where, "cusps", "cusp '" + s.cusp + "' does not map to '" + img.cusp + "'");
      continue;
    }
    auto q = ratio(img.slope, a->psi * s.slope);
    if (!q) {
      r.add(where, "slope", "pushed slope is not parallel to the image slope");
      continue;
    }
    lambda[id] = *q;
    auto [vs, fresh] = vertex_scale.emplace(s.seifert, q->abs());
    if (!fresh && vs->second != q->abs()) {
      r.add(where, "slope", "slope scale " + q->abs().str() + " differs from " + vs->second.str() +
                                " elsewhere at vertex '" + s.seifert + "'");
    }
  }
  for (const auto& [id, _] : m.slope_map) {
    if (!src.slopes.count(id)) r.add("edge " + id, "edge_map", "not a source slope edge");
  }

  for (const auto& [id, e] : src.seifert_edges) {
    const std::string where = "edge " + id;
    auto it = m.seifert_edge_map.find(id);
    if (it == m.seifert_edge_map.end() || !dst.seifert_edges.count(it->second.edge)) {
      r.add(where, "edge_map", it == m.seifert_edge_map.end() ? "no image" : "image '" + it->second.edge + "' not in target");
      continue;
    }
    const SeifertEdge& img = dst.seifert_edges.at(it->second.edge);
    const auto ends = it->second.reversed ? std::pair{img.b, img.a} : std::pair{img.a, img.b};
    if (ends != std::pair{m.seifert_map.at(e.a), m.seifert_map.at(e.b)}) {
      r.add(where, "homomorphism", "image '" + it->second.str() + "' does not join the images of the ends");
      continue;
    }
    if (e.degree == 2 && img.degree != 2) r.add(where, "degree", "degree 2 edge maps to a degree 1 edge");
  }
  for (const auto& [id, _] : m.seifert_edge_map) {
    if (!src.seifert_edges.count(id)) r.add("edge " + id, "edge_map", "not a source Seifert edge");
  }
  if (!r.ok()) return r;

  // Openness: each vertex star maps onto the star of the image vertex.
  auto image_id = [&](const std::string& id) -> std::string {
    if (auto it = m.slope_map.find(id); it != m.slope_map.end()) return it->second;
    if (auto it = m.seifert_edge_map.find(id); it != m.seifert_edge_map.end()) return it->second.edge;
    return m.hyperbolic.edge_map.at(id).edge;
  };
  {
    const auto src_star = seifert_star(src);
    const auto dst_star = seifert_star(dst);
    for (const auto& [w, ids] : src_star) {
      std::set<std::string> hit;
      for (const auto& id : ids) hit.insert(image_id(id));
      const auto& want = dst_star.at(m.seifert_map.at(w));
      if (hit != std::set<std::string>(want.begin(), want.end())) {
        r.add("vertex " + w, "open", "edges do not map onto the edges at '" + m.seifert_map.at(w) + "'");
      }
    }
    const auto src_hstar = hyperbolic_star(src);
    const auto dst_hstar = hyperbolic_star(dst);
    for (const auto& [v, ids] : src_hstar) {
      std::set<std::string> hit;
      for (const auto& id : ids) hit.insert(image_id(id));
      if (hit != dst_hstar.at(m.hyperbolic.vertex_map.at(v))) {
        r.add("vertex " + v, "open", "edges do not map onto the edges at '" + m.hyperbolic.vertex_map.at(v) + "'");
      }
    }
  }

  auto effective_sign = [&](const std::string& id) {
    const int s = src.sign(id);
    auto it = lambda.find(id);
    return it != lambda.end() && it->second.sign() < 0 ? -s : s;
  };

  // Signs: some choice of fiber orientation reversals at the source type o
  // vertices must carry every source sign to its image sign.
  {
    std::map<std::string, std::size_t> var;
    for (const auto& [w, sv] : src.seifert) {
      if (sv.type == FiberType::O) var.emplace(w, var.size());
    }
    Gf2System sys(var.size());
    std::vector<std::string> involved;
    auto add = [&](const std::string& id, const std::string& img, std::vector<std::size_t> vars) {
      if (!src.signs.count(id) || !dst.signs.count(img)) return;
      sys.add(std::move(vars), effective_sign(id) != dst.signs.at(img));
      involved.push_back(id);
    };
    for (const auto& [id, s] : src.slopes) {
      if (var.count(s.seifert)) add(id, m.slope_map.at(id), {var.at(s.seifert)});
    }
    for (const auto& [id, e] : src.seifert_edges) {
      if (!var.count(e.a) || !var.count(e.b)) continue;
      add(id, m.seifert_edge_map.at(id).edge, {var.at(e.a), var.at(e.b)});
    }
    if (!sys.solve()) {
      std::string list;
      for (const auto& id : involved) list += (list.empty() ? "" : ",") + id;
      r.add("graph", "sign", "no orientation choice carries the signs of edges " + list + " to their images");
    }
  }

  // A type o vertex over a type n vertex needs, over every edge there,
  // preimages of both signs or a preimage touching a type n vertex.
  {
    std::map<std::string, std::vector<std::string>> preimages;
    for (const auto& [id, _] : src.slopes) preimages[image_id(id)].push_back(id);
    for (const auto& [id, _] : src.seifert_edges) preimages[image_id(id)].push_back(id);
    auto touches_n = [&](const std::string& id) {
      std::vector<std::string> ends;
      if (auto it = src.slopes.find(id); it != src.slopes.end()) ends = {it->second.seifert};
      else ends = {src.seifert_edges.at(id).a, src.seifert_edges.at(id).b};
      for (const auto& w : ends) {
        if (src.seifert.at(w).type == FiberType::N) return true;
      }
      return false;
    };
    const auto dst_star = seifert_star(dst);
    std::set<std::string> checked;
    for (const auto& [w, sv] : src.seifert) {
      const std::string& img = m.seifert_map.at(w);
      if (sv.type != FiberType::O || dst.seifert.at(img).type != FiberType::N || !checked.insert(img).second) continue;
      for (const auto& e : dst_star.at(img)) {
        bool ok = false;
        std::set<int> seen;
        for (const auto& id : preimages[e]) {
          if (touches_n(id)) ok = true;
          if (src.signs.count(id)) seen.insert(effective_sign(id));
        }
        if (!ok && seen.size() < 2) {
          r.add("vertex " + w, "o_to_n", "type o vertex maps to type n vertex '" + img + "' but the preimages of '" +
                                             e + "' have one sign and no type n end");
        }
      }
    }
  }
  return r;
}

namespace {

struct HPlan {
  std::map<std::string, std::string> hyp_block;
  std::map<std::string, std::string> hyp_cover;
  std::map<std::string, std::string> seifert_block;
  std::map<std::string, Rational> kappa;  ///< per source Seifert vertex; 1 when absent
  std::set<std::string> promoted;         ///< Seifert blocks forced to type n
  bool merge_parallel = true;             ///< identify Seifert edges with equal ends and degree
};

struct BuildResult {
  std::optional<HQuotient> quotient;
  bool sign_conflict = false;
  std::string why;
};

BuildResult build_quotient(const HGraph& h, const HPlan& plan) {
  BuildResult res;
  std::string why;
  auto hq = quotient_by(h.hyperbolic, plan.hyp_block, plan.hyp_cover, &why, false);
  if (!hq) {
    res.why = why;
    return res;
  }
  HQuotient q;
  q.graph.hyperbolic = std::move(hq->graph);
  q.morphism.hyperbolic = std::move(hq->morphism);

  for (const auto& [w, sv] : h.seifert) {
    const std::string& b = plan.seifert_block.at(w);
    auto [it, fresh] = q.graph.seifert.emplace(b, sv);
    if (!fresh) {
      if (it->second.color != sv.color) {
        res.why = "Seifert block '" + b + "' mixes colors";
        return res;
      }
      if (sv.type == FiberType::N) it->second.type = FiberType::N;
    }
    q.morphism.seifert_map[w] = b;
  }
  for (const auto& b : plan.promoted) q.graph.seifert.at(b).type = FiberType::N;

  std::map<std::string, CoveringEntry> covs;
  for (const auto& [v, c] : plan.hyp_cover) covs[v] = h.hyperbolic.catalog->covering(c);
  auto kappa = [&](const std::string& w) {
    auto it = plan.kappa.find(w);
    return it == plan.kappa.end() ? Rational(1) : it->second;
  };

  std::map<std::pair<std::string, std::string>, std::string> slope_owner;
  for (const auto& [id, s] : h.slopes) {
    const CuspAssignment* a = covs.at(s.vertex).for_source(s.cusp);
    if (a == nullptr) {
      res.why = "slope edge '" + id + "' sits at a cusp outside its covering";
      return res;
    }
    const std::pair key{plan.hyp_block.at(s.vertex), a->target_cusp};
    const std::string& wb = plan.seifert_block.at(s.seifert);
    auto [it, fresh] = slope_owner.emplace(key, id);
    if (fresh) {
      q.graph.slopes[id] = {id, key.first, key.second, wb, kappa(s.seifert) * (a->psi * s.slope)};
    } else if (q.graph.slopes.at(it->second).seifert != wb) {
      res.why = "slope edges '" + it->second + "' and '" + id + "' share a cusp image but not a Seifert image";
      return res;
    }
    q.morphism.slope_map[id] = it->second;
  }

  std::map<std::tuple<std::string, std::string, int>, std::string> edge_owner;
  for (const auto& [id, e] : h.seifert_edges) {
    const std::string& a = plan.seifert_block.at(e.a);
    const std::string& b = plan.seifert_block.at(e.b);
    const auto key = plan.merge_parallel ? std::tuple{std::min(a, b), std::max(a, b), e.degree}
                                         : std::tuple{id, std::string(), 0};
    auto [it, fresh] = edge_owner.emplace(key, id);
    if (fresh) q.graph.seifert_edges[id] = {id, a, b, e.degree};
    const SeifertEdge& img = q.graph.seifert_edges.at(it->second);
    q.morphism.seifert_edge_map[id] = {it->second, a != b && img.a == b};
  }

  // Image signs: unknowns next to the orientation reversals of source vertices.
  std::map<std::string, std::size_t> var;
  for (const auto& [w, sv] : h.seifert) {
    if (sv.type == FiberType::O) var.emplace(w, var.size());
  }
  std::vector<std::string> signed_images;
  for (const auto& [id, _] : q.graph.slopes) {
    if (q.graph.needs_sign(id)) signed_images.push_back(id);
  }
  for (const auto& [id, _] : q.graph.seifert_edges) {
    if (q.graph.needs_sign(id)) signed_images.push_back(id);
  }
  for (const auto& id : signed_images) var.emplace("#" + id, var.size());
  Gf2System sys(var.size());
  for (const auto& [id, s] : h.slopes) {
    const std::string& img = q.morphism.slope_map.at(id);
    if (!h.signs.count(id) || !q.graph.needs_sign(img)) continue;
    const CuspAssignment* a = covs.at(s.vertex).for_source(s.cusp);
    auto lam = ratio(q.graph.slopes.at(img).slope, a->psi * s.slope);
    if (!lam) {
      res.why = "slope edge '" + id + "' is not parallel to its image";
      return res;
    }
    sys.add({var.at(s.seifert), var.at("#" + img)}, (h.signs.at(id) * lam->sign()) == -1);
  }
  for (const auto& [id, e] : h.seifert_edges) {
    const std::string& img = q.morphism.seifert_edge_map.at(id).edge;
    if (!h.signs.count(id) || !q.graph.needs_sign(img)) continue;
    std::vector<std::size_t> vars{var.at("#" + img)};
    if (!e.is_loop()) {
      vars.push_back(var.at(e.a));
      vars.push_back(var.at(e.b));
    }
    sys.add(std::move(vars), h.signs.at(id) == -1);
  }
  auto solution = sys.solve();
  if (!solution) {
    res.sign_conflict = true;
    res.why = "signs admit no consistent image";
    return res;
  }
  for (const auto& id : signed_images) q.graph.signs[id] = (*solution)[var.at("#" + id)] ? -1 : 1;

  const Report valid = validate_h(q.graph);
  if (!valid.ok()) {
    res.why = "quotient is not a valid H-graph:\n" + valid.str();
    return res;
  }
  const Report verified = verify_h_morphism(h, q.graph, q.morphism);
  if (!verified.ok()) {
    res.why = "quotient morphism does not verify:\n" + verified.str();
    return res;
  }
  res.quotient = std::move(q);
  return res;
}

HPlan identity_plan(const HGraph& h) {
  HPlan p;
  for (const auto& [v, orb] : h.hyperbolic.vertices) {
    p.hyp_block[v] = v;
    p.hyp_cover[v] = identity_covering_id(orb);
  }
  for (const auto& [w, _] : h.seifert) p.seifert_block[w] = w;
  return p;
}

// Coarsest stable partition of both vertex kinds.  Fills the blocks of
// `plan` (least member names each block) and the per-vertex slope
// normalization.
void refine(const HGraph& h, HPlan& plan) {
  const NahGraph& g = h.hyperbolic;
  std::map<std::string, std::string> key;
  for (const auto& [v, orb] : g.vertices) key[v] = "H" + orb;
  for (const auto& [w, sv] : h.seifert) key[w] = "S" + to_string(sv.color) + to_string(sv.type);
  std::map<std::pair<std::string, std::string>, DirectedEdge> ports;
  for (const auto& [id, e] : g.edges) {
    ports.emplace(std::pair{e.head, e.head_cusp}, DirectedEdge{id, false});
    ports.emplace(std::pair{e.tail, e.tail_cusp}, DirectedEdge{id, true});
  }
  std::map<std::pair<std::string, std::string>, std::string> slope_at;
  for (const auto& [id, s] : h.slopes) slope_at[{s.vertex, s.cusp}] = id;
  const auto star = seifert_star(h);

  std::map<std::string, std::size_t> block;
  std::size_t count = 0;
  auto renumber = [&](const std::map<std::string, std::string>& sig) {
    std::map<std::string, std::size_t> numbering;
    for (const auto& [_, s] : sig) numbering.emplace(s, 0);
    std::size_t i = 0;
    for (auto& [_, idx] : numbering) idx = i++;
    for (const auto& [v, s] : sig) block[v] = numbering.at(s);
    return numbering.size();
  };
  count = renumber(key);

  std::map<std::string, Rational> kappa;
  while (true) {
    kappa.clear();
    for (const auto& [w, ids] : star) {
      std::optional<std::tuple<std::size_t, std::string, Vec2, Rational>> least;
      for (const auto& id : ids) {
        auto it = h.slopes.find(id);
        if (it == h.slopes.end()) continue;
        const SlopeEdge& s = it->second;
        const Vec2 p = primitive_on_ray(s.slope, slope_cusp(h, s).lattice);
        std::tuple cand{block.at(s.vertex), s.cusp, p, *ratio(s.slope, p)};
        if (!least || cand < *least) least = cand;
      }
      kappa[w] = least ? std::get<3>(*least).inverse() : Rational(1);
    }
    std::map<std::string, std::string> sig;
    for (const auto& [v, orb] : g.vertices) {
      std::string s = std::to_string(block.at(v)) + "{";
      for (const auto& c : g.orbifold_of(v).cusps) {
        s += c.id + ":";
        if (auto it = ports.find({v, c.id}); it != ports.end()) {
          const DirectedEdge& d = it->second;
          s += "h" + std::to_string(block.at(g.tail(d))) + "." + g.tail_cusp(d) + "=" +
               coset_canonical(g.label(d), c.symmetry).str();
        } else if (auto sl = slope_at.find({v, c.id}); sl != slope_at.end()) {
          const SlopeEdge& se = h.slopes.at(sl->second);
          const Vec2 n = kappa.at(se.seifert) * se.slope;
          s += "s" + std::to_string(block.at(se.seifert)) + "=" + n.x.str() + "," + n.y.str();
        }
        s += ";";
      }
      sig[v] = s + "}";
    }
    for (const auto& [w, ids] : star) {
      std::set<std::string> entries;
      for (const auto& id : ids) {
        if (auto it = h.slopes.find(id); it != h.slopes.end()) {
          const SlopeEdge& se = it->second;
          const Vec2 n = kappa.at(w) * se.slope;
          entries.insert("s" + std::to_string(block.at(se.vertex)) + "." + se.cusp + "=" + n.x.str() + "," + n.y.str());
        } else {
          const SeifertEdge& e = h.seifert_edges.at(id);
          const std::string& far = e.a == w ? e.b : e.a;
          entries.insert("t" + std::to_string(block.at(far)) + "." + std::to_string(e.degree));
        }
      }
      std::string s = std::to_string(block.at(w)) + "{";
      for (const auto& x : entries) s += x + ";";
      sig[w] = s + "}";
    }
    const std::size_t next = renumber(sig);
    if (next == count) break;
    count = next;
  }

  std::map<std::size_t, std::string> leader;
  for (const auto& [v, b] : block) leader.emplace(b, v);  // map order: least id first
  for (const auto& [v, orb] : g.vertices) {
    plan.hyp_block[v] = leader.at(block.at(v));
    plan.hyp_cover[v] = identity_covering_id(orb);
  }
  for (const auto& [w, _] : h.seifert) plan.seifert_block[w] = leader.at(block.at(w));
  plan.kappa = std::move(kappa);
}

std::size_t size_of(const HGraph& h) {
  return h.hyperbolic.vertices.size() + h.seifert.size() + h.hyperbolic.edges.size() + h.slopes.size() +
         h.seifert_edges.size();
}

std::optional<HQuotient> quotient_with_promotions(const HGraph& h, HPlan plan) {
  BuildResult first = build_quotient(h, plan);
  if (first.quotient || !first.sign_conflict) return std::move(first.quotient);
  std::map<std::string, std::size_t> members;
  for (const auto& [w, b] : plan.seifert_block) {
    if (h.seifert.at(w).type == FiberType::O) ++members[b];
  }
  std::vector<std::pair<std::size_t, std::string>> order;
  for (const auto& [b, n] : members) {
    bool all_o = true;
    for (const auto& [w, bb] : plan.seifert_block) all_o = all_o && (bb != b || h.seifert.at(w).type == FiberType::O);
    if (all_o) order.emplace_back(n, b);
  }
  std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  for (const auto& [_, b] : order) {
    HPlan p = plan;
    p.promoted.insert(b);
    BuildResult res = build_quotient(h, p);
    if (res.quotient) return std::move(res.quotient);
  }
  return std::nullopt;
}

}  // namespace

HQuotient minimize_h(const HGraph& h) {
  if (h.is_seifert_free()) {
    Quotient q = minimize(h.hyperbolic);
    HQuotient out{from_nah(q.graph), {}};
    out.morphism.hyperbolic = std::move(q.morphism);
    return out;
  }
  const HGraph start = h_canonical_moves(h);
  HQuotient cur{start, identity_h_morphism(start)};
  auto advance = [&cur](HQuotient next) {
    cur.morphism = compose_h_morphisms(cur.morphism, next.morphism);
    cur.graph = h_canonical_moves(next.graph);
  };

  {
    HPlan plan = identity_plan(cur.graph);
    plan.merge_parallel = false;
    for (const auto& [v, orb] : cur.graph.hyperbolic.vertices) {
      const OrbifoldEntry& entry = cur.graph.hyperbolic.catalog->orbifold(orb);
      plan.hyp_cover[v] = minimal_quotient_of(*cur.graph.hyperbolic.catalog, orb, entry.own_degrees()).id;
    }
    BuildResult res = build_quotient(cur.graph, plan);
    if (!res.quotient) throw InvalidGraph("label normalization failed: " + res.why);
    advance(std::move(*res.quotient));
  }

  constexpr int kMaxRounds = 16;
  for (int round = 0; round < kMaxRounds; ++round) {
    HPlan plan;
    refine(cur.graph, plan);
    auto q = quotient_with_promotions(cur.graph, plan);
    if (!q || size_of(q->graph) == size_of(cur.graph)) break;
    advance(std::move(*q));
  }
  return cur;
}

std::optional<HMorphism> find_h_isomorphism(const HGraph& a, const HGraph& b) {
  if (a.hyperbolic.vertices.size() != b.hyperbolic.vertices.size() || a.seifert.size() != b.seifert.size() ||
      a.hyperbolic.edges.size() != b.hyperbolic.edges.size() || a.slopes.size() != b.slopes.size() ||
      a.seifert_edges.size() != b.seifert_edges.size()) {
    return std::nullopt;
  }
  // Neighbour lists with a description of each connection.
  using Link = std::pair<std::string, std::string>;  // (other vertex, connection descriptor)
  auto links_of = [](const HGraph& h) {
    std::map<std::string, std::multiset<Link>> out;
    for (const auto& [v, _] : h.hyperbolic.vertices) out[v];
    for (const auto& [w, _] : h.seifert) out[w];
    for (const auto& [_, e] : h.hyperbolic.edges) {
      out[e.head].insert({e.tail, "h" + e.head_cusp + ">" + e.tail_cusp});
      if (!e.self_paired()) out[e.tail].insert({e.head, "h" + e.tail_cusp + ">" + e.head_cusp});
    }
    for (const auto& [_, s] : h.slopes) {
      out[s.vertex].insert({s.seifert, "s" + s.cusp});
      out[s.seifert].insert({s.vertex, "S" + s.cusp});
    }
    for (const auto& [_, e] : h.seifert_edges) {
      out[e.a].insert({e.b, "t" + std::to_string(e.degree)});
      if (!e.is_loop()) out[e.b].insert({e.a, "t" + std::to_string(e.degree)});
    }
    return out;
  };
  const auto la = links_of(a);
  const auto lb = links_of(b);
  auto vertex_key = [](const HGraph& h, const std::map<std::string, std::multiset<Link>>& links, const std::string& v) {
    std::string k;
    if (auto it = h.hyperbolic.vertices.find(v); it != h.hyperbolic.vertices.end()) k = "H" + it->second;
    else k = "S" + to_string(h.seifert.at(v).color) + to_string(h.seifert.at(v).type);
    std::multiset<std::string> descs;
    for (const auto& [_, d] : links.at(v)) descs.insert(d);
    for (const auto& d : descs) k += "|" + d;
    return k;
  };

  // Search order: breadth first through a.
  std::vector<std::string> order;
  {
    std::set<std::string> seen;
    for (const auto& [root, _] : la) {
      if (!seen.insert(root).second) continue;
      std::deque<std::string> queue{root};
      while (!queue.empty()) {
        const std::string v = queue.front();
        queue.pop_front();
        order.push_back(v);
        for (const auto& [w, _] : la.at(v)) {
          if (seen.insert(w).second) queue.push_back(w);
        }
      }
    }
  }
  std::map<std::string, std::string> bkeys;
  for (const auto& [v, _] : lb) bkeys[v] = vertex_key(b, lb, v);

  std::map<std::string, std::string> phi;
  std::set<std::string> used;
  std::optional<HMorphism> found;

  auto links_between = [](const std::multiset<Link>& links, const std::string& other) {
    std::multiset<std::string> out;
    for (const auto& [w, d] : links) {
      if (w == other) out.insert(d);
    }
    return out;
  };

  // With the vertex bijection fixed, match edges and compare labels.
  auto try_edges = [&]() -> std::optional<HMorphism> {
    HMorphism m;
    for (const auto& [v, orb] : a.hyperbolic.vertices) {
      m.hyperbolic.vertex_map[v] = phi.at(v);
      m.hyperbolic.vertex_coverings[v] = identity_covering_id(orb);
    }
    for (const auto& [w, _] : a.seifert) m.seifert_map[w] = phi.at(w);
    std::map<std::pair<std::string, std::string>, DirectedEdge> bports;
    for (const auto& [id, e] : b.hyperbolic.edges) {
      bports.emplace(std::pair{e.head, e.head_cusp}, DirectedEdge{id, false});
      bports.emplace(std::pair{e.tail, e.tail_cusp}, DirectedEdge{id, true});
    }
    for (const auto& [id, e] : a.hyperbolic.edges) {
      auto it = bports.find({phi.at(e.head), e.head_cusp});
      if (it == bports.end()) return std::nullopt;
      m.hyperbolic.edge_map[id] = it->second;
    }
    std::map<std::pair<std::string, std::string>, std::string> bslopes;
    for (const auto& [id, s] : b.slopes) bslopes[{s.vertex, s.cusp}] = id;
    for (const auto& [id, s] : a.slopes) {
      auto it = bslopes.find({phi.at(s.vertex), s.cusp});
      if (it == bslopes.end()) return std::nullopt;
      m.slope_map[id] = it->second;
    }
    if (!verify_morphism(a.hyperbolic, b.hyperbolic, m.hyperbolic).ok()) return std::nullopt;

    // Parallel Seifert edges may match in any order.
    using GroupKey = std::tuple<std::string, std::string, int>;
    std::map<GroupKey, std::vector<std::string>> agroups;
    std::map<GroupKey, std::vector<std::string>> bgroups;
    for (const auto& [id, e] : a.seifert_edges) {
      const std::string x = phi.at(e.a);
      const std::string y = phi.at(e.b);
      agroups[{std::min(x, y), std::max(x, y), e.degree}].push_back(id);
    }
    for (const auto& [id, e] : b.seifert_edges) {
      bgroups[{std::min(e.a, e.b), std::max(e.a, e.b), e.degree}].push_back(id);
    }
    if (agroups.size() != bgroups.size()) return std::nullopt;
    std::vector<GroupKey> keys;
    for (const auto& [k, ids] : agroups) {
      auto it = bgroups.find(k);
      if (it == bgroups.end() || it->second.size() != ids.size()) return std::nullopt;
      std::sort(it->second.begin(), it->second.end());
      keys.push_back(k);
    }
    const HGraph canon_b = h_canonical_moves(b);
    std::optional<HMorphism> result;
    std::function<bool(std::size_t)> assign = [&](std::size_t k) -> bool {
      if (k == keys.size()) {
        HGraph t = b;
        for (const auto& [id, img] : m.slope_map) {
          t.slopes.at(img).slope = a.slopes.at(id).slope;
          if (a.signs.count(id)) t.signs[img] = a.signs.at(id);
        }
        for (const auto& [id, d] : m.seifert_edge_map) {
          if (a.signs.count(id)) t.signs[d.edge] = a.signs.at(id);
        }
        const HGraph ct = h_canonical_moves(t);
        if (ct.slopes != canon_b.slopes || ct.signs != canon_b.signs) return false;
        result = m;
        return true;
      }
      const auto& as = agroups.at(keys[k]);
      std::vector<std::string> perm = bgroups.at(keys[k]);
      do {
        for (std::size_t i = 0; i < as.size(); ++i) {
          const SeifertEdge& e = a.seifert_edges.at(as[i]);
          const SeifertEdge& f = b.seifert_edges.at(perm[i]);
          m.seifert_edge_map[as[i]] = {perm[i], !(phi.at(e.a) == f.a && phi.at(e.b) == f.b)};
        }
        if (assign(k + 1)) return true;
      } while (std::next_permutation(perm.begin(), perm.end()));
      return false;
    };
    if (!assign(0)) return std::nullopt;
    return result;
  };

  std::function<bool(std::size_t)> search = [&](std::size_t i) -> bool {
    if (i == order.size()) {
      found = try_edges();
      return found.has_value();
    }
    const std::string& v = order[i];
    const std::string key = vertex_key(a, la, v);
    for (const auto& [w, wk] : bkeys) {
      if (used.count(w) || wk != key) continue;
      bool ok = true;
      for (const auto& [u, _] : la.at(v)) {
        auto it = phi.find(u);
        if (it == phi.end() && u != v) continue;
        const std::string& img = u == v ? w : it->second;
        if (links_between(la.at(v), u) != links_between(lb.at(w), img)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      phi[v] = w;
      used.insert(w);
      if (search(i + 1)) return true;
      phi.erase(v);
      used.erase(w);
    }
    return false;
  };
  search(0);
  return found;
}

bool h_isomorphic(const HGraph& a, const HGraph& b) { return find_h_isomorphism(a, b).has_value(); }

}  // namespace qigraph
