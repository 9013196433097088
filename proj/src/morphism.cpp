#include "qigraph/morphism.hpp"

#include "qigraph/error.hpp"

namespace qigraph {

namespace {

bool is_identity_id(const std::string& id) {
  return id.rfind("id(", 0) == 0 && id.back() == ')' && id.find(';') == std::string::npos;
}

}  // namespace

DirectedEdge GraphMorphism::image(const DirectedEdge& d) const {
  auto it = edge_map.find(d.edge);
  if (it == edge_map.end()) throw UnknownEdge("edge '" + d.edge + "' has no image");
  return d.reversed ? it->second.flipped() : it->second;
}

GraphMorphism identity_morphism(const NahGraph& g) {
  GraphMorphism m;
  for (const auto& [v, orb] : g.vertices) {
    m.vertex_map[v] = v;
    m.vertex_coverings[v] = identity_covering_id(orb);
  }
  for (const auto& [id, _] : g.edges) m.edge_map[id] = {id, false};
  return m;
}

std::string compose_covering_ids(const std::string& first, const std::string& second) {
  if (is_identity_id(second)) return first;
  if (is_identity_id(first)) return second;
  return first + ";" + second;
}

GraphMorphism compose_morphisms(const GraphMorphism& first, const GraphMorphism& second) {
  GraphMorphism out;
  for (const auto& [v, w] : first.vertex_map) {
    auto it = second.vertex_map.find(w);
    if (it == second.vertex_map.end()) throw UnknownVertex("vertex '" + w + "' has no image");
    out.vertex_map[v] = it->second;
    auto c1 = first.vertex_coverings.find(v);
    auto c2 = second.vertex_coverings.find(w);
    if (c1 == first.vertex_coverings.end() || c2 == second.vertex_coverings.end()) {
      throw UnknownVertex("vertex '" + v + "' has no covering");
    }
    out.vertex_coverings[v] = compose_covering_ids(c1->second, c2->second);
  }
  for (const auto& [e, d] : first.edge_map) out.edge_map[e] = second.image(d);
  return out;
}

CoveringEntry resolve_covering(const NahGraph& src, const NahGraph& dst, const std::string& id) {
  try {
    return src.catalog->covering(id);
  } catch (const NotDeclared&) {
    if (!dst.catalog || dst.catalog == src.catalog) throw;
  } catch (const MismatchedEnds&) {
    if (!dst.catalog || dst.catalog == src.catalog) throw;
  }
  return dst.catalog->covering(id);
}

Matrix2 pushforward_edge_label(const Matrix2& l, const Matrix2& psi_head, const Matrix2& psi_tail) {
  return psi_tail * l * psi_head.inverse();
}

Report verify_morphism(const NahGraph& src, const NahGraph& dst, const GraphMorphism& m) {
  Report r;
  std::map<std::string, CoveringEntry> covs;
  for (const auto& [v, orb] : src.vertices) {
    const std::string where = "vertex " + v;
    auto vm = m.vertex_map.find(v);
    if (vm == m.vertex_map.end() || !dst.vertices.count(vm->second)) {
      r.add(where, "vertex_map", vm == m.vertex_map.end() ? "no image" : "image '" + vm->second + "' not in target");
      continue;
    }
    auto cm = m.vertex_coverings.find(v);
    if (cm == m.vertex_coverings.end()) {
      r.add(where, "covering", "no covering given");
      continue;
    }
    CoveringEntry cov;
    try {
      cov = resolve_covering(src, dst, cm->second);
    } catch (const Error& e) {
      r.add(where, "covering", e.what());
      continue;
    }
    const std::string& target = dst.vertices.at(vm->second);
    if (cov.source != orb || cov.target != target) {
      r.add(where, "covering", "covering '" + cov.id + "' runs " + cov.source + " -> " + cov.target +
                                   ", expected " + orb + " -> " + target);
      continue;
    }
    covs[v] = std::move(cov);
  }
  for (const auto& [v, _] : m.vertex_map) {
    if (!src.vertices.count(v)) r.add("vertex " + v, "vertex_map", "not a source vertex");
  }
  for (const auto& [id, _] : m.edge_map) {
    if (!src.edges.count(id)) r.add("edge " + id, "edge_map", "not a source edge");
  }

  for (const auto& [id, e] : src.edges) {
    const std::string where = "edge " + id;
    auto em = m.edge_map.find(id);
    if (em == m.edge_map.end()) {
      r.add(where, "edge_map", "no image");
      continue;
    }
    const DirectedEdge img = em->second;
    if (!dst.edges.count(img.edge)) {
      r.add(where, "edge_map", "image '" + img.str() + "' not in target");
      continue;
    }
    if (!m.vertex_map.count(e.head) || !m.vertex_map.count(e.tail)) continue;
    if (dst.head(img) != m.vertex_map.at(e.head) || dst.tail(img) != m.vertex_map.at(e.tail)) {
      r.add(where, "homomorphism", "image '" + img.str() + "' runs " + dst.head(img) + " -> " +
                                       dst.tail(img) + ", expected " + m.vertex_map.at(e.head) +
                                       " -> " + m.vertex_map.at(e.tail));
      continue;
    }
    if (!covs.count(e.head) || !covs.count(e.tail)) continue;
    const CuspAssignment* ah = covs.at(e.head).for_source(e.head_cusp);
    const CuspAssignment* at = covs.at(e.tail).for_source(e.tail_cusp);
    if (ah == nullptr || at == nullptr) {
      r.add(where, "cusps", "covering does not assign an end cusp");
      continue;
    }
    if (ah->target_cusp != dst.head_cusp(img) || at->target_cusp != dst.tail_cusp(img)) {
      r.add(where, "cusps", "end cusps map to (" + ah->target_cusp + ", " + at->target_cusp +
                                "), image edge uses (" + dst.head_cusp(img) + ", " +
                                dst.tail_cusp(img) + ")");
      continue;
    }
    const CyclicSymmetry& f = dst.cusp_spec(dst.head(img), dst.head_cusp(img)).symmetry;
    const Matrix2 pushed = pushforward_edge_label(e.label, ah->psi, at->psi);
    const Matrix2 lhs = coset_canonical(pushed, f);
    const Matrix2 rhs = coset_canonical(dst.label(img), f);
    if (lhs != rhs) {
      r.add(where, "commute", "pushed label " + lhs.str() + " differs from image label " + rhs.str());
    }
  }
  return r;
}

std::vector<BalanceTransferRow> check_balance_transfer(const NahGraph& src, const NahGraph& dst,
                                                       const GraphMorphism& m) {
  std::vector<BalanceTransferRow> rows;
  for (const auto& [id, e] : src.edges) {
    const DirectedEdge d{id, false};
    const DirectedEdge img = m.image(d);
    const CoveringEntry ch = resolve_covering(src, dst, m.vertex_coverings.at(e.head));
    const CoveringEntry ct = resolve_covering(src, dst, m.vertex_coverings.at(e.tail));
    const CuspAssignment* ah = ch.for_source(e.head_cusp);
    const CuspAssignment* at = ct.for_source(e.tail_cusp);
    if (ah == nullptr || at == nullptr) throw CoverMismatch("edge '" + id + "' end cusp not covered");
    BalanceTransferRow row;
    row.edge = id;
    row.d_head = cusp_cover_degree(ah->psi, src.cusp_spec(e.head, e.head_cusp),
                                   dst.cusp_spec(dst.head(img), dst.head_cusp(img)));
    row.d_tail = cusp_cover_degree(at->psi, src.cusp_spec(e.tail, e.tail_cusp),
                                   dst.cusp_spec(dst.tail(img), dst.tail_cusp(img)));
    row.delta_src = delta(src, d);
    row.delta_dst = delta(dst, img);
    row.holds = row.d_head * row.delta_dst == row.delta_src * row.d_tail;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace qigraph
