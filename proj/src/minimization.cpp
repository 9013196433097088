#include "qigraph/minimization.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <set>
#include <tuple>

#include "qigraph/error.hpp"

namespace qigraph {

namespace {

using Port = std::pair<std::string, std::string>;  // (vertex, cusp)

std::map<Port, DirectedEdge> port_map(const NahGraph& g) {
  std::map<Port, DirectedEdge> ports;
  for (const auto& [id, e] : g.edges) {
    ports.emplace(Port{e.head, e.head_cusp}, DirectedEdge{id, false});
    ports.emplace(Port{e.tail, e.tail_cusp}, DirectedEdge{id, true});
  }
  return ports;
}

std::vector<std::string> sorted_cusp_ids(const OrbifoldEntry& orb) {
  std::vector<std::string> ids;
  for (const auto& c : orb.cusps) ids.push_back(c.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

void set_why(std::string* why, std::string text) {
  if (why != nullptr) *why = std::move(text);
}

class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

private:
  std::vector<std::size_t> parent_;
};

// One step of pushing vertices down along proper declared coverings out of
// their (already minimal) labels.  Merged cusps force the edges at
// those cusps, and hence their far ends, to be identified; the closure of
// those identifications is computed with union-find.
std::optional<Quotient> collapse_along_coverings(const NahGraph& g) {
  std::vector<std::string> vs;
  std::map<std::string, std::size_t> index;
  for (const auto& [v, _] : g.vertices) {
    index[v] = vs.size();
    vs.push_back(v);
  }
  std::map<std::string, CoveringEntry> cov;
  bool any = false;
  for (const auto& [v, orb] : g.vertices) {
    const CoveringEntry* pick = nullptr;
    const std::size_t ncusps = g.catalog->orbifold(orb).cusps.size();
    for (const auto& [id, c] : g.catalog->coverings) {
      if (c.source == orb && c.target != orb && g.catalog->has_orbifold(c.target) &&
          (c.total_degree > 1 || g.catalog->orbifold(c.target).cusps.size() < ncusps)) {
        pick = &c;
        break;
      }
    }
    if (pick != nullptr) {
      cov[v] = *pick;
      any = true;
    } else {
      cov[v] = identity_covering(g.catalog->orbifold(orb));
    }
  }
  if (!any) return std::nullopt;

  auto image_cusp = [&](const std::string& v, const std::string& c) -> std::optional<std::string> {
    const CuspAssignment* a = cov.at(v).for_source(c);
    if (a == nullptr) return std::nullopt;
    return a->target_cusp;
  };

  const auto adj = adjacency(g);
  UnionFind uf(vs.size());
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::pair<std::size_t, std::string>, std::vector<DirectedEdge>> groups;
    for (const auto& v : vs) {
      for (const auto& d : adj.at(v)) {
        auto c = image_cusp(v, g.head_cusp(d));
        if (!c) return std::nullopt;
        groups[{uf.find(index[v]), *c}].push_back(d);
      }
    }
    for (const auto& [key, ds] : groups) {
      std::optional<std::string> far_cusp;
      for (const auto& d : ds) {
        auto c = image_cusp(g.tail(d), g.tail_cusp(d));
        if (!c || (far_cusp && *far_cusp != *c)) return std::nullopt;
        far_cusp = c;
        if (uf.unite(index[g.tail(ds.front())], index[g.tail(d)])) changed = true;
      }
    }
  }

  std::map<std::string, std::string> block_of;
  std::map<std::string, std::string> covering_of;
  for (const auto& v : vs) {
    block_of[v] = vs[uf.find(index[v])];
    covering_of[v] = cov.at(v).id;
  }
  return quotient_by(g, block_of, covering_of);
}

void serialize_from(const NahGraph& g, const std::map<Port, DirectedEdge>& ports, const std::string& root,
                    std::string& out) {
  std::map<std::string, std::size_t> index{{root, 0}};
  std::vector<std::string> order{root};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::string u = order[i];
    const OrbifoldEntry& orb = g.orbifold_of(u);
    out += "V" + std::to_string(orb.id.size()) + ":" + orb.id + "{";
    for (const auto& c : sorted_cusp_ids(orb)) {
      out += std::to_string(c.size()) + ":" + c;
      auto it = ports.find({u, c});
      if (it == ports.end()) {
        out += "-;";
        continue;
      }
      const DirectedEdge& d = it->second;
      const std::string& w = g.tail(d);
      auto [pos, fresh] = index.emplace(w, order.size());
      if (fresh) order.push_back(w);
      const CyclicSymmetry& f = g.cusp_spec(u, c).symmetry;
      const std::string& wc = g.tail_cusp(d);
      out += ">" + std::to_string(pos->second) + "." + std::to_string(wc.size()) + ":" + wc + "=" +
             coset_canonical(g.label(d), f).str() + ";";
    }
    out += "}";
  }
}

// Restricted-growth enumeration of all set partitions of {0..n-1}.
void for_each_partition(std::size_t n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> a(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int used) {
    if (i == n) {
      fn(a);
      return;
    }
    for (int b = 0; b <= used; ++b) {
      a[i] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  if (n == 0) fn(a);
  else rec(0, 0);
}

// Coverings out of `orb` worth trying in the exhaustive search.
std::vector<CoveringEntry> candidate_coverings(const Catalog& cat, const std::string& orb) {
  std::map<std::string, CoveringEntry> out;
  const OrbifoldEntry& entry = cat.orbifold(orb);
  out[identity_covering_id(orb)] = identity_covering(entry);
  for (const auto& [id, c] : cat.coverings) {
    if (c.source == orb) out[id] = c;
  }
  for (const auto& q : entry.minimal_quotients) {
    try {
      out[q.covering] = cat.covering(q.covering);
    } catch (const Error&) {
    }
  }
  std::vector<CoveringEntry> list;
  for (auto& [_, c] : out) list.push_back(std::move(c));
  return list;
}

}  // namespace

std::optional<Quotient> quotient_by(const NahGraph& g, const std::map<std::string, std::string>& block_of,
                                    const std::map<std::string, std::string>& covering_of, std::string* why,
                                    bool check) {
  std::map<std::string, CoveringEntry> covs;
  Quotient q;
  q.graph.catalog = g.catalog;
  q.graph.catalog_ref = g.catalog_ref;
  for (const auto& [v, orb] : g.vertices) {
    auto b = block_of.find(v);
    auto c = covering_of.find(v);
    if (b == block_of.end() || c == covering_of.end()) {
      set_why(why, "vertex '" + v + "' is not assigned");
      return std::nullopt;
    }
    CoveringEntry cov;
    try {
      cov = g.catalog->covering(c->second);
    } catch (const Error& e) {
      set_why(why, e.what());
      return std::nullopt;
    }
    if (cov.source != orb) {
      set_why(why, "covering '" + cov.id + "' does not start at '" + orb + "'");
      return std::nullopt;
    }
    auto [it, fresh] = q.graph.vertices.emplace(b->second, cov.target);
    if (!fresh && it->second != cov.target) {
      set_why(why, "block '" + b->second + "' gets labels '" + it->second + "' and '" + cov.target + "'");
      return std::nullopt;
    }
    q.morphism.vertex_map[v] = b->second;
    q.morphism.vertex_coverings[v] = cov.id;
    covs[v] = std::move(cov);
  }

  // (block, image cusp) -> (quotient edge, whether it is that edge's head end)
  std::map<Port, std::pair<std::string, bool>> owner;
  auto end_key = [&](const std::string& v, const std::string& c) -> std::optional<Port> {
    const CuspAssignment* a = covs.at(v).for_source(c);
    if (a == nullptr) return std::nullopt;
    return Port{block_of.at(v), a->target_cusp};
  };
  for (const auto& [id, e] : g.edges) {
    const auto k1 = end_key(e.head, e.head_cusp);
    const auto k2 = end_key(e.tail, e.tail_cusp);
    if (!k1 || !k2) {
      set_why(why, "edge '" + id + "' has an end cusp outside its covering");
      return std::nullopt;
    }
    auto o1 = owner.find(*k1);
    if (o1 != owner.end()) {
      const DirectedEdge img{o1->second.first, !o1->second.second};
      const Port far{q.graph.tail(img), q.graph.tail_cusp(img)};
      if (far != *k2) {
        set_why(why, "edge '" + id + "' and edge '" + img.edge + "' share an image end but not the other");
        return std::nullopt;
      }
      q.morphism.edge_map[id] = img;
      continue;
    }
    if (owner.count(*k2)) {
      set_why(why, "edge '" + id + "' meets an identified end at only one side");
      return std::nullopt;
    }
    const Matrix2 psi_h = covs.at(e.head).for_source(e.head_cusp)->psi;
    const Matrix2 psi_t = covs.at(e.tail).for_source(e.tail_cusp)->psi;
    const Matrix2 pushed = pushforward_edge_label(e.label, psi_h, psi_t);
    const auto& target = g.catalog->orbifold(q.graph.vertices.at(k1->first));
    const CuspSpec* hc = target.cusp(k1->second);
    Edge qe{id, k1->first, k1->second, k2->first, k2->second,
            hc != nullptr ? coset_canonical(pushed, hc->symmetry) : pushed};
    q.graph.add_edge(std::move(qe));
    owner.emplace(*k1, std::pair{id, true});
    owner.emplace(*k2, std::pair{id, false});
    q.morphism.edge_map[id] = {id, false};
  }

  if (!check) return q;
  const Report valid = validate(q.graph);
  if (!valid.ok()) {
    set_why(why, "quotient is not a valid graph:\n" + valid.str());
    return std::nullopt;
  }
  const Report verified = verify_morphism(g, q.graph, q.morphism);
  if (!verified.ok()) {
    set_why(why, "quotient morphism does not verify:\n" + verified.str());
    return std::nullopt;
  }
  return q;
}

Quotient normalize_labels(const NahGraph& g) {
  std::map<std::string, std::string> block_of;
  std::map<std::string, std::string> covering_of;
  for (const auto& [v, orb] : g.vertices) {
    block_of[v] = v;
    const OrbifoldEntry& entry = g.catalog->orbifold(orb);
    covering_of[v] = minimal_quotient_of(*g.catalog, orb, entry.own_degrees()).id;
  }
  std::string why;
  auto q = quotient_by(g, block_of, covering_of, &why);
  if (!q) throw InvalidGraph("label normalization failed: " + why);
  return std::move(*q);
}

VertexPartition stable_partition(const NahGraph& g) {
  const auto ports = port_map(g);
  std::map<std::string, std::size_t> block;
  {
    std::map<std::string, std::size_t> by_label;
    for (const auto& [_, orb] : g.vertices) by_label.emplace(orb, 0);
    std::size_t i = 0;
    for (auto& [_, idx] : by_label) idx = i++;
    for (const auto& [v, orb] : g.vertices) block[v] = by_label[orb];
  }
  std::size_t count = 0;
  for (const auto& [_, b] : block) count = std::max(count, b + 1);

  while (true) {
    using Sig = std::pair<std::size_t, std::vector<std::tuple<std::string, long, std::string, Matrix2>>>;
    std::map<std::string, Sig> sig;
    for (const auto& [v, orb] : g.vertices) {
      Sig s{block[v], {}};
      const OrbifoldEntry& entry = g.catalog->orbifold(orb);
      for (const auto& c : entry.cusps) {
        auto it = ports.find({v, c.id});
        if (it == ports.end()) {
          s.second.emplace_back(c.id, -1, "", Matrix2());
          continue;
        }
        const DirectedEdge& d = it->second;
        s.second.emplace_back(c.id, static_cast<long>(block[g.tail(d)]), g.tail_cusp(d),
                              coset_canonical(g.label(d), c.symmetry));
      }
      std::sort(s.second.begin(), s.second.end());
      sig[v] = std::move(s);
    }
    std::map<Sig, std::size_t> numbering;
    for (const auto& [_, s] : sig) numbering.emplace(s, 0);
    std::size_t i = 0;
    for (auto& [_, idx] : numbering) idx = i++;
    for (auto& [v, b] : block) b = numbering[sig[v]];
    if (numbering.size() == count) break;
    count = numbering.size();
  }

  std::map<std::size_t, std::vector<std::string>> members;
  for (const auto& [v, b] : block) members[b].push_back(v);
  VertexPartition out;
  for (auto& [_, vs] : members) out.push_back(std::move(vs));
  std::sort(out.begin(), out.end());
  return out;
}

Quotient minimize(const NahGraph& g) {
  Quotient cur{g, identity_morphism(g)};
  auto advance = [&cur](Quotient next) {
    cur.morphism = compose_morphisms(cur.morphism, next.morphism);
    cur.graph = std::move(next.graph);
  };
  constexpr int kMaxRounds = 64;
  for (int round = 0; round < kMaxRounds; ++round) {
    advance(normalize_labels(cur.graph));
    const VertexPartition blocks = stable_partition(cur.graph);
    if (blocks.size() < cur.graph.vertices.size()) {
      std::map<std::string, std::string> block_of;
      std::map<std::string, std::string> covering_of;
      for (const auto& b : blocks) {
        for (const auto& v : b) {
          block_of[v] = b.front();
          covering_of[v] = identity_covering_id(cur.graph.vertices.at(v));
        }
      }
      std::string why;
      auto q = quotient_by(cur.graph, block_of, covering_of, &why);
      if (!q) throw std::logic_error("stable partition quotient failed: " + why);
      advance(std::move(*q));
    }
    auto collapsed = collapse_along_coverings(cur.graph);
    if (!collapsed) return cur;
    advance(std::move(*collapsed));
  }
  return cur;
}

std::string canonical_form(const NahGraph& g) {
  const auto ports = port_map(g);
  std::vector<std::string> vs;
  for (const auto& [v, _] : g.vertices) vs.push_back(v);
  std::vector<std::pair<std::string, std::string>> links;
  for (const auto& [_, e] : g.edges) links.emplace_back(e.head, e.tail);
  std::vector<std::string> parts;
  for (const auto& comp : components(vs, links)) {
    std::optional<std::string> best;
    for (const auto& root : comp) {
      std::string s;
      serialize_from(g, ports, root, s);
      if (!best || s < *best) best = std::move(s);
    }
    parts.push_back(std::move(*best));
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& p : parts) out += p + "|";
  return out;
}

bool isomorphic(const NahGraph& a, const NahGraph& b) { return canonical_form(a) == canonical_form(b); }

bool bisimilar(const NahGraph& a, const NahGraph& b) {
  return canonical_form(minimize(a).graph) == canonical_form(minimize(b).graph);
}

NahGraph brute_force_minimize(const NahGraph& g, int max_vertices) {
  if (static_cast<int>(g.vertices.size()) > max_vertices) {
    throw TooLarge(std::to_string(g.vertices.size()) + " vertices exceeds the limit of " +
                   std::to_string(max_vertices));
  }
  auto rank = [](const NahGraph& h, const std::string& form) {
    return std::tuple{h.vertices.size(), h.edges.size(), form};
  };
  std::set<std::string> seen{canonical_form(g)};
  std::deque<std::pair<NahGraph, std::string>> queue{{g, *seen.begin()}};
  std::optional<NahGraph> best;
  std::tuple<std::size_t, std::size_t, std::string> best_rank;

  while (!queue.empty()) {
    const NahGraph cur = std::move(queue.front().first);
    const std::string cur_form = std::move(queue.front().second);
    queue.pop_front();
    bool terminal = true;
    std::vector<std::string> vs;
    for (const auto& [v, _] : cur.vertices) vs.push_back(v);
    std::map<std::string, std::vector<CoveringEntry>> options;
    for (const auto& [v, orb] : cur.vertices) options[v] = candidate_coverings(*cur.catalog, orb);

    for_each_partition(vs.size(), [&](const std::vector<int>& part) {
      const int nblocks = part.empty() ? 0 : *std::max_element(part.begin(), part.end()) + 1;
      std::vector<std::vector<std::string>> blocks(nblocks);
      for (std::size_t i = 0; i < vs.size(); ++i) blocks[part[i]].push_back(vs[i]);

      // Per block: every target reachable from all members.
      std::vector<std::vector<std::string>> targets(nblocks);
      for (int b = 0; b < nblocks; ++b) {
        std::set<std::string> common;
        bool first = true;
        for (const auto& v : blocks[b]) {
          std::set<std::string> mine;
          for (const auto& c : options[v]) mine.insert(c.target);
          if (first) common = mine;
          else {
            std::set<std::string> both;
            std::set_intersection(common.begin(), common.end(), mine.begin(), mine.end(),
                                  std::inserter(both, both.begin()));
            common = std::move(both);
          }
          first = false;
        }
        if (common.empty()) return;
        targets[b].assign(common.begin(), common.end());
      }

      std::map<std::string, std::string> block_of;
      for (const auto& blk : blocks) {
        for (const auto& v : blk) block_of[v] = blk.front();
      }
      // Flatten the per-vertex covering choices consistent with the block targets.
      std::vector<std::string> chosen_target(nblocks);
      std::map<std::string, std::string> covering_of;
      std::function<void(std::size_t)> pick_vertex;
      std::function<void(int)> pick_target = [&](int b) {
        if (b == nblocks) {
          pick_vertex(0);
          return;
        }
        for (const auto& t : targets[b]) {
          chosen_target[b] = t;
          pick_target(b + 1);
        }
      };
      pick_vertex = [&](std::size_t i) {
        if (i == vs.size()) {
          auto q = quotient_by(cur, block_of, covering_of);
          if (!q) return;
          std::string form = canonical_form(q->graph);
          if (form == cur_form) return;
          terminal = false;
          if (!seen.insert(form).second) return;
          queue.emplace_back(std::move(q->graph), std::move(form));
          return;
        }
        const std::string& v = vs[i];
        for (const auto& c : options[v]) {
          if (c.target != chosen_target[part[i]]) continue;
          covering_of[v] = c.id;
          pick_vertex(i + 1);
        }
      };
      pick_target(0);
    });
    if (!terminal) continue;
    auto r = rank(cur, cur_form);
    if (!best || r < best_rank) {
      best_rank = std::move(r);
      best = cur;
    }
  }
  return *best;
}

}  // namespace qigraph
