#include "qigraph/common_cover.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <set>

#include "qigraph/error.hpp"

namespace qigraph {

namespace {

const std::string& tail_of(const TypedGraph& g, const DirectedEdge& d) {
  const TypedEdge& e = g.edges.at(d.edge);
  return d.reversed ? e.b : e.a;
}

const std::string& head_of(const TypedGraph& g, const DirectedEdge& d) {
  const TypedEdge& e = g.edges.at(d.edge);
  return d.reversed ? e.a : e.b;
}

// Edge ends leaving each vertex, in slot order.
std::map<std::string, std::vector<DirectedEdge>> slots(const TypedGraph& g) {
  std::map<std::string, std::vector<DirectedEdge>> out;
  for (const auto& [v, _] : g.vertices) out[v];
  for (const auto& [id, e] : g.edges) {
    out[e.a].push_back({id, false});
    out[e.b].push_back({id, true});
  }
  for (auto& [_, ds] : out) {
    std::sort(ds.begin(), ds.end(), [&g](const DirectedEdge& x, const DirectedEdge& y) {
      return std::tie(g.edges.at(x.edge).type, x.edge, x.reversed) <
             std::tie(g.edges.at(y.edge).type, y.edge, y.reversed);
    });
  }
  return out;
}

bool connected(const TypedGraph& g) {
  std::vector<std::string> vs;
  for (const auto& [v, _] : g.vertices) vs.push_back(v);
  std::vector<std::pair<std::string, std::string>> links;
  for (const auto& [_, e] : g.edges) links.emplace_back(e.a, e.b);
  return components(vs, links).size() <= 1;
}

bool is_permutation_of(const std::vector<int>& p, std::size_t n) {
  if (p.size() != n) return false;
  std::vector<int> sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (sorted[i] != static_cast<int>(i)) return false;
  }
  return true;
}

std::set<std::vector<int>> generated_group(const std::vector<std::vector<int>>& gens, std::size_t n) {
  std::vector<int> id(n);
  std::iota(id.begin(), id.end(), 0);
  std::set<std::vector<int>> group{id};
  std::deque<std::vector<int>> queue{id};
  while (!queue.empty()) {
    const auto p = queue.front();
    queue.pop_front();
    for (const auto& g : gens) {
      std::vector<int> q(n);
      for (std::size_t i = 0; i < n; ++i) q[i] = g[static_cast<std::size_t>(p[i])];
      if (group.insert(q).second) queue.push_back(q);
    }
  }
  return group;
}

}  // namespace

Report validate_typed(const TypedGraph& g) {
  Report r;
  bool ok = true;
  for (const auto& [id, e] : g.edges) {
    if (e.id != id) r.add("edge " + id, "structure", "edge id differs from its key");
    for (const auto& v : {e.a, e.b}) {
      if (!g.vertices.count(v)) {
        r.add("edge " + id, "structure", "unknown vertex '" + v + "'");
        ok = false;
      }
    }
  }
  if (g.vertices.empty()) r.add("graph", "structure", "no vertices");
  if (!ok) return r;
  if (!connected(g)) r.add("graph", "connected", "graph is not connected");

  std::map<std::string, std::pair<std::string, std::string>> ends_of_type;
  for (const auto& [id, e] : g.edges) {
    auto ends = std::minmax(g.vertices.at(e.a), g.vertices.at(e.b));
    auto [it, fresh] = ends_of_type.emplace(e.type, std::pair{ends.first, ends.second});
    if (!fresh && it->second != std::pair{ends.first, ends.second}) {
      r.add("edge " + id, "edge_type", "type '" + e.type + "' joins (" + ends.first + ", " + ends.second +
                                           ") here but (" + it->second.first + ", " + it->second.second + ") elsewhere");
    }
  }

  const auto sl = slots(g);
  for (const auto& [type, gens] : g.permutations) {
    std::optional<std::size_t> n;
    for (const auto& [v, t] : g.vertices) {
      if (t != type) continue;
      if (n && *n != sl.at(v).size()) {
        r.add("type " + type, "permutation", "vertices of this type have different numbers of edge ends");
      }
      n = sl.at(v).size();
    }
    for (const auto& p : gens) {
      if (n && !is_permutation_of(p, *n)) {
        r.add("type " + type, "permutation", "generator is not a permutation of " + std::to_string(*n) + " slots");
      }
    }
  }
  return r;
}

bool verify_covering(const TypedGraph& cover, const TypedGraph& base, const CoveringMap& map) {
  for (const auto& [v, t] : cover.vertices) {
    auto it = map.vertex_map.find(v);
    if (it == map.vertex_map.end()) return false;
    auto b = base.vertices.find(it->second);
    if (b == base.vertices.end() || b->second != t) return false;
  }
  for (const auto& [id, e] : cover.edges) {
    auto it = map.edge_map.find(id);
    if (it == map.edge_map.end() || !base.edges.count(it->second.edge)) return false;
    const DirectedEdge& d = it->second;
    if (base.edges.at(d.edge).type != e.type) return false;
    if (tail_of(base, d) != map.vertex_map.at(e.a) || head_of(base, d) != map.vertex_map.at(e.b)) return false;
  }
  const auto cs = slots(cover);
  const auto bs = slots(base);
  for (const auto& [v, ds] : cs) {
    std::vector<DirectedEdge> images;
    for (const auto& d : ds) {
      const DirectedEdge img = map.edge_map.at(d.edge);
      images.push_back(d.reversed ? img.flipped() : img);
    }
    std::sort(images.begin(), images.end());
    std::vector<DirectedEdge> want = bs.at(map.vertex_map.at(v));
    std::sort(want.begin(), want.end());
    if (images != want) return false;
  }
  return true;
}

Refinement degree_refinement(const TypedGraph& g) {
  Refinement ref;
  const auto sl = slots(g);
  std::map<std::string, std::string> sig;
  for (const auto& [v, t] : g.vertices) sig[v] = t;
  std::size_t count = 0;
  while (true) {
    std::map<std::string, int> numbering;
    for (const auto& [_, s] : sig) numbering.emplace(s, 0);
    int i = 0;
    for (auto& [_, idx] : numbering) idx = i++;
    for (const auto& [v, s] : sig) ref.block_of[v] = numbering.at(s);
    if (numbering.size() == count) break;
    count = numbering.size();
    for (const auto& [v, ds] : sl) {
      std::vector<std::string> items;
      for (const auto& d : ds) {
        items.push_back(g.edges.at(d.edge).type + ">" + std::to_string(ref.block_of.at(head_of(g, d))));
      }
      std::sort(items.begin(), items.end());
      std::string s = std::to_string(ref.block_of.at(v)) + "{";
      for (const auto& x : items) s += x + ";";
      sig[v] = s + "}";
    }
  }
  ref.blocks = static_cast<int>(count);
  // Rows are equal across a block, so the first vertex of each block speaks for it.
  std::set<int> done;
  for (const auto& [v, b] : ref.block_of) {
    ref.block_type[b] = g.vertices.at(v);
    if (!done.insert(b).second) continue;
    for (const auto& d : sl.at(v)) {
      ++ref.matrix[{b, ref.block_of.at(head_of(g, d)), g.edges.at(d.edge).type}];
    }
  }
  return ref;
}

namespace {

// A cover vertex: the pair of vertices it maps to.
struct Lift {
  std::string x1;
  std::string x2;
  int block = 0;
};

struct LiftEdge {
  std::size_t from;
  DirectedEdge e1;
  DirectedEdge e2;
  std::size_t to;
  int from_block = 0;
  int to_block = 0;
};

class CoverSearch {
public:
  CoverSearch(const TypedGraph& g1, const TypedGraph& g2, const Refinement& r1, const Refinement& r2, long max_steps)
      : g1_(g1), g2_(g2), r1_(r1), r2_(r2), s1_(slots(g1)), s2_(slots(g2)), steps_left_(max_steps) {
    members1_.resize(static_cast<std::size_t>(r1.blocks));
    members2_.resize(static_cast<std::size_t>(r1.blocks));
    for (const auto& [v, b] : r1.block_of) members1_[static_cast<std::size_t>(b)].push_back(v);
    for (const auto& [v, b] : r2.block_of) members2_[static_cast<std::size_t>(b)].push_back(v);
    for (const auto& [key, _] : r1.matrix) {
      const auto& [b, c, t] = key;
      classes_.insert({std::min(b, c), std::max(b, c), t});
    }
    // Breadth-first block order, so each block after the first meets an earlier one.
    std::vector<std::set<int>> adj(static_cast<std::size_t>(r1.blocks));
    for (const auto& [b, c, _] : classes_) {
      adj[static_cast<std::size_t>(b)].insert(c);
      adj[static_cast<std::size_t>(c)].insert(b);
    }
    std::vector<bool> seen(static_cast<std::size_t>(r1.blocks), false);
    for (int root = 0; root < r1.blocks; ++root) {
      if (seen[static_cast<std::size_t>(root)]) continue;
      seen[static_cast<std::size_t>(root)] = true;
      std::deque<int> queue{root};
      while (!queue.empty()) {
        const int b = queue.front();
        queue.pop_front();
        order_.push_back(b);
        for (int c : adj[static_cast<std::size_t>(b)]) {
          if (!seen[static_cast<std::size_t>(c)]) {
            seen[static_cast<std::size_t>(c)] = true;
            queue.push_back(c);
          }
        }
      }
    }
  }

  bool exhausted() const { return steps_left_ <= 0; }

  /// Tries every cover with k1 lifts per g1 vertex and k2 per g2 vertex.
  std::optional<CommonCover> run(int k1, int k2) {
    k1_ = k1;
    k2_ = k2;
    tables_.assign(static_cast<std::size_t>(r1_.blocks), {});
    class_edges_.clear();
    result_.reset();
    assign(0);
    return std::move(result_);
  }

private:
  bool tick() { return --steps_left_ > 0; }

  // Fills the contingency table of block order_[i] row by row.
  bool assign(std::size_t i) {
    if (i == order_.size()) return finish();
    const int b = order_[i];
    const auto& rows = members1_[static_cast<std::size_t>(b)];
    const auto& cols = members2_[static_cast<std::size_t>(b)];
    std::vector<std::vector<int>> table(rows.size(), std::vector<int>(cols.size(), 0));
    std::vector<int> col_left(cols.size(), k2_);
    std::function<bool(std::size_t, std::size_t, int)> fill = [&](std::size_t r, std::size_t c, int row_left) -> bool {
      if (!tick()) return false;
      if (r == rows.size()) {
        for (int x : col_left) {
          if (x != 0) return false;
        }
        tables_[static_cast<std::size_t>(b)] = table;
        return place_block(i);
      }
      if (c + 1 == cols.size()) {
        if (row_left > col_left[c]) return false;
        table[r][c] = row_left;
        col_left[c] -= row_left;
        const bool ok = fill(r + 1, 0, k1_);
        col_left[c] += row_left;
        table[r][c] = 0;
        return ok;
      }
      for (int x = std::min(row_left, col_left[c]); x >= 0; --x) {
        table[r][c] = x;
        col_left[c] -= x;
        const bool ok = fill(r, c + 1, row_left - x);
        col_left[c] += x;
        table[r][c] = 0;
        if (ok) return true;
        if (exhausted()) return false;
      }
      return false;
    };
    return fill(0, 0, k1_);
  }

  // With block order_[i] laid out, wires every edge class reaching back to
  // blocks already placed, then moves on.
  bool place_block(std::size_t i) {
    const int b = order_[i];
    std::set<int> placed(order_.begin(), order_.begin() + static_cast<long>(i) + 1);
    std::vector<std::tuple<int, int, std::string>> todo;
    for (const auto& cls : classes_) {
      const auto& [p, q, _] = cls;
      if ((p == b && placed.count(q)) || (q == b && placed.count(p))) todo.push_back(cls);
    }
    std::vector<std::tuple<int, int, std::string>> done;
    bool ok = true;
    for (const auto& cls : todo) {
      auto edges = wire(cls);
      if (!edges) {
        ok = false;
        break;
      }
      class_edges_[cls] = std::move(*edges);
      done.push_back(cls);
    }
    if (ok && assign(i + 1)) return true;
    for (const auto& cls : done) class_edges_.erase(cls);
    return false;
  }

  std::vector<Lift> lifts_of(int b) const {
    std::vector<Lift> out;
    const auto& rows = members1_[static_cast<std::size_t>(b)];
    const auto& cols = members2_[static_cast<std::size_t>(b)];
    const auto& table = tables_[static_cast<std::size_t>(b)];
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        for (int k = 0; k < table[r][c]; ++k) out.push_back({rows[r], cols[c], b});
      }
    }
    return out;
  }

  // Lifts of one edge class: every edge end at every lift must be matched
  // with a partner end at a lift over the far ends, in both graphs at once.
  std::optional<std::vector<LiftEdge>> wire(const std::tuple<int, int, std::string>& cls) {
    const auto& [p, q, type] = cls;
    std::vector<Lift> lifts = lifts_of(p);
    if (q != p) {
      auto more = lifts_of(q);
      lifts.insert(lifts.end(), more.begin(), more.end());
    }
    auto in_class = [&](const TypedGraph& g, const Refinement& r, const DirectedEdge& d) {
      if (g.edges.at(d.edge).type != type) return false;
      const int from = r.block_of.at(tail_of(g, d));
      const int to = r.block_of.at(head_of(g, d));
      return (from == p && to == q) || (from == q && to == p);
    };
    std::vector<std::pair<std::size_t, DirectedEdge>> ports;
    for (std::size_t i = 0; i < lifts.size(); ++i) {
      for (const auto& d : s1_.at(lifts[i].x1)) {
        if (in_class(g1_, r1_, d)) ports.emplace_back(i, d);
      }
    }
    std::vector<std::set<DirectedEdge>> used1(lifts.size());
    std::vector<std::set<DirectedEdge>> used2(lifts.size());
    std::vector<LiftEdge> edges;

    std::function<bool(std::size_t)> go = [&](std::size_t k) -> bool {
      if (!tick()) return false;
      while (k < ports.size() && used1[ports[k].first].count(ports[k].second)) ++k;
      if (k == ports.size()) return true;
      const auto [i, e1] = ports[k];
      const std::string& y1 = head_of(g1_, e1);
      for (const auto& e2 : s2_.at(lifts[i].x2)) {
        if (!in_class(g2_, r2_, e2) || used2[i].count(e2)) continue;
        if (r2_.block_of.at(head_of(g2_, e2)) != r1_.block_of.at(y1)) continue;
        const std::string& y2 = head_of(g2_, e2);
        used1[i].insert(e1);
        used2[i].insert(e2);
        bool tried_fresh = false;
        for (std::size_t j = 0; j < lifts.size(); ++j) {
          if (lifts[j].x1 != y1 || lifts[j].x2 != y2) continue;
          if (used1[j].count(e1.flipped()) || used2[j].count(e2.flipped())) continue;
          const bool fresh = used1[j].empty() && used2[j].empty();
          if (fresh && tried_fresh) continue;
          tried_fresh = tried_fresh || fresh;
          used1[j].insert(e1.flipped());
          used2[j].insert(e2.flipped());
          edges.push_back({i, e1, e2, j});
          if (go(k + 1)) return true;
          edges.pop_back();
          used1[j].erase(e1.flipped());
          used2[j].erase(e2.flipped());
          if (exhausted()) break;
        }
        used1[i].erase(e1);
        used2[i].erase(e2);
        if (exhausted()) return false;
      }
      return false;
    };
    if (!go(0)) return std::nullopt;
    // Lift indices become positions within their own block.
    const std::size_t first = count_lifts(p);
    for (auto& e : edges) {
      e.from_block = lifts[e.from].block;
      e.to_block = lifts[e.to].block;
      if (e.from >= first) e.from -= first;
      if (e.to >= first) e.to -= first;
    }
    return edges;
  }

  std::size_t count_lifts(int b) const {
    std::size_t n = 0;
    for (const auto& row : tables_[static_cast<std::size_t>(b)]) n += static_cast<std::size_t>(std::accumulate(row.begin(), row.end(), 0));
    return n;
  }

  bool finish() {
    std::vector<Lift> all;
    std::vector<std::size_t> offset;
    for (int b = 0; b < r1_.blocks; ++b) {
      offset.push_back(all.size());
      auto l = lifts_of(b);
      all.insert(all.end(), l.begin(), l.end());
    }
    std::vector<std::string> ids;
    std::map<std::pair<std::string, std::string>, int> copies;
    for (const auto& l : all) ids.push_back(l.x1 + "*" + l.x2 + "#" + std::to_string(copies[{l.x1, l.x2}]++));

    CommonCover cc;
    std::vector<LiftEdge> edges;
    for (const auto& [_, es] : class_edges_) {
      for (auto e : es) {
        e.from += offset[static_cast<std::size_t>(e.from_block)];
        e.to += offset[static_cast<std::size_t>(e.to_block)];
        edges.push_back(e);
      }
    }
    std::vector<std::pair<std::string, std::string>> links;
    for (const auto& e : edges) links.emplace_back(ids[e.from], ids[e.to]);
    std::vector<std::string> sorted_ids = ids;
    std::sort(sorted_ids.begin(), sorted_ids.end());
    const auto comps = components(sorted_ids, links);
    const std::set<std::string> keep(comps.front().begin(), comps.front().end());

    for (std::size_t i = 0; i < all.size(); ++i) {
      if (!keep.count(ids[i])) continue;
      cc.cover.vertices[ids[i]] = g1_.vertices.at(all[i].x1);
      cc.to_first.vertex_map[ids[i]] = all[i].x1;
      cc.to_second.vertex_map[ids[i]] = all[i].x2;
    }
    std::vector<std::tuple<std::string, std::string, std::string, DirectedEdge, DirectedEdge>> kept;
    for (const auto& e : edges) {
      if (!keep.count(ids[e.from])) continue;
      kept.emplace_back(ids[e.from], e.e1.str() + "/" + e.e2.str(), ids[e.to], e.e1, e.e2);
    }
    std::sort(kept.begin(), kept.end());
    int n = 0;
    for (const auto& [from, _, to, e1, e2] : kept) {
      const std::string id = "c" + std::to_string(n++);
      cc.cover.edges[id] = {id, from, to, g1_.edges.at(e1.edge).type};
      cc.to_first.edge_map[id] = e1;
      cc.to_second.edge_map[id] = e2;
    }
    if (!verify_covering(cc.cover, g1_, cc.to_first) || !verify_covering(cc.cover, g2_, cc.to_second)) {
      throw std::logic_error("assembled common cover does not verify");
    }
    if (!respects_permutations(cc)) return false;
    cc.cover.permutations = g1_.permutations;
    result_ = std::move(cc);
    return true;
  }

  // At every cover vertex the two local identifications compose to a
  // slot permutation in the allowed group of the vertex type.
  bool respects_permutations(const CommonCover& cc) const {
    if (g1_.permutations.empty()) return true;
    const auto cs = slots(cc.cover);
    for (const auto& [v, t] : cc.cover.vertices) {
      auto gens = g1_.permutations.find(t);
      if (gens == g1_.permutations.end()) continue;
      const auto& a = s1_.at(cc.to_first.vertex_map.at(v));
      const auto& b = s2_.at(cc.to_second.vertex_map.at(v));
      std::vector<int> perm(a.size(), -1);
      for (const auto& d : cs.at(v)) {
        const DirectedEdge i1 = d.reversed ? cc.to_first.edge_map.at(d.edge).flipped() : cc.to_first.edge_map.at(d.edge);
        const DirectedEdge i2 = d.reversed ? cc.to_second.edge_map.at(d.edge).flipped() : cc.to_second.edge_map.at(d.edge);
        const auto pa = std::find(a.begin(), a.end(), i1) - a.begin();
        const auto pb = std::find(b.begin(), b.end(), i2) - b.begin();
        perm[static_cast<std::size_t>(pa)] = static_cast<int>(pb);
      }
      if (!generated_group(gens->second, a.size()).count(perm)) return false;
    }
    return true;
  }

  const TypedGraph& g1_;
  const TypedGraph& g2_;
  const Refinement& r1_;
  const Refinement& r2_;
  std::map<std::string, std::vector<DirectedEdge>> s1_;
  std::map<std::string, std::vector<DirectedEdge>> s2_;
  long steps_left_;
  std::vector<std::vector<std::string>> members1_;
  std::vector<std::vector<std::string>> members2_;
  std::set<std::tuple<int, int, std::string>> classes_;
  std::vector<int> order_;
  int k1_ = 1;
  int k2_ = 1;
  std::vector<std::vector<std::vector<int>>> tables_;
  std::map<std::tuple<int, int, std::string>, std::vector<LiftEdge>> class_edges_;
  std::optional<CommonCover> result_;
};

}  // namespace

std::optional<CommonCover> find_common_cover(const TypedGraph& g1, const TypedGraph& g2, int max_size, bool force,
                                             long max_steps) {
  for (const auto* g : {&g1, &g2}) {
    const Report r = validate_typed(*g);
    if (!r.ok()) throw InvalidGraph("typed graph is not valid:\n" + r.str());
  }
  const Refinement r1 = degree_refinement(g1);
  const Refinement r2 = degree_refinement(g2);
  if (r1.blocks != r2.blocks || r1.matrix != r2.matrix || r1.block_type != r2.block_type) {
    throw IncompatibleRefinement("the degree refinements of the two graphs differ");
  }

  std::set<std::pair<int, int>> adjacent;
  bool loop = false;
  for (const auto& [key, _] : r1.matrix) {
    const auto& [b, c, t] = key;
    if (b == c) loop = true;
    adjacent.insert({std::min(b, c), std::max(b, c)});
  }
  std::set<std::tuple<int, int, std::string>> classes;
  for (const auto& [key, _] : r1.matrix) {
    const auto& [b, c, t] = key;
    classes.insert({std::min(b, c), std::max(b, c), t});
  }
  const bool tree = !loop && classes.size() == adjacent.size() &&
                    static_cast<int>(adjacent.size()) == r1.blocks - 1;
  if (!tree && !force) {
    throw BaseNotTree("the refinement quotient has " + std::to_string(r1.blocks) + " blocks and " +
                      std::to_string(classes.size()) + " edge classes" + (loop ? ", including a loop" : ""));
  }

  const long n1 = static_cast<long>(g1.vertices.size());
  const long n2 = static_cast<long>(g2.vertices.size());
  const long step = std::lcm(n1, n2);
  CoverSearch search(g1, g2, r1, r2, max_steps);
  for (long size = step; size <= max_size; size += step) {
    auto found = search.run(static_cast<int>(size / n1), static_cast<int>(size / n2));
    if (found) return found;
    if (search.exhausted()) break;
  }
  return std::nullopt;
}

}  // namespace qigraph
