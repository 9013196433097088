#include "qigraph/realization.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "qigraph/error.hpp"

namespace qigraph {

namespace {

constexpr long kMaxCopies = 100000;
const char* const kSyntheticNote =
    "synthetic covers; existence assumes the cusp covering conjecture in dimension 3";

long to_long(const Rational& r, const std::string& what) {
  if (!r.is_integer() || !r.num().fits_slong_p()) throw TooLarge(what + " " + r.str() + " is not a machine integer");
  return r.num().get_si();
}

bool preserved_by(const CyclicSymmetry& f, const Lattice2& lattice) {
  return lattice.image(f.generator) == lattice;
}

// Whether a self-paired loop can stay self-paired on a cusp with lattice
// `chosen` and symmetry of the given degree.
bool loop_stays_self_paired(const Matrix2& label, const Lattice2& chosen, bool keeps_symmetry) {
  if (chosen.image(label) != chosen) return false;
  return keeps_symmetry || (label * label).is_identity();
}

struct EndSpec {
  std::string edge;
  char side;         // 'h', 't', or 's' (self-paired loop kept self-paired)
  std::string cusp;  // cusp of the base vertex
  Lattice2 lattice;  // lattice of the covering cusps, base coordinates
  bool keeps_symmetry;
  long degree;       // cusp covering degree
  long multiplicity; // 2 for the two halves of a split self-paired loop
};

std::map<std::string, Lattice2> chosen_lattices(const NahGraph& g, const std::map<std::string, Lattice2>& overrides) {
  for (const auto& [id, _] : overrides) g.edge(id);
  std::map<std::string, Lattice2> out;
  for (const auto& [id, _] : g.edges) {
    const Lattice2 inter = common_sublattice(g, id);
    auto it = overrides.find(id);
    if (it == overrides.end()) {
      out[id] = inter;
      continue;
    }
    if (!inter.contains(it->second)) {
      throw LatticeNotContained("lattice " + it->second.str() + " for edge '" + id +
                                "' is not inside the intersection lattice " + inter.str());
    }
    out[id] = it->second;
  }
  return out;
}

struct Slot {
  std::string cusp;  // cusp of the cover
  Matrix2 psi;
};

struct VertexSlots {
  CoveringEntry cover;
  std::map<std::pair<std::string, char>, std::vector<Slot>> slots;
  std::map<std::pair<std::string, char>, Rational> degree;
};

VertexSlots classify_cover(const NahGraph& g, const Catalog& cat, const std::string& v,
                           const std::string& covering_id, const std::map<std::string, Lattice2>& chosen) {
  VertexSlots out;
  out.cover = cat.covering(covering_id);
  const std::string& base = g.vertices.at(v);
  const std::string where = "cover '" + covering_id + "' of vertex '" + v + "'";
  if (out.cover.target != base) throw CoverMismatch(where + " does not cover '" + base + "'");
  if (const Report r = validate_covering(cat, out.cover); !r.ok()) {
    throw CoverMismatch(where + " is not a valid covering:\n" + r.str());
  }
  const OrbifoldEntry& m = cat.orbifold(out.cover.source);
  auto assignments = out.cover.cusps;
  std::sort(assignments.begin(), assignments.end(),
            [](const CuspAssignment& a, const CuspAssignment& b) { return a.source_cusp < b.source_cusp; });
  for (const auto& a : assignments) {
    const auto port = g.edge_at(v, a.target_cusp);
    if (!port) throw CoverMismatch(where + " covers the unglued cusp '" + a.target_cusp + "'");
    const Edge& e = g.edge(port->edge);
    const Lattice2& lp = chosen.at(e.id);
    const CuspSpec& x = *m.cusp(a.source_cusp);
    const Lattice2 image = x.lattice.image(a.psi);
    const Lattice2 head_side = lp.image(e.label.inverse());
    char side;
    if (e.self_paired()) {
      if (image == lp && lp.image(e.label) == lp) side = 's';
      else if (image == head_side) side = 'h';
      else if (image == lp) side = 't';
      else throw CoverMismatch(where + ": cusp '" + x.id + "' lattice " + image.str() +
                               " matches neither side of loop '" + e.id + "'");
    } else {
      side = port->reversed ? 't' : 'h';
      const Lattice2& expected = side == 'h' ? head_side : lp;
      if (image != expected) {
        throw CoverMismatch(where + ": cusp '" + x.id + "' has lattice " + image.str() + ", expected " +
                            expected.str() + " over edge '" + e.id + "'");
      }
    }
    const Rational deg = cusp_cover_degree(a.psi, x, g.cusp_spec(v, a.target_cusp));
    const auto key = std::pair{e.id, side};
    auto [it, fresh] = out.degree.emplace(key, deg);
    if (!fresh && it->second != deg) {
      throw CoverMismatch(where + ": cusps over edge '" + e.id + "' have different degrees");
    }
    out.slots[key].push_back({x.id, a.psi});
  }
  for (const auto& [id, e] : g.edges) {
    if (!e.self_paired() || e.head != v) continue;
    const auto h = out.slots.find({id, 'h'});
    const auto t = out.slots.find({id, 't'});
    const std::size_t nh = h == out.slots.end() ? 0 : h->second.size();
    const std::size_t nt = t == out.slots.end() ? 0 : t->second.size();
    if (nh != nt) throw CoverMismatch(where + ": loop '" + id + "' has unequal numbers of cusps on its two sides");
  }
  return out;
}

class Components {
public:
  std::string find(const std::string& x) {
    auto it = parent_.find(x);
    if (it == parent_.end()) {
      parent_[x] = x;
      return x;
    }
    if (it->second == x) return x;
    const std::string root = find(it->second);
    parent_[x] = root;
    return root;
  }
  void unite(const std::string& a, const std::string& b) {
    const std::string ra = find(a);
    const std::string rb = find(b);
    if (ra != rb) parent_[std::max(ra, rb)] = std::min(ra, rb);
  }

private:
  std::map<std::string, std::string> parent_;
};

std::vector<std::string> spanning_tree_first(const NahGraph& g) {
  std::vector<std::string> order;
  std::set<std::string> placed;
  std::set<std::string> reached{g.vertices.begin()->first};
  std::deque<std::string> queue{g.vertices.begin()->first};
  const auto adj = adjacency(g);
  while (!queue.empty()) {
    const std::string v = queue.front();
    queue.pop_front();
    for (const auto& d : adj.at(v)) {
      const std::string& w = g.tail(d);
      if (reached.insert(w).second) {
        order.push_back(d.edge);
        placed.insert(d.edge);
        queue.push_back(w);
      }
    }
  }
  for (const auto& [id, _] : g.edges) {
    if (!placed.count(id)) order.push_back(id);
  }
  return order;
}

std::string copy_id(const std::string& v, long i) { return v + "#" + std::to_string(i); }

}  // namespace

Lattice2 common_sublattice(const NahGraph& g, const std::string& edge) {
  const Edge& e = g.edge(edge);
  const Lattice2& head = g.cusp_spec(e.head, e.head_cusp).lattice;
  const Lattice2& tail = g.cusp_spec(e.tail, e.tail_cusp).lattice;
  return lattice_intersect(tail, head.image(e.label));
}

SyntheticCovers synthesize_covers(const NahGraph& g, const std::map<std::string, Lattice2>& chosen) {
  const auto lattices = chosen_lattices(g, chosen);
  std::map<std::string, std::vector<EndSpec>> ends;
  auto add_end = [&](const std::string& v, EndSpec spec) {
    const CuspSpec& c = g.cusp_spec(v, spec.cusp);
    spec.keeps_symmetry = preserved_by(c.symmetry, spec.lattice);
    const Rational deg = lattice_index(spec.lattice, c.lattice).ratio * Rational(spec.keeps_symmetry ? 1 : c.degree);
    spec.degree = to_long(deg, "cusp covering degree");
    ends[v].push_back(std::move(spec));
  };
  for (const auto& [id, e] : g.edges) {
    const Lattice2& lp = lattices.at(id);
    const Lattice2 head_side = lp.image(e.label.inverse());
    if (e.self_paired()) {
      const bool keeps = preserved_by(g.cusp_spec(e.head, e.head_cusp).symmetry, lp);
      if (loop_stays_self_paired(e.label, lp, keeps)) {
        add_end(e.head, {id, 's', e.head_cusp, lp, false, 0, 1});
      } else {
        add_end(e.head, {id, 'h', e.head_cusp, head_side, false, 0, 2});
        add_end(e.head, {id, 't', e.head_cusp, lp, false, 0, 2});
      }
      continue;
    }
    add_end(e.head, {id, 'h', e.head_cusp, head_side, false, 0, 1});
    add_end(e.tail, {id, 't', e.tail_cusp, lp, false, 0, 1});
  }

  SyntheticCovers out;
  out.fragment.note = kSyntheticNote;
  for (const auto& [v, base] : g.vertices) {
    long dv = 1;
    for (const auto& s : ends[v]) dv = std::lcm(dv, s.degree * s.multiplicity);
    if (dv == 1) {
      out.covers[v] = identity_covering_id(base);
      continue;
    }
    const OrbifoldEntry& n = g.catalog->orbifold(base);
    OrbifoldEntry m;
    m.id = "syn:" + v;
    m.arithmetic = n.arithmetic;
    m.is_minimal = true;
    CoveringEntry cov;
    cov.id = "syn:" + v + ">" + base;
    cov.source = m.id;
    cov.target = base;
    cov.total_degree = dv;
    for (const auto& s : ends[v]) {
      const CuspSpec& c = g.cusp_spec(v, s.cusp);
      const long count = dv / (s.degree * s.multiplicity);
      for (long j = 0; j < count; ++j) {
        CuspSpec x;
        x.id = s.edge + ":" + s.side + std::to_string(j);
        x.lattice = s.lattice;
        x.degree = s.keeps_symmetry ? c.degree : 1;
        x.symmetry = s.keeps_symmetry ? c.symmetry : CyclicSymmetry::trivial();
        cov.cusps.push_back({x.id, c.id, Matrix2::identity()});
        m.cusps.push_back(std::move(x));
      }
    }
    out.covers[v] = cov.id;
    out.fragment.orbifolds[m.id] = std::move(m);
    out.fragment.coverings[cov.id] = std::move(cov);
  }
  return out;
}

Realization realize(const NahGraph& g, const std::map<std::string, std::string>& covers,
                    const std::map<std::string, Lattice2>& sublattices) {
  if (const Report r = validate(g); !r.ok()) throw InvalidGraph("input graph is not valid:\n" + r.str());
  const BalanceResult bal = balanced(g);
  if (!bal.balanced) {
    throw Unbalanced("realization needs a balanced graph; the cycle closed by edge '" + bal.witness->edge +
                     "' has delta product different from 1");
  }
  for (const auto& [v, _] : covers) {
    if (!g.vertices.count(v)) throw UnknownVertex("cover given for unknown vertex '" + v + "'");
  }

  Realization out;
  RealizationPlan& plan = out.plan;
  const auto lattices = chosen_lattices(g, sublattices);
  SyntheticCovers syn = synthesize_covers(g, lattices);
  for (const auto& [v, id] : covers) {
    const std::string& unused = syn.covers.at(v);
    if (syn.fragment.coverings.count(unused)) {
      syn.fragment.orbifolds.erase(syn.fragment.coverings.at(unused).source);
      syn.fragment.coverings.erase(unused);
    }
    syn.covers[v] = id;
  }
  if (syn.fragment.orbifolds.empty()) syn.fragment.note.clear();
  auto merged = std::make_shared<Catalog>(*g.catalog);
  merged->merge(syn.fragment);
  if (merged->note.empty()) merged->note = syn.fragment.note;
  out.fragment = syn.fragment;

  std::map<std::string, VertexSlots> slots;
  for (const auto& [v, _] : g.vertices) {
    slots[v] = classify_cover(g, *merged, v, syn.covers.at(v), lattices);
    plan.vertex_covers[v] = syn.covers.at(v);
    plan.vertex_degrees[v] = slots[v].cover.total_degree;
  }
  for (const auto& [id, e] : g.edges) {
    EdgePlan ep;
    ep.intersection = common_sublattice(g, id);
    ep.chosen = lattices.at(id);
    const char hs = e.self_paired() && slots[e.head].degree.count({id, 's'}) ? 's' : 'h';
    const char ts = hs == 's' ? 's' : 't';
    ep.d_head = slots[e.head].degree.at({id, hs});
    ep.d_tail = slots[e.tail].degree.at({id, ts});
    if (ep.d_head * delta(g, {id, false}) != ep.d_tail) {
      throw CoverMismatch("covers over edge '" + id + "' break the degree relation d_head * delta = d_tail");
    }
    plan.edges[id] = std::move(ep);
  }

  plan.potential = bal.potential;
  mpz_class b = 1;
  for (const auto& [v, m] : plan.potential) b = lcm(b, (m / Rational(plan.vertex_degrees.at(v))).den());
  plan.scale = to_long(Rational(b), "scale");
  long total = 0;
  for (const auto& [v, m] : plan.potential) {
    plan.copies[v] = to_long(Rational(b) * m / Rational(plan.vertex_degrees.at(v)), "copy count");
    total += plan.copies[v];
    if (total > kMaxCopies) throw TooLarge("realization needs more than " + std::to_string(kMaxCopies) + " pieces");
  }

  NahGraph& out_g = out.graph;
  out_g.catalog = merged;
  out_g.catalog_ref = g.catalog_ref;
  for (const auto& [v, n] : plan.copies) {
    for (long i = 0; i < n; ++i) out_g.vertices[copy_id(v, i)] = slots[v].cover.source;
  }

  Components comp;
  for (const auto& [v, _] : out_g.vertices) comp.find(v);
  for (const auto& id : spanning_tree_first(g)) {
    const Edge& e = g.edge(id);
    long k = 0;
    auto add = [&](const std::string& hv, const Slot& x, const std::string& tv, const Slot& y) {
      out_g.add_edge({id + "#" + std::to_string(k++), hv, x.cusp, tv, y.cusp, y.psi.inverse() * e.label * x.psi});
      comp.unite(hv, tv);
    };
    if (e.self_paired() && slots[e.head].slots.count({id, 's'})) {
      for (long i = 0; i < plan.copies.at(e.head); ++i) {
        for (const auto& x : slots[e.head].slots.at({id, 's'})) add(copy_id(e.head, i), x, copy_id(e.head, i), x);
      }
      continue;
    }
    std::vector<std::pair<std::string, Slot>> hs;
    std::vector<std::pair<std::string, Slot>> ts;
    for (long i = 0; i < plan.copies.at(e.head); ++i) {
      for (const auto& x : slots[e.head].slots.at({id, 'h'})) hs.emplace_back(copy_id(e.head, i), x);
    }
    for (long i = 0; i < plan.copies.at(e.tail); ++i) {
      for (const auto& y : slots[e.tail].slots.at({id, 't'})) ts.emplace_back(copy_id(e.tail, i), y);
    }
    if (hs.size() != ts.size()) throw std::logic_error("boundary counts differ over edge '" + id + "'");
    // Greedy matching preferring slots in other components; the scan for such
    // a slot is bounded so large realizations stay near-linear.
    constexpr std::size_t kScan = 64;
    std::vector<std::size_t> free_ts(ts.size());
    std::iota(free_ts.begin(), free_ts.end(), 0);
    for (const auto& [hv, x] : hs) {
      std::size_t at = 0;
      const std::string here = comp.find(hv);
      for (std::size_t j = 0; j < free_ts.size() && j < kScan; ++j) {
        if (comp.find(ts[free_ts[j]].first) != here) {
          at = j;
          break;
        }
      }
      const std::size_t pick = free_ts[at];
      free_ts.erase(free_ts.begin() + static_cast<long>(at));
      add(hv, x, ts[pick].first, ts[pick].second);
    }
  }

  const std::string keep = comp.find(out_g.vertices.begin()->first);
  for (auto it = out_g.vertices.begin(); it != out_g.vertices.end();) {
    if (comp.find(it->first) != keep) {
      it = out_g.vertices.erase(it);
      plan.took_component = true;
    } else {
      ++it;
    }
  }
  for (auto it = out_g.edges.begin(); it != out_g.edges.end();) {
    it = out_g.vertices.count(it->second.head) ? std::next(it) : out_g.edges.erase(it);
  }

  if (const Report r = validate(out_g); !r.ok()) throw std::logic_error("realized graph is not valid:\n" + r.str());
  if (!is_integral(out_g).integral) throw std::logic_error("realized graph is not integral");

  GraphMorphism down;
  for (const auto& [c, _] : out_g.vertices) {
    const std::string v = c.substr(0, c.rfind('#'));
    down.vertex_map[c] = v;
    down.vertex_coverings[c] = plan.vertex_covers.at(v);
  }
  for (const auto& [id, _] : out_g.edges) down.edge_map[id] = {id.substr(0, id.rfind('#')), false};
  if (const Report r = verify_morphism(out_g, g, down); !r.ok()) {
    throw std::logic_error("realized graph does not map to the input:\n" + r.str());
  }
  Quotient minimal = minimize(g);
  out.minimal = std::move(minimal.graph);
  out.morphism = compose_morphisms(down, minimal.morphism);
  out.manifest = to_manifest(out_g);
  return out;
}

}  // namespace qigraph
