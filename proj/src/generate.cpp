#include "qigraph/generate.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "qigraph/error.hpp"

namespace qigraph {

namespace {

struct FamilySpec {
  const char* name;
  bool arithmetic;
  std::vector<std::pair<const char*, int>> cusps;
};

const std::vector<FamilySpec>& family_specs() {
  static const std::vector<FamilySpec> specs = {
      {"P", false, {{"a", 1}, {"b", 1}, {"c", 2}}},
      {"Q", false, {{"a", 1}, {"b", 2}}},
      {"R", true, {{"a", 4}, {"b", 1}}},
      {"S", false, {{"a", 3}, {"b", 6}, {"c", 1}}},
      {"T", true, {{"a", 1}, {"b", 1}, {"c", 1}}},
  };
  return specs;
}

constexpr long kScales[] = {1, 1, 2};

long uniform(std::mt19937_64& rng, long lo, long hi) {
  return std::uniform_int_distribution<long>(lo, hi)(rng);
}

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& xs) {
  return xs[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(xs.size()) - 1))];
}

Rational small_rational(std::mt19937_64& rng) {
  static const std::vector<Rational> values = {Rational(1), Rational(2), Rational(3), Rational(1, 2),
                                               Rational(2, 3), Rational(3, 2)};
  return pick(rng, values);
}

Matrix2 random_sl2z(std::mt19937_64& rng, int steps) {
  Matrix2 m = Matrix2::identity();
  for (int i = 0; i < steps; ++i) {
    const long k = pick(rng, std::vector<long>{-1, 1, 2});
    m = m * (uniform(rng, 0, 1) == 0 ? Matrix2(1, k, 0, 1) : Matrix2(1, 0, k, 1));
  }
  return m;
}

Matrix2 random_frame(std::mt19937_64& rng) {
  Matrix2 m = random_sl2z(rng, static_cast<int>(uniform(rng, 1, 3)));
  if (uniform(rng, 0, 3) == 0) m = m * (uniform(rng, 0, 1) == 0 ? Matrix2(2, 0, 0, 1) : Matrix2(1, 0, 0, 2));
  return m;
}

// Small rational change of frame: a shear by a fraction with denominator
// at most 3, sometimes followed by a diagonal stretch.
Matrix2 random_rational_frame(std::mt19937_64& rng) {
  static const std::vector<Rational> shears = {Rational(1, 2), Rational(-1, 2), Rational(1, 3), Rational(-2, 3)};
  const Rational q = pick(rng, shears);
  Matrix2 m = uniform(rng, 0, 1) == 0 ? Matrix2(1, q, 0, 1) : Matrix2(1, 0, q, 1);
  if (uniform(rng, 0, 2) == 0) m = m * Matrix2(2, 0, 0, 1);
  return m;
}

// Orientation-reversing reflection normalizing the standard rotation group.
Matrix2 standard_reflection(int degree) {
  return degree == 3 || degree == 6 ? Matrix2(0, 1, 1, 0) : Matrix2(1, 0, 0, -1);
}

// Determinant -1 label in standard coordinates between two cusps of the
// given degree.  `involution` asks for X with X^2 in the rotation group.
Matrix2 unit_label(int degree, bool integral, bool involution, std::mt19937_64& rng) {
  const Matrix2 j = standard_reflection(degree);
  if (degree >= 3) return j * CyclicSymmetry::standard(degree).generator.pow(static_cast<int>(uniform(rng, 0, degree - 1)));
  if (involution) {
    if (integral) return Matrix2(1, uniform(rng, -2, 2), 0, -1);
    const Matrix2 p = random_rational_frame(rng);
    return p * j * p.inverse();
  }
  if (integral) return j * random_sl2z(rng, static_cast<int>(uniform(rng, 0, 3)));
  const Matrix2 p = random_rational_frame(rng);
  return p * j * p.inverse() * random_sl2z(rng, static_cast<int>(uniform(rng, 0, 2)));
}

struct Slot {
  std::string vertex;
  std::string cusp;
  int degree;
};

}  // namespace

GeneratedCatalog generate_catalog(std::mt19937_64& rng) {
  auto cat = std::make_shared<Catalog>();
  GeneratedCatalog out;
  for (const auto& spec : family_specs()) {
    std::vector<std::string> ids;
    for (int k = 0; k < static_cast<int>(std::size(kScales)); ++k) {
      const std::string id = std::string(spec.name) + std::to_string(k);
      MemberFrame mf{spec.name, k, kScales[k], spec.arithmetic, {}};
      OrbifoldEntry orb;
      orb.id = id;
      orb.arithmetic = spec.arithmetic;
      orb.is_minimal = k == 0;
      for (const auto& [cusp, degree] : spec.cusps) {
        const Matrix2 a = k == 0 ? Matrix2::identity() : random_frame(rng);
        mf.frame[cusp] = a;
        const CyclicSymmetry r = CyclicSymmetry::standard(degree);
        const Matrix2 ai = a.inverse();
        orb.cusps.push_back({cusp, degree, Lattice2::standard().image(Rational(mf.scale) * ai),
                             {r.order, ai * r.generator * a}});
      }
      if (k > 0) orb.minimal_quotients.push_back({orb.own_degrees(), id + ">" + spec.name + "0"});
      cat->orbifolds[id] = std::move(orb);
      out.members[id] = std::move(mf);
      ids.push_back(id);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const auto& mi = out.members[ids[i]];
        const auto& mj = out.members[ids[j]];
        if (mi.scale % mj.scale != 0) continue;
        CoveringEntry c;
        c.id = ids[i] + ">" + ids[j];
        c.source = ids[i];
        c.target = ids[j];
        c.total_degree = (mi.scale / mj.scale) * (mi.scale / mj.scale);
        for (const auto& [cusp, _] : spec.cusps) {
          c.cusps.push_back({cusp, cusp, mj.frame.at(cusp).inverse() * mi.frame.at(cusp)});
        }
        cat->coverings[c.id] = std::move(c);
      }
    }
    out.families[spec.name] = std::move(ids);
  }
  out.catalog = cat;
  return out;
}

NahGraph generate_graph(const GeneratedCatalog& cat, std::mt19937_64& rng, const GraphShape& shape) {
  std::vector<std::string> all;
  std::vector<std::string> non_arithmetic;
  for (const auto& [id, mf] : cat.members) {
    if (shape.minimal_labels && mf.rank != 0) continue;
    all.push_back(id);
    if (!mf.arithmetic) non_arithmetic.push_back(id);
  }
  for (int attempt = 0; attempt < 10000; ++attempt) {
    NahGraph g;
    g.catalog = cat.catalog;
    const long n = uniform(rng, 1, shape.max_vertices);
    for (long i = 0; i < n; ++i) g.vertices["v" + std::to_string(i)] = pick(rng, i == 0 ? non_arithmetic : all);

    std::vector<std::vector<Slot>> free(n);
    long total = 0;
    for (long i = 0; i < n; ++i) {
      const std::string v = "v" + std::to_string(i);
      for (const auto& c : cat.catalog->orbifold(g.vertices[v]).cusps) free[i].push_back({v, c.id, c.degree});
      total += static_cast<long>(free[i].size());
    }
    if ((total + 1) / 2 > shape.max_edges) continue;

    std::vector<std::pair<Slot, Slot>> pairs;
    auto take = [&](long i, std::size_t k) {
      Slot s = free[i][k];
      free[i].erase(free[i].begin() + static_cast<long>(k));
      return s;
    };
    bool ok = true;
    for (long i = 1; i < n && ok; ++i) {
      std::vector<std::tuple<long, std::size_t, std::size_t>> options;
      for (long j = 0; j < i; ++j) {
        for (std::size_t a = 0; a < free[i].size(); ++a) {
          for (std::size_t b = 0; b < free[j].size(); ++b) {
            if (free[i][a].degree == free[j][b].degree) options.emplace_back(j, a, b);
          }
        }
      }
      if (options.empty()) {
        ok = false;
        break;
      }
      const auto [j, a, b] = pick(rng, options);
      Slot si = take(i, a);
      Slot sj = take(j, b);
      pairs.emplace_back(sj, si);
    }
    if (!ok) continue;
    std::vector<Slot> rest;
    for (auto& f : free) rest.insert(rest.end(), f.begin(), f.end());
    std::shuffle(rest.begin(), rest.end(), rng);
    std::stable_sort(rest.begin(), rest.end(), [](const Slot& a, const Slot& b) { return a.degree < b.degree; });
    std::vector<Slot> singles;
    for (std::size_t k = 0; k < rest.size();) {
      if (k + 1 < rest.size() && rest[k].degree == rest[k + 1].degree) {
        pairs.emplace_back(rest[k], rest[k + 1]);
        k += 2;
      } else {
        singles.push_back(rest[k]);
        k += 1;
      }
    }
    if (static_cast<long>(pairs.size() + singles.size()) > shape.max_edges) continue;

    std::map<std::string, Rational> nu;
    for (const auto& [v, _] : g.vertices) {
      nu[v] = shape.mode == LabelMode::Integral ? Rational(1) : small_rational(rng);
    }
    const bool integral = shape.mode == LabelMode::Integral;
    auto frame_of = [&](const Slot& s) { return cat.members.at(g.vertices[s.vertex]).frame.at(s.cusp); };
    auto scale_of = [&](const Slot& s) { return Rational(cat.members.at(g.vertices[s.vertex]).scale); };
    auto with_symmetry = [&](Matrix2 l, const Slot& head) {
      const CyclicSymmetry& f = g.cusp_spec(head.vertex, head.cusp).symmetry;
      return l * f.generator.pow(static_cast<int>(uniform(rng, 0, f.order - 1)));
    };

    long k = 0;
    for (auto [h, t] : pairs) {
      if (uniform(rng, 0, 1) == 1) std::swap(h, t);
      const Matrix2 x = unit_label(h.degree, integral, false, rng);
      const Rational s = scale_of(t) * nu[t.vertex] / (scale_of(h) * nu[h.vertex]);
      Matrix2 l = frame_of(t).inverse() * (s * x) * frame_of(h);
      l = with_symmetry(l, h);
      g.add_edge({"e" + std::to_string(k++), h.vertex, h.cusp, t.vertex, t.cusp, l});
    }
    for (const auto& s : singles) {
      const Matrix2 x = unit_label(s.degree, integral, true, rng);
      const Matrix2 l = frame_of(s).inverse() * x * frame_of(s);
      g.add_edge({"e" + std::to_string(k++), s.vertex, s.cusp, s.vertex, s.cusp, l});
    }

    if (shape.mode == LabelMode::Any && uniform(rng, 0, 1) == 1) {
      std::vector<std::string> candidates;
      for (const auto& [id, e] : g.edges) {
        if (!e.self_paired()) candidates.push_back(id);
      }
      if (!candidates.empty()) {
        Edge& e = g.edges.at(pick(rng, candidates));
        e.label = Rational(pick(rng, std::vector<long>{2, 3})) * e.label;
      }
    }
    if (validate(g).ok()) return g;
  }
  throw std::logic_error("graph generation did not converge");
}

GeneratedCover generate_cover(const GeneratedCatalog& cat, const NahGraph& base, std::mt19937_64& rng,
                              int max_sheets) {
  const long sheets = uniform(rng, 1, max_sheets);
  GeneratedCover out;
  NahGraph& g = out.graph;
  g.catalog = base.catalog;
  g.catalog_ref = base.catalog_ref;
  auto copy = [](const std::string& v, long i) { return v + "." + std::to_string(i); };

  std::map<std::string, CoveringEntry> cov;
  for (const auto& [v, label] : base.vertices) {
    const MemberFrame& target = cat.members.at(label);
    std::vector<std::string> options{label};
    for (const auto& id : cat.families.at(target.family)) {
      const MemberFrame& m = cat.members.at(id);
      if (m.rank > target.rank && m.scale % target.scale == 0) options.push_back(id);
    }
    for (long i = 0; i < sheets; ++i) {
      const std::string& src = pick(rng, options);
      const std::string c = copy(v, i);
      g.vertices[c] = src;
      const std::string cid = src == label ? identity_covering_id(label) : src + ">" + label;
      out.morphism.vertex_map[c] = v;
      out.morphism.vertex_coverings[c] = cid;
      cov[c] = base.catalog->covering(cid);
    }
  }

  for (const auto& [id, e] : base.edges) {
    std::vector<long> perm(static_cast<std::size_t>(sheets));
    std::iota(perm.begin(), perm.end(), 0L);
    if (e.self_paired()) {
      // A random involution: fixed points stay self-paired loops.
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<long> inv(static_cast<std::size_t>(sheets), -1);
      for (std::size_t k = 0; k + 1 < perm.size(); k += 2) {
        if (uniform(rng, 0, 1) == 0) continue;
        inv[perm[k]] = perm[k + 1];
        inv[perm[k + 1]] = perm[k];
      }
      for (long i = 0; i < sheets; ++i) {
        if (inv[i] < 0) inv[i] = i;
      }
      perm = inv;
    } else {
      std::shuffle(perm.begin(), perm.end(), rng);
    }
    const CyclicSymmetry& f = base.cusp_spec(e.head, e.head_cusp).symmetry;
    for (long i = 0; i < sheets; ++i) {
      const long j = perm[static_cast<std::size_t>(i)];
      if (e.self_paired() && j < i) continue;
      const std::string h = copy(e.head, i);
      const std::string t = copy(e.tail, j);
      const Matrix2& psi_h = cov[h].for_source(e.head_cusp)->psi;
      const Matrix2& psi_t = cov[t].for_source(e.tail_cusp)->psi;
      const Matrix2 r = f.generator.pow(static_cast<int>(uniform(rng, 0, f.order - 1)));
      const std::string eid = id + "." + std::to_string(i);
      g.add_edge({eid, h, e.head_cusp, t, e.tail_cusp, psi_t.inverse() * e.label * r * psi_h});
      out.morphism.edge_map[eid] = {id, false};
    }
  }

  // Keep the component of the first copy.
  std::vector<std::string> vs;
  for (const auto& [v, _] : g.vertices) vs.push_back(v);
  std::vector<std::pair<std::string, std::string>> links;
  for (const auto& [_, e] : g.edges) links.emplace_back(e.head, e.tail);
  const auto comps = components(vs, links);
  const auto& keep = *std::find_if(comps.begin(), comps.end(), [&](const auto& c) {
    return std::find(c.begin(), c.end(), vs.front()) != c.end();
  });
  const std::set<std::string> kept(keep.begin(), keep.end());
  for (auto it = g.vertices.begin(); it != g.vertices.end();) {
    if (kept.count(it->first)) {
      ++it;
      continue;
    }
    out.morphism.vertex_map.erase(it->first);
    out.morphism.vertex_coverings.erase(it->first);
    it = g.vertices.erase(it);
  }
  for (auto it = g.edges.begin(); it != g.edges.end();) {
    if (kept.count(it->second.head)) {
      ++it;
      continue;
    }
    out.morphism.edge_map.erase(it->first);
    it = g.edges.erase(it);
  }
  return out;
}

NahGraph shuffle_ids(const NahGraph& g, std::mt19937_64& rng) {
  auto fresh = [&](std::size_t n, const char* prefix) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(prefix + std::to_string(uniform(rng, 0, 999)) + "_" + std::to_string(i));
    std::shuffle(names.begin(), names.end(), rng);
    return names;
  };
  const auto vnames = fresh(g.vertices.size(), "n");
  const auto enames = fresh(g.edges.size(), "k");
  std::map<std::string, std::string> vmap;
  std::size_t i = 0;
  for (const auto& [v, _] : g.vertices) vmap[v] = vnames[i++];
  NahGraph out;
  out.catalog = g.catalog;
  out.catalog_ref = g.catalog_ref;
  for (const auto& [v, label] : g.vertices) out.vertices[vmap[v]] = label;
  i = 0;
  for (const auto& [_, e] : g.edges) {
    Edge n{enames[i++], vmap[e.head], e.head_cusp, vmap[e.tail], e.tail_cusp, e.label};
    if (uniform(rng, 0, 1) == 1) n = {n.id, n.tail, n.tail_cusp, n.head, n.head_cusp, n.label.inverse()};
    out.add_edge(std::move(n));
  }
  return out;
}

namespace {

Vec2 random_slope(std::mt19937_64& rng) {
  Vec2 v;
  do {
    v = {Rational(uniform(rng, -3, 3)), Rational(uniform(rng, -3, 3))};
  } while (v.is_zero());
  return pick(rng, std::vector<Rational>{Rational(1), Rational(1, 2), Rational(2, 3)}) * v;
}

SeifertColor random_color(std::mt19937_64& rng) {
  return uniform(rng, 0, 1) == 0 ? SeifertColor::Black : SeifertColor::White;
}

}  // namespace

HGraph generate_h_graph(const GeneratedCatalog& cat, std::mt19937_64& rng, const HShape& shape) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    HGraph h;
    std::vector<std::string> cuttable;
    if (shape.hyperbolic) {
      h.hyperbolic = generate_graph(cat, rng, {shape.max_vertices, shape.max_edges, LabelMode::Any, false});
      for (const auto& [id, e] : h.hyperbolic.edges) {
        if (h.hyperbolic.cusp_spec(e.head, e.head_cusp).degree <= 2) cuttable.push_back(id);
      }
      if (cuttable.empty()) continue;
      std::shuffle(cuttable.begin(), cuttable.end(), rng);
    } else {
      h.hyperbolic.catalog = cat.catalog;
    }

    int next_seifert = 0;
    int next_slope = 0;
    int next_edge = 0;
    auto new_seifert = [&] {
      const std::string id = "s" + std::to_string(next_seifert++);
      h.seifert[id] = {random_color(rng), FiberType::O};
      return id;
    };
    auto any_seifert = [&] {
      std::vector<std::string> ids;
      for (const auto& [w, _] : h.seifert) ids.push_back(w);
      return pick(rng, ids);
    };
    auto add_slope = [&](const std::string& v, const std::string& c, const std::string& w) {
      const std::string id = "x" + std::to_string(next_slope++);
      h.slopes[id] = {id, v, c, w, random_slope(rng)};
    };
    auto add_seifert_edge = [&](const std::string& a, const std::string& b) {
      const std::string id = "f" + std::to_string(next_edge++);
      h.seifert_edges[id] = {id, a, b, 1};
    };

    const long cuts = shape.hyperbolic ? uniform(rng, 1, std::min<long>(shape.max_cuts, static_cast<long>(cuttable.size()))) : 0;
    for (long k = 0; k < cuts; ++k) {
      const Edge e = h.hyperbolic.edges.at(cuttable[static_cast<std::size_t>(k)]);
      h.hyperbolic.edges.erase(e.id);
      const std::string w = h.seifert.empty() || uniform(rng, 0, 2) != 0 ? new_seifert() : any_seifert();
      add_slope(e.head, e.head_cusp, w);
      if (!e.self_paired()) add_slope(e.tail, e.tail_cusp, w);
    }
    if (h.seifert.empty()) new_seifert();
    const long extra = uniform(rng, 0, std::max<long>(0, shape.max_seifert - static_cast<long>(h.seifert.size())));
    for (long k = 0; k < extra; ++k) {
      const std::string old = any_seifert();
      add_seifert_edge(old, new_seifert());
    }
    const long more = uniform(rng, 0, shape.extra_seifert_edges);
    for (long k = 0; k < more; ++k) add_seifert_edge(any_seifert(), any_seifert());

    for (auto& [_, sv] : h.seifert) {
      if (uniform(rng, 0, 3) == 0) sv.type = FiberType::N;
    }
    for (const auto& [_, s] : h.slopes) {
      if (h.hyperbolic.cusp_spec(s.vertex, s.cusp).degree == 2) h.seifert.at(s.seifert).type = FiberType::N;
    }
    for (auto& [_, e] : h.seifert_edges) {
      if (h.seifert.at(e.a).type == FiberType::N && h.seifert.at(e.b).type == FiberType::N && uniform(rng, 0, 4) == 0) {
        e.degree = 2;
      }
    }
    std::vector<std::string> ids;
    for (const auto& [id, _] : h.slopes) ids.push_back(id);
    for (const auto& [id, _] : h.seifert_edges) ids.push_back(id);
    for (const auto& id : ids) {
      if (h.needs_sign(id)) h.signs[id] = uniform(rng, 0, 1) == 0 ? 1 : -1;
    }
    if (validate_h(h).ok()) return h;
  }
  throw std::logic_error("H-graph generation did not converge");
}

GeneratedHCover generate_h_cover(const HGraph& base, std::mt19937_64& rng, int sheets) {
  const long n = uniform(rng, 1, sheets);
  GeneratedHCover out;
  HGraph& h = out.graph;
  h.hyperbolic.catalog = base.hyperbolic.catalog;
  h.hyperbolic.catalog_ref = base.hyperbolic.catalog_ref;
  HMorphism& m = out.morphism;
  auto copy = [](const std::string& v, long i) { return v + "." + std::to_string(i); };
  auto permutation = [&] {
    std::vector<long> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0L);
    std::shuffle(p.begin(), p.end(), rng);
    return p;
  };

  for (long i = 0; i < n; ++i) {
    for (const auto& [v, label] : base.hyperbolic.vertices) {
      h.hyperbolic.vertices[copy(v, i)] = label;
      m.hyperbolic.vertex_map[copy(v, i)] = v;
      m.hyperbolic.vertex_coverings[copy(v, i)] = identity_covering_id(label);
    }
    for (const auto& [w, sv] : base.seifert) {
      h.seifert[copy(w, i)] = sv;
      m.seifert_map[copy(w, i)] = w;
    }
  }
  for (const auto& [id, e] : base.hyperbolic.edges) {
    std::vector<long> p = permutation();
    if (e.self_paired()) {
      std::vector<long> inv(p.size(), -1);
      for (std::size_t k = 0; k + 1 < p.size(); k += 2) {
        if (uniform(rng, 0, 1) == 0) continue;
        inv[p[k]] = p[k + 1];
        inv[p[k + 1]] = p[k];
      }
      for (std::size_t k = 0; k < inv.size(); ++k) {
        if (inv[k] < 0) inv[k] = static_cast<long>(k);
      }
      p = inv;
    }
    for (long i = 0; i < n; ++i) {
      const long j = p[static_cast<std::size_t>(i)];
      if (e.self_paired() && j < i) continue;
      h.hyperbolic.add_edge({copy(id, i), copy(e.head, i), e.head_cusp, copy(e.tail, j), e.tail_cusp, e.label});
      m.hyperbolic.edge_map[copy(id, i)] = {id, false};
    }
  }
  std::map<std::string, Rational> scale;
  for (const auto& [w, _] : h.seifert) scale[w] = small_rational(rng);
  for (const auto& [id, s] : base.slopes) {
    const std::vector<long> p = permutation();
    for (long i = 0; i < n; ++i) {
      const std::string w = copy(s.seifert, p[static_cast<std::size_t>(i)]);
      h.slopes[copy(id, i)] = {copy(id, i), copy(s.vertex, i), s.cusp, w, scale.at(w) * s.slope};
      if (base.signs.count(id)) h.signs[copy(id, i)] = base.signs.at(id);
      m.slope_map[copy(id, i)] = id;
    }
  }
  for (const auto& [id, e] : base.seifert_edges) {
    const std::vector<long> p = permutation();
    for (long i = 0; i < n; ++i) {
      h.seifert_edges[copy(id, i)] = {copy(id, i), copy(e.a, i), copy(e.b, p[static_cast<std::size_t>(i)]), e.degree};
      if (base.signs.count(id)) h.signs[copy(id, i)] = base.signs.at(id);
      m.seifert_edge_map[copy(id, i)] = {id, false};
    }
  }

  // Keep the component of the first vertex.
  std::vector<std::string> vs;
  for (const auto& [v, _] : h.hyperbolic.vertices) vs.push_back(v);
  for (const auto& [w, _] : h.seifert) vs.push_back(w);
  std::vector<std::pair<std::string, std::string>> links;
  for (const auto& [_, e] : h.hyperbolic.edges) links.emplace_back(e.head, e.tail);
  for (const auto& [_, s] : h.slopes) links.emplace_back(s.vertex, s.seifert);
  for (const auto& [_, e] : h.seifert_edges) links.emplace_back(e.a, e.b);
  const std::string first = base.hyperbolic.vertices.empty() ? copy(base.seifert.begin()->first, 0)
                                                             : copy(base.hyperbolic.vertices.begin()->first, 0);
  std::set<std::string> kept;
  for (const auto& c : components(vs, links)) {
    if (std::find(c.begin(), c.end(), first) != c.end()) kept.insert(c.begin(), c.end());
  }
  auto prune = [&kept](auto& map, auto&& alive, auto& images) {
    for (auto it = map.begin(); it != map.end();) {
      if (alive(it->second, it->first)) {
        ++it;
        continue;
      }
      images.erase(it->first);
      it = map.erase(it);
    }
  };
  prune(h.hyperbolic.vertices, [&](const auto&, const std::string& v) { return kept.count(v) > 0; },
        m.hyperbolic.vertex_map);
  for (auto it = m.hyperbolic.vertex_coverings.begin(); it != m.hyperbolic.vertex_coverings.end();) {
    it = kept.count(it->first) ? std::next(it) : m.hyperbolic.vertex_coverings.erase(it);
  }
  prune(h.seifert, [&](const auto&, const std::string& w) { return kept.count(w) > 0; }, m.seifert_map);
  prune(h.hyperbolic.edges, [&](const Edge& e, const auto&) { return kept.count(e.head) > 0; }, m.hyperbolic.edge_map);
  prune(h.slopes, [&](const SlopeEdge& s, const auto&) { return kept.count(s.vertex) > 0; }, m.slope_map);
  prune(h.seifert_edges, [&](const SeifertEdge& e, const auto&) { return kept.count(e.a) > 0; }, m.seifert_edge_map);
  for (auto it = h.signs.begin(); it != h.signs.end();) {
    it = h.slopes.count(it->first) || h.seifert_edges.count(it->first) ? std::next(it) : h.signs.erase(it);
  }

  h = random_h_moves(h, rng, static_cast<int>(uniform(rng, 0, 6)));
  return out;
}

HGraph random_h_moves(const HGraph& h, std::mt19937_64& rng, int count) {
  HGraph out = h;
  std::vector<std::string> o_vertices;
  std::vector<std::string> all_vertices;
  for (const auto& [w, sv] : h.seifert) {
    all_vertices.push_back(w);
    if (sv.type == FiberType::O) o_vertices.push_back(w);
  }
  std::vector<std::string> slope_edges;
  for (const auto& [id, _] : h.slopes) slope_edges.push_back(id);
  static const std::vector<Rational> factors = {Rational(1, 2), Rational(2), Rational(3, 2), Rational(2, 3), Rational(3)};
  for (int k = 0; k < count; ++k) {
    switch (uniform(rng, 0, 2)) {
      case 0:
        if (!o_vertices.empty()) out = flip_signs_at(out, pick(rng, o_vertices));
        break;
      case 1:
        if (!slope_edges.empty()) out = negate_slope(out, pick(rng, slope_edges));
        break;
      default:
        if (!all_vertices.empty()) out = scale_slopes(out, pick(rng, all_vertices), pick(rng, factors));
        break;
    }
  }
  return out;
}

TypedGraph generate_typed_tree(std::mt19937_64& rng, int vertices, int max_parallel) {
  TypedGraph g;
  auto u = [](long i) { return "u" + std::to_string(i); };
  for (long i = 0; i < vertices; ++i) g.vertices[u(i)] = "t" + std::to_string(i);
  for (long i = 1; i < vertices; ++i) {
    const long parent = uniform(rng, 0, i - 1);
    const std::string type = "k" + std::to_string(i);
    const long copies = uniform(rng, 1, max_parallel);
    for (long j = 0; j < copies; ++j) {
      const std::string id = type + "_" + std::to_string(j);
      g.edges[id] = uniform(rng, 0, 1) ? TypedEdge{id, u(parent), u(i), type} : TypedEdge{id, u(i), u(parent), type};
    }
  }
  return g;
}

GeneratedTypedCover generate_typed_cover(const TypedGraph& base, std::mt19937_64& rng, int sheets) {
  const long n = uniform(rng, 1, sheets);
  auto copy = [](const std::string& v, long i) { return v + "." + std::to_string(i); };
  TypedGraph g;
  CoveringMap m;
  for (long i = 0; i < n; ++i) {
    for (const auto& [v, t] : base.vertices) {
      g.vertices[copy(v, i)] = t;
      m.vertex_map[copy(v, i)] = v;
    }
  }
  for (const auto& [id, e] : base.edges) {
    std::vector<long> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0L);
    std::shuffle(p.begin(), p.end(), rng);
    for (long i = 0; i < n; ++i) {
      const std::string cid = copy(id, i);
      g.edges[cid] = {cid, copy(e.a, i), copy(e.b, p[static_cast<std::size_t>(i)]), e.type};
      m.edge_map[cid] = {id, false};
    }
  }
  std::vector<std::string> vs;
  std::vector<std::pair<std::string, std::string>> links;
  for (const auto& [v, _] : g.vertices) vs.push_back(v);
  for (const auto& [_, e] : g.edges) links.emplace_back(e.a, e.b);
  const auto comp = components(vs, links).front();
  const std::set<std::string> keep(comp.begin(), comp.end());
  GeneratedTypedCover out;
  for (const auto& v : comp) {
    out.graph.vertices[v] = g.vertices.at(v);
    out.map.vertex_map[v] = m.vertex_map.at(v);
  }
  for (const auto& [id, e] : g.edges) {
    if (!keep.count(e.a)) continue;
    out.graph.edges[id] = e;
    out.map.edge_map[id] = m.edge_map.at(id);
  }
  out.graph.permutations = base.permutations;
  return out;
}

}  // namespace qigraph
