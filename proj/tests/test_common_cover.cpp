#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "qigraph/error.hpp"
#include "qigraph/generate.hpp"

using namespace qigraph;
using namespace testing_support;

namespace {

TypedGraph load_typed(const std::string& name) { return std::get<TypedGraph>(load_document(fixture(name)).payload); }

// Fixture covers name their vertices "<base><sheet>" and edges "<base>.<sheet>".
CoveringMap map_by_name(const TypedGraph& cover) {
  CoveringMap m;
  for (const auto& [v, _] : cover.vertices) m.vertex_map[v] = v.substr(0, v.size() - 1);
  for (const auto& [id, _] : cover.edges) m.edge_map[id] = {id.substr(0, id.find('.')), false};
  return m;
}

CoveringMap identity_map(const TypedGraph& g) {
  CoveringMap m;
  for (const auto& [v, _] : g.vertices) m.vertex_map[v] = v;
  for (const auto& [id, _] : g.edges) m.edge_map[id] = {id, false};
  return m;
}

TypedGraph typed(std::initializer_list<std::pair<const std::string, std::string>> vertices,
                 std::initializer_list<TypedEdge> edges) {
  TypedGraph g;
  g.vertices = vertices;
  for (const auto& e : edges) g.edges[e.id] = e;
  return g;
}

// Fibers of a covering onto g_i have one size per vertex of g_i.
void check_degrees(const CommonCover& c, const TypedGraph& g, const CoveringMap& m) {
  std::map<std::string, std::size_t> fiber;
  for (const auto& [_, v] : m.vertex_map) ++fiber[v];
  CHECK(fiber.size() == g.vertices.size());
  for (const auto& [_, n] : fiber) CHECK(n * g.vertices.size() == c.cover.vertices.size());
}

void check_common_cover(const CommonCover& c, const TypedGraph& g1, const TypedGraph& g2) {
  CHECK(validate_typed(c.cover).ok());
  CHECK(verify_covering(c.cover, g1, c.to_first));
  CHECK(verify_covering(c.cover, g2, c.to_second));
  check_degrees(c, g1, c.to_first);
  check_degrees(c, g2, c.to_second);
}

}  // namespace

TEST_SUITE("verify_covering") {
  TEST_CASE("identity") {
    const TypedGraph g = load_typed("cc_base.json");
    CHECK(verify_covering(g, g, identity_map(g)));
  }

  TEST_CASE("fixture double covers") {
    const TypedGraph base = load_typed("cc_base.json");
    for (const char* name : {"cc_cross_k.json", "cc_cross_l.json"}) {
      const TypedGraph g = load_typed(name);
      CHECK(verify_covering(g, base, map_by_name(g)));
    }
  }

  TEST_CASE("collapsing two edges at a vertex is not a covering") {
    const TypedGraph base = load_typed("cc_base.json");
    CoveringMap m = identity_map(base);
    m.edge_map["k1"] = {"k0", false};
    CHECK_FALSE(verify_covering(base, base, m));
  }

  TEST_CASE("types and orientations must match") {
    const TypedGraph base = load_typed("cc_base.json");
    CoveringMap m = identity_map(base);
    m.edge_map["k1"] = {"k1", true};
    CHECK_FALSE(verify_covering(base, base, m));
    m = identity_map(base);
    m.vertex_map["u"] = "w";
    CHECK_FALSE(verify_covering(base, base, m));
  }
}

TEST_SUITE("validate_typed") {
  TEST_CASE("edge types must join consistent vertex types") {
    TypedGraph g = load_typed("cc_base.json");
    CHECK(validate_typed(g).ok());
    g.edges["l1"].a = "u";
    CHECK(validate_typed(g).has_rule("edge_type"));
  }

  TEST_CASE("permutation generators") {
    TypedGraph g = load_typed("cc_base.json");
    g.permutations["tu"] = {{1, 0}};
    CHECK(validate_typed(g).ok());
    g.permutations["tu"] = {{0, 0}};
    CHECK(validate_typed(g).has_rule("permutation"));
  }
}

TEST_SUITE("degree_refinement") {
  TEST_CASE("regular single-type graph has one block") {
    const TypedGraph k4 = typed({{"a", "t"}, {"b", "t"}, {"c", "t"}, {"d", "t"}},
                                {{"ab", "a", "b", "k"}, {"ac", "a", "c", "k"}, {"ad", "a", "d", "k"},
                                 {"bc", "b", "c", "k"}, {"bd", "b", "d", "k"}, {"cd", "c", "d", "k"}});
    const Refinement r = degree_refinement(k4);
    CHECK(r.blocks == 1);
    CHECK(r.matrix.at({0, 0, "k"}) == 3);
  }

  TEST_CASE("different degree sequences give different matrices") {
    const TypedGraph path = typed({{"a", "t"}, {"b", "t"}, {"c", "t"}}, {{"ab", "a", "b", "k"}, {"bc", "b", "c", "k"}});
    const TypedGraph tri = typed({{"a", "t"}, {"b", "t"}, {"c", "t"}},
                                 {{"ab", "a", "b", "k"}, {"bc", "b", "c", "k"}, {"ca", "c", "a", "k"}});
    CHECK(degree_refinement(path).blocks == 2);
    CHECK(degree_refinement(path).matrix != degree_refinement(tri).matrix);
    CHECK_THROWS_AS(find_common_cover(path, tri, 24), IncompatibleRefinement);
  }

  TEST_CASE("a cover and its base have the same matrix") {
    auto rng = rng_for(91);
    for (int i = 0; i < 40; ++i) {
      const TypedGraph base = generate_typed_tree(rng, 2 + i % 5, 3);
      const GeneratedTypedCover c = generate_typed_cover(base, rng, 4);
      REQUIRE(verify_covering(c.graph, base, c.map));
      const Refinement a = degree_refinement(base);
      const Refinement b = degree_refinement(c.graph);
      CHECK(a.blocks == b.blocks);
      CHECK(a.matrix == b.matrix);
      CHECK(a.block_type == b.block_type);
    }
  }
}

TEST_SUITE("find_common_cover") {
  TEST_CASE("a graph with itself") {
    const TypedGraph g = load_typed("cc_cross_k.json");
    const auto c = find_common_cover(g, g, 6);
    REQUIRE(c);
    CHECK(c->cover.vertices.size() == g.vertices.size());
    check_common_cover(*c, g, g);
  }

  TEST_CASE("double covers of a two-vertex base give a four-vertex cover") {
    const TypedGraph c1 = typed({{"a0", "tu"}, {"b0", "tv"}, {"a1", "tu"}, {"b1", "tv"}},
                                {{"p", "a0", "b0", "k"}, {"q", "a0", "b1", "k"}, {"r", "a1", "b1", "k"},
                                 {"s", "a1", "b0", "k"}});
    const TypedGraph c2 = typed({{"x", "tu"}, {"y", "tv"}, {"z", "tu"}, {"t", "tv"}},
                                {{"1", "y", "x", "k"}, {"2", "x", "t", "k"}, {"3", "t", "z", "k"}, {"4", "z", "y", "k"}});
    const auto c = find_common_cover(c1, c2, 8);
    REQUIRE(c);
    CHECK(c->cover.vertices.size() == 4);
    check_common_cover(*c, c1, c2);
  }

  TEST_CASE("twisted on different edges needs both twists") {
    const TypedGraph k = load_typed("cc_cross_k.json");
    const TypedGraph l = load_typed("cc_cross_l.json");
    CHECK_FALSE(find_common_cover(k, l, 6).has_value());
    const auto c = find_common_cover(k, l, 48);
    REQUIRE(c);
    CHECK(c->cover.vertices.size() == 12);
    CHECK(oracle::fiber_product_component_size(k, map_by_name(k), l, map_by_name(l)) == 12);
    check_common_cover(*c, k, l);
  }

  TEST_CASE("incompatible refinements") {
    CHECK_THROWS_AS(find_common_cover(load_typed("cc_base.json"), load_typed("cc_mismatch.json"), 48),
                    IncompatibleRefinement);
  }

  TEST_CASE("non-tree base") {
    const TypedGraph g = load_typed("cc_cycle.json");
    CHECK_THROWS_AS(find_common_cover(g, g, 12), BaseNotTree);
    const auto c = find_common_cover(g, g, 12, true);
    REQUIRE(c);
    check_common_cover(*c, g, g);
  }

  TEST_CASE("the search is deterministic") {
    const TypedGraph k = load_typed("cc_cross_k.json");
    const TypedGraph l = load_typed("cc_cross_l.json");
    const auto a = find_common_cover(k, l, 48);
    const auto b = find_common_cover(k, l, 48);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(dump_json(typed_graph_to_json(a->cover)) == dump_json(typed_graph_to_json(b->cover)));
  }

  TEST_CASE("covers of random trees are found within the fiber product bound") {
    auto rng = rng_for(92);
    for (int i = 0; i < 60; ++i) {
      const TypedGraph base = generate_typed_tree(rng, 2 + i % 4, 3);
      const GeneratedTypedCover c1 = generate_typed_cover(base, rng, 3);
      const GeneratedTypedCover c2 = generate_typed_cover(base, rng, 3);
      const std::size_t bound = oracle::fiber_product_component_size(c1.graph, c1.map, c2.graph, c2.map);
      CAPTURE(i);
      const auto c = find_common_cover(c1.graph, c2.graph, static_cast<int>(bound));
      REQUIRE(c);
      CHECK(c->cover.vertices.size() <= bound);
      CHECK(c->cover.vertices.size() % std::lcm(c1.graph.vertices.size(), c2.graph.vertices.size()) == 0);
      check_common_cover(*c, c1.graph, c2.graph);
    }
  }
}
