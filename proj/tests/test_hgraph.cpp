#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "qigraph/generate.hpp"
#include "qigraph/minimization.hpp"

using namespace qigraph;
using namespace testing_support;

namespace {

std::string dump(const HGraph& h) { return dump_json(h_graph_to_json(h)); }

HMorphism load_morphism(const std::string& name) { return std::get<HMorphism>(load_document(fixture(name)).payload); }

GeneratedCatalog catalog_for(std::uint64_t seed) {
  auto rng = rng_for(seed);
  return generate_catalog(rng);
}

std::vector<std::string> sign_edges(const HGraph& h) {
  std::vector<std::string> out;
  for (const auto& [id, _] : h.signs) out.push_back(id);
  return out;
}

void check_sound(const HGraph& h) {
  const HQuotient q = minimize_h(h);
  CHECK(validate_h(q.graph).ok());
  const Report r = verify_h_morphism(h_canonical_moves(h), q.graph, q.morphism);
  CHECK_MESSAGE(r.ok(), r.str());
  CHECK(h_isomorphic(minimize_h(q.graph).graph, q.graph));
}

}  // namespace

TEST_SUITE("validate_h") {
  TEST_CASE("a plain graph is a valid H-graph") {
    const HGraph h = load_fixture_h_graph("h_pure.json");
    CHECK(h.is_seifert_free());
    CHECK(validate_h(h).ok());
    CHECK(validate_h(from_nah(load_fixture_graph("two_cycle.json"))).ok());
  }

  TEST_CASE("fixtures") {
    for (const char* name : {"h_two_white.json", "h_two_white_min.json", "h_o_to_n.json", "h_o_to_n_min.json",
                             "h_same_signs.json"}) {
      CAPTURE(name);
      const Report r = validate_h(load_fixture_h_graph(name));
      CHECK_MESSAGE(r.ok(), r.str());
    }
  }

  TEST_CASE("sign on an edge into a type n vertex") {
    CHECK(validate_h(load_fixture_h_graph("h_bad_sign.json")).has_rule("sign"));
  }

  TEST_CASE("order-4 symmetry at a Seifert edge") {
    CHECK(validate_h(load_fixture_h_graph("h_bad_degree4.json")).has_rule("seifert_symmetry"));
  }

  TEST_CASE("missing sign and zero slope") {
    HGraph h = load_fixture_h_graph("h_same_signs.json");
    h.signs.erase("x0");
    CHECK(validate_h(h).has_rule("sign"));
    h = load_fixture_h_graph("h_same_signs.json");
    h.slopes.at("x0").slope = Vec2{0, 0};
    CHECK(validate_h(h).has_rule("slope"));
  }

  TEST_CASE("generated H-graphs are valid") {
    const GeneratedCatalog cat = catalog_for(71);
    auto rng = rng_for(72);
    for (int i = 0; i < 60; ++i) {
      HShape shape;
      shape.hyperbolic = i % 5 != 0;
      const HGraph h = generate_h_graph(cat, rng, shape);
      const Report r = validate_h(h);
      CHECK_MESSAGE(r.ok(), r.str());
    }
  }
}

TEST_SUITE("moves") {
  TEST_CASE("flip at a type o vertex flips every adjacent sign") {
    const HGraph h = load_fixture_h_graph("h_two_white.json");
    const HGraph f = flip_signs_at(h, "s0");
    CHECK(f.signs.at("x0") == -1);
    CHECK(f.signs.at("f") == -1);
    CHECK(f.signs.at("f2") == -1);
    CHECK(f.signs.at("x1") == 1);
    CHECK(dump(h_canonical_moves(f)) == dump(h_canonical_moves(h)));
  }

  TEST_CASE("negating a slope negates its sign") {
    const HGraph h = load_fixture_h_graph("h_two_white.json");
    const HGraph n = negate_slope(h, "x1");
    CHECK(n.slopes.at("x1").slope == Vec2{-2, 0});
    CHECK(n.signs.at("x1") == -1);
    CHECK(dump(h_canonical_moves(n)) == dump(h_canonical_moves(h)));
  }

  TEST_CASE("scaling the slopes at a Seifert vertex by 3/2") {
    const HGraph h = load_fixture_h_graph("h_two_white.json");
    const HGraph s = scale_slopes(h, "s1", Rational(3, 2));
    CHECK(s.slopes.at("x1").slope == Vec2{3, 0});
    CHECK(dump(h_canonical_moves(s)) == dump(h_canonical_moves(h)));
  }

  TEST_CASE("canonical form is idempotent and invariant under random move sequences") {
    const GeneratedCatalog cat = catalog_for(73);
    auto rng = rng_for(74);
    for (int i = 0; i < 60; ++i) {
      const HGraph h = generate_h_graph(cat, rng, {});
      const std::string canon = dump(h_canonical_moves(h));
      CHECK(dump(h_canonical_moves(h_canonical_moves(h))) == canon);
      for (int k = 0; k < 3; ++k) {
        const HGraph moved = random_h_moves(h, rng, 1 + static_cast<int>(rng() % 20));
        CHECK(dump(h_canonical_moves(moved)) == canon);
      }
    }
  }

  TEST_CASE("sign classes agree with coboundary enumeration") {
    const GeneratedCatalog cat = catalog_for(75);
    auto rng = rng_for(76);
    int tried = 0;
    int equivalent = 0;
    while (tried < 120) {
      HShape shape;
      shape.max_vertices = 3;
      shape.max_edges = 4;
      const HGraph h = generate_h_graph(cat, rng, shape);
      const auto ids = sign_edges(h);
      if (ids.empty() || ids.size() > 6) continue;
      ++tried;
      HGraph a = h;
      HGraph b = h;
      for (const auto& id : ids) a.signs[id] = rng() % 2 ? 1 : -1;
      if (rng() % 2) {
        // Half the time derive b from a by flips, so both answers occur.
        b = a;
        for (const auto& [w, sv] : h.seifert) {
          if (sv.type == FiberType::O && rng() % 2) b = flip_signs_at(b, w);
        }
      } else {
        for (const auto& id : ids) b.signs[id] = rng() % 2 ? 1 : -1;
      }
      const bool want = oracle::signs_equivalent_by_enumeration(h, a.signs, b.signs);
      CHECK(want == (dump(h_canonical_moves(a)) == dump(h_canonical_moves(b))));
      equivalent += want ? 1 : 0;
    }
    CHECK(equivalent > 20);
    CHECK(equivalent < 110);
  }
}

TEST_SUITE("verify_h_morphism") {
  TEST_CASE("identity") {
    for (const char* name : {"h_pure.json", "h_two_white.json", "h_o_to_n.json"}) {
      CAPTURE(name);
      const HGraph h = load_fixture_h_graph(name);
      const Report r = verify_h_morphism(h, h, identity_h_morphism(h));
      CHECK_MESSAGE(r.ok(), r.str());
    }
  }

  TEST_CASE("colour must be preserved") {
    const HGraph h = load_fixture_h_graph("h_two_white.json");
    HGraph black = h;
    for (auto& [_, sv] : black.seifert) sv.color = SeifertColor::Black;
    CHECK(verify_h_morphism(h, black, identity_h_morphism(h)).has_rule("color"));
  }

  TEST_CASE("o to n merge with equal signs and no n neighbour") {
    const HGraph src = load_fixture_h_graph("h_same_signs.json");
    const HGraph dst = load_fixture_h_graph("h_o_to_n_min.json");
    const Report r = verify_h_morphism(src, dst, load_morphism("h_same_signs_to_n.json"));
    CHECK(r.has_rule("o_to_n"));
  }

  TEST_CASE("o to n merge with opposite signs is permitted") {
    const HGraph src = load_fixture_h_graph("h_o_to_n.json");
    const HGraph dst = load_fixture_h_graph("h_o_to_n_min.json");
    const Report r = verify_h_morphism(src, dst, load_morphism("h_same_signs_to_n.json"));
    CHECK_MESSAGE(r.ok(), r.str());
  }

  TEST_CASE("slope must push forward") {
    const HGraph src = load_fixture_h_graph("h_o_to_n.json");
    HGraph dst = load_fixture_h_graph("h_o_to_n_min.json");
    dst.slopes.at("x").slope = Vec2{1, 1};
    CHECK(verify_h_morphism(src, dst, load_morphism("h_same_signs_to_n.json")).has_rule("slope"));
  }

  TEST_CASE("generated covers verify and compose") {
    const GeneratedCatalog cat = catalog_for(77);
    auto rng = rng_for(78);
    for (int i = 0; i < 30; ++i) {
      const HGraph base = generate_h_graph(cat, rng, {});
      const GeneratedHCover mid = generate_h_cover(base, rng, 2);
      const GeneratedHCover top = generate_h_cover(mid.graph, rng, 2);
      REQUIRE(verify_h_morphism(mid.graph, base, mid.morphism).ok());
      REQUIRE(verify_h_morphism(top.graph, mid.graph, top.morphism).ok());
      const Report r = verify_h_morphism(top.graph, base, compose_h_morphisms(top.morphism, mid.morphism));
      CHECK_MESSAGE(r.ok(), r.str());
    }
  }
}

TEST_SUITE("minimize_h") {
  TEST_CASE("two white vertices merge and parallel edges collapse") {
    const HGraph h = load_fixture_h_graph("h_two_white.json");
    const HQuotient q = minimize_h(h);
    CHECK(q.graph.seifert.size() == 1);
    CHECK(q.graph.seifert_edges.size() == 1);
    CHECK(h_isomorphic(q.graph, load_fixture_h_graph("h_two_white_min.json")));
    check_sound(h);
  }

  TEST_CASE("opposite signs promote to type n") {
    const HGraph h = load_fixture_h_graph("h_o_to_n.json");
    const HQuotient q = minimize_h(h);
    CHECK(h_isomorphic(q.graph, load_fixture_h_graph("h_o_to_n_min.json")));
    check_sound(h);
  }

  TEST_CASE("equal signs merge without promotion") {
    const HGraph h = load_fixture_h_graph("h_same_signs.json");
    const HQuotient q = minimize_h(h);
    REQUIRE(q.graph.seifert.size() == 1);
    CHECK(q.graph.seifert.begin()->second.type == FiberType::O);
    CHECK(q.graph.hyperbolic.vertices.size() == 1);
    check_sound(h);
  }

  TEST_CASE("plain input agrees with minimize") {
    const GeneratedCatalog cat = catalog_for(79);
    auto rng = rng_for(80);
    for (int i = 0; i < 40; ++i) {
      const NahGraph g = generate_graph(cat, rng, {6, 9, LabelMode::Any, false});
      const HQuotient q = minimize_h(from_nah(g));
      CHECK(q.graph.is_seifert_free());
      CHECK(isomorphic(q.graph.hyperbolic, minimize(g).graph));
    }
    CHECK(h_isomorphic(minimize_h(load_fixture_h_graph("h_pure.json")).graph,
                       from_nah(load_fixture_graph("loop.json"))));
  }

  TEST_CASE("sound and idempotent on generated graphs and covers") {
    const GeneratedCatalog cat = catalog_for(81);
    auto rng = rng_for(82);
    for (int i = 0; i < 30; ++i) {
      const HGraph base = generate_h_graph(cat, rng, {});
      check_sound(base);
      check_sound(generate_h_cover(base, rng, 3).graph);
    }
  }
}

TEST_SUITE("h_isomorphic") {
  TEST_CASE("moves and relabelling") {
    const HGraph h = load_fixture_h_graph("h_two_white.json");
    CHECK(h_isomorphic(h, flip_signs_at(negate_slope(h, "x0"), "s1")));
    CHECK_FALSE(h_isomorphic(h, load_fixture_h_graph("h_two_white_min.json")));
    CHECK_FALSE(h_isomorphic(load_fixture_h_graph("h_same_signs.json"), load_fixture_h_graph("h_o_to_n.json")));
    const auto m = find_h_isomorphism(h, h);
    REQUIRE(m);
    CHECK(verify_h_morphism(h, h, *m).ok());
  }
}
