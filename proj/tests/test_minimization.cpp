#include "builders.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "qigraph/error.hpp"
#include "qigraph/generate.hpp"
#include "qigraph/minimization.hpp"

using namespace qigraph;
using namespace testing_support;

namespace {

GeneratedCatalog catalog_for(std::uint64_t seed) {
  auto rng = rng_for(seed);
  return generate_catalog(rng);
}

}  // namespace

TEST_SUITE("normalize_labels") {
  TEST_CASE("minimal labels are left alone") {
    const NahGraph g = load_fixture_graph("two_cycle.json");
    const Quotient q = normalize_labels(g);
    CHECK(q.graph.vertices == g.vertices);
    for (const auto& [id, e] : g.edges) CHECK(q.graph.edges.at(id).label == e.label);
    for (const auto& [v, c] : q.morphism.vertex_coverings) CHECK(c == identity_covering_id(g.vertices.at(v)));
  }

  TEST_CASE("declared quotient conjugates the labels") {
    const NahGraph g = load_fixture_graph("A2.json");
    const Quotient q = normalize_labels(g);
    CHECK(q.graph.vertices.at("x") == "N");
    const CoveringEntry c = g.catalog->covering("N2>N");
    for (const auto& [id, e] : g.edges) {
      const Matrix2 want = c.for_source(e.tail_cusp)->psi * e.label * c.for_source(e.head_cusp)->psi.inverse();
      CHECK(q.graph.edges.at(id).label == want);
    }
    const Report r = verify_morphism(g, q.graph, q.morphism);
    CHECK_MESSAGE(r.ok(), r.str());
  }

  TEST_CASE("missing quotient declaration") {
    Catalog cat;
    declare(cat, orbifold("P", {cusp("c")}, false, false));
    const NahGraph g = graph(cat, {{"w", "P"}}, {edge("e", "w", "c", "w", "c", Matrix2(0, 1, 1, 0))});
    CHECK_THROWS_AS(normalize_labels(g), NotDeclared);
    CHECK_THROWS_AS(minimize(g), NotDeclared);
  }

  TEST_CASE("output validates and the morphism verifies on generated graphs") {
    const GeneratedCatalog cat = catalog_for(41);
    auto rng = rng_for(42);
    for (int i = 0; i < 100; ++i) {
      const NahGraph g = generate_graph(cat, rng, {6, 9, LabelMode::Any, false});
      const Quotient q = normalize_labels(g);
      CHECK(validate(q.graph).ok());
      const Report r = verify_morphism(g, q.graph, q.morphism);
      CHECK_MESSAGE(r.ok(), r.str());
    }
  }
}

TEST_SUITE("minimize") {
  TEST_CASE("already minimal graph") {
    const NahGraph loop = load_fixture_graph("loop.json");
    const Quotient q = minimize(loop);
    CHECK(isomorphic(q.graph, loop));
    CHECK(q.graph.vertices.size() == 1);
  }

  TEST_CASE("the two-vertex double collapses to the loop") {
    const NahGraph a = load_fixture_graph("A.json");
    const Quotient q = minimize(a);
    CHECK(isomorphic(q.graph, load_fixture_graph("loop.json")));
    CHECK(oracle::isomorphic_by_search(q.graph, load_fixture_graph("loop.json")));
    CHECK(verify_morphism(a, q.graph, q.morphism).ok());
    CHECK(isomorphic(brute_force_minimize(a), q.graph));
  }

  TEST_CASE("a non-minimal label is first normalized") {
    const Quotient q = minimize(load_fixture_graph("A2.json"));
    CHECK(isomorphic(q.graph, load_fixture_graph("loop.json")));
  }

  TEST_CASE("stable partition of the double") {
    const VertexPartition p = stable_partition(load_fixture_graph("A.json"));
    CHECK(p == VertexPartition{{"a", "b"}});
    const VertexPartition q = stable_partition(load_fixture_graph("two_cycle.json"));
    CHECK(q.size() == 2);
  }

  TEST_CASE("idempotent, sound and balance-preserving on generated graphs") {
    const GeneratedCatalog cat = catalog_for(43);
    auto rng = rng_for(44);
    for (int i = 0; i < 100; ++i) {
      const NahGraph g = generate_graph(cat, rng, {7, 10, LabelMode::Any, false});
      const Quotient q = minimize(g);
      const Report r = verify_morphism(g, q.graph, q.morphism);
      CHECK_MESSAGE(r.ok(), r.str());
      CHECK(isomorphic(minimize(q.graph).graph, q.graph));
      CHECK(balanced(q.graph).balanced == balanced(g).balanced);
      CHECK(q.graph.vertices.size() <= g.vertices.size());
    }
  }

  TEST_CASE("agrees with brute force on small graphs") {
    const GeneratedCatalog cat = catalog_for(45);
    auto rng = rng_for(46);
    int merged = 0;
    for (int i = 0; i < 60; ++i) {
      NahGraph g;
      if (i % 2 == 0) {
        g = generate_graph(cat, rng, {4, 6, LabelMode::Any, false});
      } else {
        const NahGraph base = generate_graph(cat, rng, {2, 3, LabelMode::Any, false});
        g = generate_cover(cat, base, rng, 2).graph;
        if (g.vertices.size() > 5) continue;
      }
      const NahGraph fast = minimize(g).graph;
      const NahGraph slow = brute_force_minimize(g, 6);
      CHECK(oracle::isomorphic_by_search(fast, slow));
      merged += fast.vertices.size() < g.vertices.size() ? 1 : 0;
    }
    CHECK(merged > 0);
  }

  TEST_CASE("endpoints of morphism chains minimize to isomorphic graphs") {
    const GeneratedCatalog cat = catalog_for(47);
    auto rng = rng_for(48);
    for (int i = 0; i < 30; ++i) {
      const NahGraph c = generate_graph(cat, rng, {4, 6, LabelMode::Any, false});
      const NahGraph b = generate_cover(cat, c, rng, 2).graph;
      const NahGraph a = generate_cover(cat, b, rng, 2).graph;
      const NahGraph mc = minimize(c).graph;
      CHECK(isomorphic(minimize(a).graph, mc));
      CHECK(isomorphic(minimize(b).graph, mc));
    }
  }

  TEST_CASE("brute force refuses large graphs") {
    const GeneratedCatalog cat = catalog_for(49);
    auto rng = rng_for(50);
    NahGraph g;
    do g = generate_graph(cat, rng, {8, 12, LabelMode::Any, false});
    while (g.vertices.size() <= 3);
    CHECK_THROWS_AS(brute_force_minimize(g, 3), TooLarge);
  }
}

TEST_SUITE("canonical_form") {
  TEST_CASE("relabelled ids give the same form") {
    CHECK(canonical_form(load_fixture_graph("A.json")) == canonical_form(load_fixture_graph("A_relabeled.json")));
    const GeneratedCatalog cat = catalog_for(51);
    auto rng = rng_for(52);
    for (int i = 0; i < 50; ++i) {
      const NahGraph g = generate_graph(cat, rng, {8, 12, LabelMode::Any, false});
      CHECK(canonical_form(g) == canonical_form(shuffle_ids(g, rng)));
    }
  }

  TEST_CASE("a different label coset gives a different form") {
    NahGraph g = load_fixture_graph("two_cycle.json");
    NahGraph h = g;
    h.edges.at("e1").label = Matrix2(2, 1, 0, -1);
    CHECK(canonical_form(g) != canonical_form(h));
    CHECK_FALSE(isomorphic(g, h));
    CHECK_FALSE(oracle::isomorphic_by_search(g, h));
  }

  TEST_CASE("agrees with exhaustive isomorphism search") {
    const GeneratedCatalog cat = catalog_for(53);
    auto rng = rng_for(54);
    int iso = 0;
    for (int i = 0; i < 150; ++i) {
      const NahGraph a = generate_graph(cat, rng, {5, 7, LabelMode::Any, true});
      NahGraph b;
      if (i % 3 == 0) {
        b = shuffle_ids(a, rng);
      } else if (i % 3 == 1) {
        b = shuffle_ids(a, rng);
        auto it = b.edges.begin();
        std::advance(it, static_cast<long>(rng() % b.edges.size()));
        it->second.label = Matrix2(Rational(1 + rng() % 3), 0, 0, 1) * it->second.label;
      } else {
        b = generate_graph(cat, rng, {5, 7, LabelMode::Any, true});
      }
      const bool want = oracle::isomorphic_by_search(a, b);
      CHECK(isomorphic(a, b) == want);
      iso += want ? 1 : 0;
    }
    CHECK(iso >= 50);
  }
}

TEST_SUITE("bisimilar") {
  TEST_CASE("examples") {
    const NahGraph a = load_fixture_graph("A.json");
    CHECK(bisimilar(a, load_fixture_graph("A_relabeled.json")));
    CHECK(bisimilar(a, load_fixture_graph("loop.json")));
    CHECK(bisimilar(a, normalize_labels(a).graph));
    CHECK(bisimilar(load_fixture_graph("A2.json"), load_fixture_graph("loop.json")));
  }

  TEST_CASE("breaking balance breaks bisimilarity") {
    const NahGraph good = load_fixture_graph("two_cycle.json");
    const NahGraph bad = load_fixture_graph("unbalanced.json");
    REQUIRE(balanced(good).balanced != balanced(bad).balanced);
    CHECK_FALSE(bisimilar(good, bad));
  }
}
