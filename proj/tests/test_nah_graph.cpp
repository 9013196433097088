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

const Matrix2 kSwap(0, 1, 1, 0);

Catalog one_cusp_catalog() {
  Catalog cat;
  declare(cat, orbifold("M", {cusp("c")}));
  declare(cat, orbifold("A", {cusp("c")}, true));
  declare(cat, orbifold("T", {cusp("c0"), cusp("c1")}));
  declare(cat, orbifold("D", {cusp("c", 2)}));
  return cat;
}

NahGraph loop_graph(const Matrix2& label, const std::string& orb = "M") {
  return graph(one_cusp_catalog(), {{"w", orb}}, {edge("e", "w", "c", "w", "c", label)});
}

// Triangle of two-cusp vertices with the given delta on every edge.
NahGraph triangle(const Rational& d) {
  const Matrix2 l(d, 0, 0, -1);
  return graph(one_cusp_catalog(), {{"a", "T"}, {"b", "T"}, {"c", "T"}},
               {edge("e0", "a", "c0", "b", "c1", l), edge("e1", "b", "c0", "c", "c1", l),
                edge("e2", "c", "c0", "a", "c1", l)});
}

NahGraph reversed_edges(const NahGraph& g) {
  NahGraph out = g;
  for (auto& [id, e] : out.edges) {
    std::swap(e.head, e.tail);
    std::swap(e.head_cusp, e.tail_cusp);
    e.label = e.label.inverse();
  }
  return out;
}

}  // namespace

TEST_SUITE("validate") {
  TEST_CASE("single self-paired loop is the smallest legal graph") {
    const Report r = validate(loop_graph(kSwap));
    CHECK_MESSAGE(r.ok(), r.str());
  }

  TEST_CASE("positive determinant violates condition 3") {
    CHECK(validate(loop_graph(Matrix2::identity())).has_rule("cond3"));
  }

  TEST_CASE("all-arithmetic labels violate condition 6") {
    CHECK(validate(loop_graph(kSwap, "A")).has_rule("cond6"));
  }

  TEST_CASE("cusp degree mismatch violates condition 2") {
    const NahGraph g = graph(one_cusp_catalog(), {{"x", "M"}, {"y", "D"}}, {edge("e", "x", "c", "y", "c", kSwap)});
    CHECK(validate(g).has_rule("cond2"));
  }

  TEST_CASE("two edges at one cusp violate condition 1") {
    const NahGraph g = graph(one_cusp_catalog(), {{"x", "M"}, {"y", "M"}, {"z", "M"}},
                             {edge("e", "x", "c", "y", "c", kSwap), edge("f", "x", "c", "z", "c", kSwap)});
    CHECK(validate(g).has_rule("cond1"));
  }

  TEST_CASE("label not conjugating the cusp symmetry violates condition 5") {
    const Catalog cat = one_cusp_catalog();
    Catalog four = cat;
    declare(four, orbifold("Q", {cusp("c", 4)}));
    const NahGraph g = graph(four, {{"x", "Q"}, {"y", "Q"}}, {edge("e", "x", "c", "y", "c", Matrix2(1, 1, 0, -1))});
    CHECK(validate(g).has_rule("cond5"));
  }

  TEST_CASE("unglued cusps only fail in strict mode") {
    const NahGraph g = graph(one_cusp_catalog(), {{"x", "T"}}, {});
    CHECK(validate(g).has_rule("surjective"));
    CHECK_FALSE(validate(g, false).has_rule("surjective"));
  }

  TEST_CASE("disconnected graph") {
    const NahGraph g = graph(one_cusp_catalog(), {{"w", "M"}, {"z", "M"}},
                             {edge("e", "w", "c", "w", "c", kSwap), edge("f", "z", "c", "z", "c", kSwap)});
    CHECK(validate(g).has_rule("connected"));
  }

  TEST_CASE("fixtures are valid") {
    for (const char* name : {"two_cycle.json", "unbalanced.json", "loop.json", "A.json", "A_relabeled.json", "A2.json"}) {
      CAPTURE(name);
      const Report r = validate(load_fixture_graph(name));
      CHECK_MESSAGE(r.ok(), r.str());
    }
  }

  TEST_CASE("validity is unchanged by reversing every stored edge") {
    const GeneratedCatalog cat = [] {
      auto rng = rng_for(21);
      return generate_catalog(rng);
    }();
    auto rng = rng_for(22);
    for (int i = 0; i < 50; ++i) {
      const NahGraph g = generate_graph(cat, rng, {});
      const NahGraph r = reversed_edges(g);
      CHECK(validate(r).ok());
      CHECK(balanced(r).balanced == balanced(g).balanced);
      CHECK(is_integral(r).integral == is_integral(g).integral);
    }
  }
}

TEST_SUITE("delta") {
  TEST_CASE("examples") {
    CHECK(delta(loop_graph(kSwap), {"e", false}) == Rational(1));
    const NahGraph g = graph(one_cusp_catalog(), {{"x", "M"}, {"y", "M"}},
                             {edge("e", "x", "c", "y", "c", Matrix2(2, 0, 0, -1))});
    CHECK(delta(g, {"e", false}) == Rational(2));
    CHECK(delta(g, {"e", true}) == Rational(1, 2));
    CHECK_THROWS_AS(delta(g, {"nope", false}), UnknownEdge);
  }

  TEST_CASE("reversal inverts delta on generated graphs") {
    auto rng = rng_for(23);
    const GeneratedCatalog cat = generate_catalog(rng);
    for (int i = 0; i < 50; ++i) {
      const NahGraph g = generate_graph(cat, rng, {});
      for (const auto& [id, _] : g.edges) {
        CHECK(delta(g, {id, false}) * delta(g, {id, true}) == Rational(1));
        CHECK(delta(g, {id, false}) > Rational(0));
      }
    }
  }
}

TEST_SUITE("balanced") {
  TEST_CASE("trees are balanced whatever the labels") {
    const NahGraph g = graph(one_cusp_catalog(), {{"x", "M"}, {"y", "M"}},
                             {edge("e", "x", "c", "y", "c", Matrix2(7, 0, 0, -1))});
    const BalanceResult r = balanced(g);
    CHECK(r.balanced);
    CHECK(r.potential.at("x") == Rational(1));
    CHECK(r.potential.at("y") == Rational(1, 7));
  }

  TEST_CASE("two-cycle with deltas 2 and 1/2") {
    const NahGraph g = graph(one_cusp_catalog(), {{"v0", "T"}, {"v1", "T"}},
                             {edge("a", "v1", "c0", "v0", "c0", Matrix2(2, 0, 0, -1)),
                              edge("b", "v0", "c1", "v1", "c1", Matrix2(Rational(1, 2), 0, 0, -1))});
    REQUIRE(validate(g).ok());
    const BalanceResult r = balanced(g);
    CHECK(r.balanced);
    CHECK(r.potential.at("v0") == Rational(1));
    CHECK(r.potential.at("v1") == Rational(2));
  }

  TEST_CASE("triangle with deltas 2, 2, 2 is unbalanced") {
    const NahGraph g = triangle(2);
    REQUIRE(validate(g).ok());
    const BalanceResult r = balanced(g);
    CHECK_FALSE(r.balanced);
    CHECK(r.witness.has_value());
    CHECK(balanced(triangle(1)).balanced);
  }

  TEST_CASE("fixtures") {
    CHECK(balanced(load_fixture_graph("two_cycle.json")).balanced);
    CHECK_FALSE(balanced(load_fixture_graph("unbalanced.json")).balanced);
    CHECK(balanced(load_fixture_graph("loop.json")).balanced);
  }

  TEST_CASE("potential satisfies m(tail) = delta * m(head)") {
    auto rng = rng_for(24);
    const GeneratedCatalog cat = generate_catalog(rng);
    for (int i = 0; i < 100; ++i) {
      const NahGraph g = generate_graph(cat, rng, {8, 12, LabelMode::Balanced, false});
      const BalanceResult r = balanced(g);
      REQUIRE(r.balanced);
      CHECK(r.potential.at(g.vertices.begin()->first) == Rational(1));
      for (const auto& [id, e] : g.edges) {
        CHECK(r.potential.at(e.tail) == delta(g, {id, false}) * r.potential.at(e.head));
      }
    }
  }

  TEST_CASE("agrees with simple-cycle enumeration") {
    auto rng = rng_for(25);
    const GeneratedCatalog cat = generate_catalog(rng);
    int unbalanced_seen = 0;
    for (int i = 0; i < 200; ++i) {
      const NahGraph g = generate_graph(cat, rng, {6, 9, LabelMode::Any, false});
      const bool want = oracle::balanced_by_cycles(g);
      CHECK(balanced(g).balanced == want);
      unbalanced_seen += want ? 0 : 1;
    }
    CHECK(unbalanced_seen > 0);
  }
}

TEST_SUITE("is_integral") {
  TEST_CASE("examples") {
    CHECK(is_integral(loop_graph(kSwap)).integral);
    const NahGraph g = graph(one_cusp_catalog(), {{"x", "M"}, {"y", "M"}},
                             {edge("e", "x", "c", "y", "c", Matrix2(Rational(1, 2), 0, 0, -1))});
    const IntegralityResult r = is_integral(g);
    CHECK_FALSE(r.integral);
    CHECK(r.non_integral_edges == std::vector<std::string>{"e"});
  }

  TEST_CASE("lattices are taken into account") {
    // N2 cusps carry 2Z x Z, and diag(1,-1) maps it onto itself.
    const NahGraph g = load_fixture_graph("A2.json");
    CHECK(is_integral(g).integral);
  }

  TEST_CASE("integral graphs are balanced") {
    auto rng = rng_for(26);
    const GeneratedCatalog cat = generate_catalog(rng);
    for (int i = 0; i < 100; ++i) {
      const NahGraph g = generate_graph(cat, rng, {8, 12, LabelMode::Integral, false});
      REQUIRE(is_integral(g).integral);
      CHECK(balanced(g).balanced);
    }
  }
}

TEST_SUITE("manifests") {
  TEST_CASE("two pieces glued by a swap") {
    GluingManifest m;
    m.catalog = std::make_shared<const Catalog>(one_cusp_catalog());
    m.pieces = {{"p", "M"}, {"q", "M"}};
    m.pairings["g"] = Pairing{"g", "p", "c", "q", "c", kSwap};
    const NahGraph g = from_manifest(m);
    CHECK(g.vertices.size() == 2);
    CHECK(g.edges.size() == 1);
    CHECK(validate(g).ok());
    CHECK(is_integral(g).integral);
  }

  TEST_CASE("unpaired cusp") {
    GluingManifest m;
    m.catalog = std::make_shared<const Catalog>(one_cusp_catalog());
    m.pieces = {{"p", "T"}, {"q", "M"}};
    m.pairings["g"] = Pairing{"g", "p", "c0", "q", "c", kSwap};
    CHECK_THROWS_AS(from_manifest(m), UnpairedCusp);
  }

  TEST_CASE("non-integral gluing") {
    GluingManifest m;
    m.catalog = std::make_shared<const Catalog>(one_cusp_catalog());
    m.pieces = {{"p", "M"}, {"q", "M"}};
    m.pairings["g"] = Pairing{"g", "p", "c", "q", "c", Matrix2(2, 0, 0, -1)};
    CHECK_THROWS_AS(from_manifest(m), NonIntegralGluing);
  }

  TEST_CASE("fixture manifest") {
    const Document d = load_document(fixture("loop_manifest.json"));
    const NahGraph g = from_manifest(std::get<GluingManifest>(d.payload));
    CHECK(validate(g).ok());
    CHECK(is_integral(g).integral);
    CHECK(isomorphic(g, load_fixture_graph("loop.json")));
  }

  TEST_CASE("round trip through to_manifest on integral graphs") {
    auto rng = rng_for(27);
    const GeneratedCatalog cat = generate_catalog(rng);
    for (int i = 0; i < 50; ++i) {
      const NahGraph g = generate_graph(cat, rng, {6, 9, LabelMode::Integral, false});
      const NahGraph back = from_manifest(to_manifest(g));
      CHECK(is_integral(back).integral);
      CHECK(isomorphic(back, g));
    }
    CHECK_THROWS_AS(to_manifest(load_fixture_graph("two_cycle.json")), NonIntegralGluing);
  }
}
