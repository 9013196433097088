#include "builders.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "qigraph/error.hpp"
#include "qigraph/generate.hpp"
#include "qigraph/realization.hpp"

using namespace qigraph;
using namespace testing_support;

namespace {

Lattice2 from_int(const oracle::IntBasis& b) { return Lattice2::from_basis({b[0], b[1], b[2], b[3]}); }

// Checks every postcondition of a successful realization against g.
void check_realization(const NahGraph& g, const Realization& r) {
  CHECK(validate(r.graph).ok());
  CHECK(is_integral(r.graph).integral);
  CHECK(bisimilar(r.graph, g));
  const Report mr = verify_morphism(r.graph, r.minimal, r.morphism);
  CHECK_MESSAGE(mr.ok(), mr.str());
  for (const auto& row : check_balance_transfer(r.graph, r.minimal, r.morphism)) CHECK(row.holds);
  CHECK(isomorphic(from_manifest(r.manifest), r.graph));
  CHECK(validate_catalog(*r.graph.catalog).ok());

  const auto potential = balanced(g).potential;
  for (const auto& [id, ep] : r.plan.edges) {
    const Rational d = delta(g, {id, false});
    CHECK(ep.d_head * d == ep.d_tail);
    CHECK(lattice_index(ep.chosen, ep.intersection).contained);
    const Edge& e = g.edge(id);
    CHECK(Rational(r.plan.scale) * potential.at(e.head) / ep.d_head ==
          Rational(r.plan.scale) * potential.at(e.tail) / ep.d_tail);
  }
  for (const auto& [v, n] : r.plan.copies) {
    CHECK(n >= 1);
    CHECK(Rational(n) == Rational(r.plan.scale) * potential.at(v) / Rational(r.plan.vertex_degrees.at(v)));
  }
}

}  // namespace

TEST_SUITE("common_sublattice") {
  TEST_CASE("integral edge gives the tail lattice") {
    const NahGraph g = load_fixture_graph("loop.json");
    CHECK(common_sublattice(g, "e") == Lattice2());
  }

  TEST_CASE("half-scaled label on Z^2 cusps") {
    Catalog cat;
    declare(cat, orbifold("M", {cusp("c")}));
    const Matrix2 l(Rational(1, 2), 0, 0, -1);
    const NahGraph g = graph(cat, {{"x", "M"}, {"y", "M"}}, {edge("e", "x", "c", "y", "c", l)});
    // Doubled: 2Z^2 against the lattice spanned by (1,0) and (0,-2).
    const auto want = oracle::intersect_by_enumeration({2, 0, 0, 2}, {1, 0, 0, -2}, 16);
    REQUIRE(want);
    const Lattice2 got = common_sublattice(g, "e");
    CHECK(got.scaled(2) == from_int(*want));
    CHECK(got == Lattice2());
  }

  TEST_CASE("contained in both lattices on generated graphs") {
    auto rng = rng_for(61);
    const GeneratedCatalog cat = generate_catalog(rng);
    for (int i = 0; i < 40; ++i) {
      const NahGraph g = generate_graph(cat, rng, {5, 8, LabelMode::Any, false});
      for (const auto& [id, e] : g.edges) {
        const Lattice2 l = common_sublattice(g, id);
        const Lattice2& tail = g.cusp_spec(e.tail, e.tail_cusp).lattice;
        const Lattice2 head_image = g.cusp_spec(e.head, e.head_cusp).lattice.image(e.label);
        CHECK(lattice_index(l, tail).contained);
        CHECK(lattice_index(l, head_image).contained);
        CHECK(l.image(g.cusp_spec(e.tail, e.tail_cusp).symmetry.generator) == l);
      }
    }
    CHECK_THROWS_AS(common_sublattice(load_fixture_graph("loop.json"), "nope"), UnknownEdge);
  }
}

TEST_SUITE("synthesize_covers") {
  TEST_CASE("full lattices give identity covers") {
    const NahGraph g = load_fixture_graph("loop.json");
    const SyntheticCovers s = synthesize_covers(g, {{"e", Lattice2()}});
    CHECK(s.covers.at("w") == "id(N)");
    CHECK(s.fragment.orbifolds.empty());
  }

  TEST_CASE("an index-4 sublattice gives a degree-consistent cover") {
    const NahGraph g = load_fixture_graph("loop.json");
    const SyntheticCovers s = synthesize_covers(g, {{"e", Lattice2().scaled(2)}});
    Catalog merged = *g.catalog;
    merged.merge(s.fragment);
    const Report r = validate_catalog(merged);
    CHECK_MESSAGE(r.ok(), r.str());
    const CoveringEntry c = merged.covering(s.covers.at("w"));
    CHECK(c.total_degree == 4);
    CHECK_FALSE(s.fragment.note.empty());
    // Every cusp of the cover sits over c0 or c1 with index 4, so one each.
    CHECK(c.cusps.size() == 2);
  }

  TEST_CASE("a lattice outside the intersection is rejected") {
    const NahGraph g = load_fixture_graph("two_cycle.json");
    CHECK_THROWS_AS(synthesize_covers(g, {{"e1", Lattice2()}, {"e2", Lattice2()}}), LatticeNotContained);
  }
}

TEST_SUITE("realize") {
  TEST_CASE("already-integral graph") {
    const NahGraph g = load_fixture_graph("loop.json");
    const Realization r = realize(g);
    CHECK(r.plan.scale == 1);
    for (const auto& [v, n] : r.plan.copies) CHECK(n == 1);
    CHECK(isomorphic(r.graph, g));
    check_realization(g, r);
  }

  TEST_CASE("two-cycle with deltas 2 and 1/2") {
    const NahGraph g = load_fixture_graph("two_cycle.json");
    const Realization r = realize(g);
    CHECK(r.plan.edges.at("e1").intersection == Lattice2::from_basis({2, 0, 0, 1}));
    CHECK(r.plan.edges.at("e2").intersection == Lattice2());
    CHECK(r.plan.vertex_degrees == std::map<std::string, long>{{"u", 2}, {"v", 1}});
    CHECK(r.plan.potential.at("u") == Rational(1));
    CHECK(r.plan.potential.at("v") == Rational(1, 2));
    CHECK(r.plan.scale == 2);
    CHECK(r.plan.copies == std::map<std::string, long>{{"u", 1}, {"v", 1}});
    CHECK(r.graph.vertices.size() == 2);
    check_realization(g, r);
  }

  TEST_CASE("a smaller chosen sublattice still realizes") {
    const NahGraph g = load_fixture_graph("two_cycle.json");
    const Realization r = realize(g, {}, {{"e2", Lattice2().scaled(2)}});
    CHECK(r.plan.edges.at("e2").chosen == Lattice2().scaled(2));
    check_realization(g, r);
    CHECK_THROWS_AS(realize(g, {}, {{"e1", Lattice2()}}), LatticeNotContained);
  }

  TEST_CASE("unbalanced input") {
    CHECK_THROWS_AS(realize(load_fixture_graph("unbalanced.json")), Unbalanced);
  }

  TEST_CASE("supplied covers are validated") {
    const NahGraph g = load_fixture_graph("two_cycle.json");
    CHECK_THROWS_AS(realize(g, {{"u", "id(N)"}}), CoverMismatch);
    CHECK_THROWS_AS(realize(g, {{"u", "missing"}}), NotDeclared);

    // The synthesized covers, once declared, are accepted as user covers.
    const Realization first = realize(g);
    NahGraph declared = g;
    Catalog merged = *g.catalog;
    merged.merge(first.fragment);
    declared.catalog = std::make_shared<const Catalog>(merged);
    const Realization second = realize(declared, first.plan.vertex_covers);
    CHECK(second.fragment.orbifolds.empty());
    CHECK(isomorphic(second.graph, first.graph));
  }

  TEST_CASE("round trip on generated balanced graphs") {
    auto rng = rng_for(62);
    const GeneratedCatalog cat = generate_catalog(rng);
    for (int i = 0; i < 40; ++i) {
      const NahGraph g = generate_graph(cat, rng, {5, 7, LabelMode::Balanced, false});
      const Realization r = realize(g);
      check_realization(g, r);
    }
  }
}
