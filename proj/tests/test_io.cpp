#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "qigraph/error.hpp"
#include "qigraph/generate.hpp"
#include "qigraph/minimization.hpp"

using namespace qigraph;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

const LoadContext kFixtures{QIGRAPH_FIXTURE_DIR, {}};

std::vector<fs::path> corpus() {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(QIGRAPH_FIXTURE_DIR)) {
    if (entry.path().extension() == ".json") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

const char* kMinimalGraph = R"({
  "format_version": "1",
  "kind": "nah_graph",
  "catalog": {
    "orbifolds": {"M": {"cusps": [{"id": "c", "degree": 1}]}},
    "coverings": {}
  },
  "vertices": {"w": "M"},
  "edges": {"e": {"tail": "w", "tail_cusp": "c", "head": "w", "head_cusp": "c", "label": ["0", "1", "1", "0"]}}
})";

template <class E>
std::string message_of(const std::string& text) {
  try {
    parse_document(text, kFixtures);
  } catch (const E& e) {
    return e.what();
  }
  FAIL("expected an error");
  return {};
}

std::string with_label(const std::string& label) {
  std::string text = kMinimalGraph;
  text.replace(text.find(R"("0", "1", "1", "0")"), 18, label);
  return text;
}

}  // namespace

TEST_SUITE("round trip") {
  TEST_CASE("a minimal graph document canonicalizes once") {
    const std::string once = serialize(parse_document(kMinimalGraph));
    CHECK(once != kMinimalGraph);
    CHECK(serialize(parse_document(once)) == once);
    const NahGraph g = std::get<NahGraph>(parse_document(once).payload);
    CHECK(validate(g).ok());
  }

  TEST_CASE("every fixture parses, re-serializes stably and keeps its content") {
    for (const auto& path : corpus()) {
      CAPTURE(path.filename().string());
      const Document d = load_document(path);
      const std::string once = serialize(d);
      const Document again = parse_document(once, {path.parent_path(), {}});
      CHECK(again.kind() == d.kind());
      CHECK(serialize(again) == once);
      CHECK(serialize(load_document(path)) == once);
    }
  }

  TEST_CASE("generated objects survive serialization") {
    auto rng = rng_for(101);
    const GeneratedCatalog cat = generate_catalog(rng);
    const std::string cat_text = serialize(Document{*cat.catalog});
    CHECK(serialize(parse_document(cat_text)) == cat_text);
    for (int i = 0; i < 30; ++i) {
      NahGraph g = generate_graph(cat, rng, {});
      g.catalog_ref.clear();
      const std::string text = serialize(Document{g});
      const NahGraph back = std::get<NahGraph>(parse_document(text).payload);
      CHECK(canonical_form(back) == canonical_form(g));
      CHECK(serialize(Document{back}) == text);

      HGraph h = generate_h_graph(cat, rng, {});
      h.hyperbolic.catalog_ref.clear();
      const std::string htext = serialize(Document{h});
      CHECK(serialize(parse_document(htext)) == htext);
      CHECK(h_isomorphic(std::get<HGraph>(parse_document(htext).payload), h));
    }
    for (int i = 0; i < 20; ++i) {
      const TypedGraph t = generate_typed_tree(rng, 4, 3);
      const std::string text = serialize(Document{t});
      CHECK(serialize(parse_document(text)) == text);
    }
  }

  TEST_CASE("catalog defaults are written out") {
    const std::string once = serialize(parse_document(kMinimalGraph));
    CHECK(once.find("\"lattice\"") != std::string::npos);
    CHECK(once.find("\"symmetry\"") != std::string::npos);
  }
}

TEST_SUITE("rejection") {
  TEST_CASE("non-reduced rational") {
    const std::string msg = message_of<SchemaError>(with_label(R"("2/4", "1", "1", "0")"));
    CHECK(msg.find("/edges/e/label/0") != std::string::npos);
  }

  TEST_CASE("other malformed rationals") {
    for (const char* bad : {R"("1/0", "1", "1", "0")", R"("x", "1", "1", "0")", R"("1.5", "1", "1", "0")",
                            R"(true, "1", "1", "0")", R"("0", "1", "1")"}) {
      CAPTURE(bad);
      CHECK_THROWS_AS(parse_document(with_label(bad)), SchemaError);
    }
    CHECK_NOTHROW(parse_document(with_label(R"(0, 1, 1, 0)")));
  }

  TEST_CASE("unknown field names its path") {
    std::string text = kMinimalGraph;
    text.replace(text.find(R"("tail": "w")"), 11, R"("tail": "w", "colour": 1)");
    const std::string msg = message_of<SchemaError>(text);
    CHECK(msg.find("/edges/e/colour") != std::string::npos);
    CHECK(msg.find("unknown field") != std::string::npos);
  }

  TEST_CASE("syntax errors give line and column") {
    const std::string msg = message_of<SyntaxError>("{\n  \"format_version\": \"1\",\n  \"kind\" \"catalog\"\n}");
    CHECK(msg.find("line 3, column") != std::string::npos);
  }

  TEST_CASE("version and kind") {
    CHECK_THROWS_AS(parse_document(R"({"format_version": "2", "kind": "catalog"})"), VersionError);
    CHECK_THROWS_AS(parse_document(R"({"format_version": 1, "kind": "catalog"})"), VersionError);
    CHECK_THROWS_AS(parse_document(R"({"kind": "catalog"})"), SchemaError);
    CHECK_THROWS_AS(parse_document(R"({"format_version": "1", "kind": "poem"})"), SchemaError);
    CHECK_THROWS_AS(parse_document(R"([1, 2])"), SchemaError);
  }

  TEST_CASE("missing catalog file") {
    std::string text = kMinimalGraph;
    const auto start = text.find("{\n    \"orbifolds\"");
    const auto end = text.find("},\n  \"vertices\"");
    text.replace(start, end - start + 1, "\"nowhere.json\"");
    CHECK_THROWS_AS(parse_document(text, kFixtures), SchemaError);
  }

  TEST_CASE("mutated documents never escape as foreign exceptions") {
    auto rng = rng_for(102);
    const std::string alphabet = "{}[]\",:0123456789/-abcxyz \n";
    int accepted = 0;
    int rejected = 0;
    for (const auto& path : corpus()) {
      const std::string original = read_text_file(path);
      for (int i = 0; i < 60; ++i) {
        std::string text = original;
        const int edits = 1 + static_cast<int>(rng() % 3);
        for (int k = 0; k < edits && !text.empty(); ++k) {
          const std::size_t pos = rng() % text.size();
          switch (rng() % 3) {
            case 0: text.erase(pos, 1 + rng() % 4); break;
            case 1: text.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
            default: text[pos] = alphabet[rng() % alphabet.size()]; break;
          }
        }
        try {
          const Document d = parse_document(text, {path.parent_path(), {}});
          const std::string out = serialize(d);
          CHECK(serialize(parse_document(out, {path.parent_path(), {}})) == out);
          ++accepted;
        } catch (const Error&) {
          ++rejected;
        }
      }
    }
    CHECK(rejected > 0);
    CHECK(accepted > 0);
  }
}
