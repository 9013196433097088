// Command-line front end.  Exit status: 0 success or "true", 1 "false",
// 2 bad input, 3 internal error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "qigraph/error.hpp"
#include "qigraph/generate.hpp"
#include "qigraph/io.hpp"
#include "qigraph/realization.hpp"

namespace fs = std::filesystem;
using namespace qigraph;

namespace {

struct Globals {
  bool json = false;
  std::string catalog;
  std::uint64_t seed = 1;
};

Globals globals;

std::string default_catalog() {
  if (!globals.catalog.empty()) return globals.catalog;
  if (const char* env = std::getenv("QIGRAPH_CATALOG"); env != nullptr) return env;
  return {};
}

fs::path dir_of(const fs::path& file) {
  const fs::path parent = file.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

// Catalog reference rewritten so that it still resolves from `out_dir`.
std::string rebase_ref(const std::string& ref, const fs::path& from_dir, const fs::path& out_dir) {
  if (ref.empty()) return ref;
  fs::path p(ref);
  if (p.is_relative()) p = from_dir / p;
  return fs::proximate(p, out_dir).generic_string();
}

// Writes to `path`, or to stdout when it is empty or "-".
void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

fs::path out_dir(const std::string& path) { return (path.empty() || path == "-") ? fs::path(".") : dir_of(path); }

int finish(bool ok, const Json& result, const std::string& text) {
  if (globals.json) {
    Json j = result;
    j["result"] = ok;
    std::cout << dump_json(j);
  } else {
    std::cout << text;
  }
  return ok ? 0 : 1;
}

std::string potential_text(const std::map<std::string, Rational>& m) {
  std::string out;
  for (const auto& [v, r] : m) out += "  m(" + v + ") = " + r.str() + "\n";
  return out;
}

Json rationals_json(const std::map<std::string, Rational>& m) {
  Json j = Json::object();
  for (const auto& [v, r] : m) j[v] = r.str();
  return j;
}

bool is_h_document(const fs::path& path) {
  return document_kind(parse_json(read_text_file(path))) == "h_graph";
}

// ---- commands ----------------------------------------------------------------

int cmd_validate(const std::string& file) {
  const Document doc = load_document(file, default_catalog());
  Report r;
  if (const auto* g = std::get_if<NahGraph>(&doc.payload)) {
    r = validate(*g);
  } else if (const auto* h = std::get_if<HGraph>(&doc.payload)) {
    r = validate_h(*h);
  } else if (const auto* c = std::get_if<Catalog>(&doc.payload)) {
    r = validate_catalog(*c);
  } else if (const auto* t = std::get_if<TypedGraph>(&doc.payload)) {
    r = validate_typed(*t);
  } else if (const auto* m = std::get_if<GluingManifest>(&doc.payload)) {
    try {
      from_manifest(*m);
    } catch (const Error& e) {
      r.add("manifest", "manifest", e.what());
    }
  }
  const std::string text = r.ok() ? doc.kind() + " is valid\n" : r.str();
  return finish(r.ok(), {{"kind", doc.kind()}, {"violations", report_to_json(r)}}, text);
}

int cmd_catalog_validate(const std::string& file) {
  const auto cat = load_catalog(file);
  const Report r = validate_catalog(*cat);
  return finish(r.ok(), {{"violations", report_to_json(r)}}, r.ok() ? "catalog is valid\n" : r.str());
}

NahGraph checked_graph(const std::string& file) {
  NahGraph g = load_graph(file, default_catalog());
  if (const Report r = validate(g); !r.ok()) throw InvalidGraph("'" + file + "' is not a valid graph:\n" + r.str());
  return g;
}

int cmd_balanced(const std::string& file) {
  const NahGraph g = checked_graph(file);
  const BalanceResult b = balanced(g);
  Json j{{"potential", rationals_json(b.potential)}};
  std::string text;
  if (b.balanced) {
    text = "balanced\n" + potential_text(b.potential);
  } else {
    j["witness"] = b.witness->str();
    text = "unbalanced: the cycle closed by edge '" + b.witness->str() + "' has delta product != 1\n";
  }
  return finish(b.balanced, j, text);
}

int cmd_integral(const std::string& file) {
  const NahGraph g = checked_graph(file);
  const IntegralityResult r = is_integral(g);
  std::string text = r.integral ? "integral\n" : "not integral; edges:";
  if (!r.integral) {
    for (const auto& e : r.non_integral_edges) text += " " + e;
    text += "\n";
  }
  return finish(r.integral, {{"non_integral_edges", r.non_integral_edges}}, text);
}

int cmd_minimize(const std::string& file, const std::string& out, const std::string& morphism_out) {
  const NahGraph g = checked_graph(file);
  Quotient q = minimize(g);
  q.graph.catalog_ref = rebase_ref(q.graph.catalog_ref, dir_of(file), out_dir(out));
  if (!morphism_out.empty()) write_text_file(morphism_out, dump_json(morphism_to_json(q.morphism)));
  emit(dump_json(graph_to_json(q.graph)), out);
  return 0;
}

int cmd_pair(const std::string& a, const std::string& b, bool iso) {
  const NahGraph g = checked_graph(a);
  const NahGraph h = checked_graph(b);
  const bool ok = iso ? isomorphic(g, h) : bisimilar(g, h);
  const std::string what = iso ? "isomorphic" : "bisimilar";
  return finish(ok, Json::object(), (ok ? what : "not " + what) + "\n");
}

Lattice2 parse_basis(const std::string& text) {
  std::vector<Rational> xs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      xs.push_back(Rational::parse(item));
    } catch (const std::invalid_argument& e) {
      throw SchemaError(std::string("--sublattice: ") + e.what());
    }
  }
  if (xs.size() != 4) throw SchemaError("--sublattice basis needs four comma-separated rationals (row-major)");
  return Lattice2::from_basis({xs[0], xs[1], xs[2], xs[3]});
}

int cmd_realize(const std::string& file, const std::string& covers_file, const std::vector<std::string>& cover_args,
                const std::vector<std::string>& sublattice_args, const std::string& out, const std::string& manifest_out,
                const std::string& fragment_out) {
  NahGraph g = checked_graph(file);
  std::map<std::string, std::string> covers;
  if (!covers_file.empty()) {
    const Json j = parse_json(read_text_file(covers_file));
    if (!j.is_object() || !j.contains("covers")) throw SchemaError(covers_file + ": expected an object with 'covers'");
    for (const auto& [k, _] : j.items()) {
      if (k != "covers" && k != "catalog") throw SchemaError(covers_file + ": /" + k + ": unknown field");
    }
    for (const auto& [v, c] : j["covers"].items()) {
      if (!c.is_string()) throw SchemaError(covers_file + ": /covers/" + v + ": expected a string");
      covers[v] = c.get<std::string>();
    }
    if (j.contains("catalog")) {
      Json doc = j["catalog"];
      std::shared_ptr<const Catalog> extra;
      if (doc.is_string()) {
        fs::path p(doc.get<std::string>());
        if (p.is_relative()) p = dir_of(covers_file) / p;
        extra = load_catalog(p);
      } else {
        doc["format_version"] = kFormatVersion;
        doc["kind"] = "catalog";
        extra = std::make_shared<Catalog>(catalog_from_json(doc));
      }
      auto merged = std::make_shared<Catalog>(*g.catalog);
      merged->merge(*extra);
      g.catalog = merged;
      g.catalog_ref.clear();
    }
  }
  for (const auto& arg : cover_args) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos) throw SchemaError("--cover expects VERTEX=COVERING, got '" + arg + "'");
    covers[arg.substr(0, eq)] = arg.substr(eq + 1);
  }
  std::map<std::string, Lattice2> sublattices;
  for (const auto& arg : sublattice_args) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos) throw SchemaError("--sublattice expects EDGE=a,b,c,d, got '" + arg + "'");
    sublattices[arg.substr(0, eq)] = parse_basis(arg.substr(eq + 1));
  }

  Realization r = realize(g, covers, sublattices);
  r.graph.catalog_ref.clear();
  r.manifest.catalog_ref.clear();
  r.manifest.catalog = r.graph.catalog;
  emit(dump_json(graph_to_json(r.graph)), out);
  if (!manifest_out.empty()) write_text_file(manifest_out, dump_json(manifest_to_json(r.manifest)));
  std::string fragment_path = fragment_out;
  if (fragment_path.empty() && !out.empty() && out != "-") fragment_path = out + ".covers.json";
  if (!fragment_path.empty()) write_text_file(fragment_path, dump_json(catalog_to_json(r.fragment)));

  std::cerr << "realized: " << r.graph.vertices.size() << " vertices, " << r.graph.edges.size()
            << " edges, scale b = " << r.plan.scale << "\n";
  for (const auto& [v, n] : r.plan.copies) std::cerr << "  n(" << v << ") = " << n << "\n";
  return 0;
}

int cmd_morphism_check(const std::string& src, const std::string& dst, const std::string& morphism) {
  const HMorphism m = morphism_from_json(parse_json(read_text_file(morphism)));
  Report r;
  Json extra = Json::object();
  if (is_h_document(src) || is_h_document(dst)) {
    const HGraph a = load_h_graph(src, default_catalog());
    const HGraph b = load_h_graph(dst, default_catalog());
    r = verify_h_morphism(a, b, m);
  } else {
    const NahGraph a = checked_graph(src);
    const NahGraph b = checked_graph(dst);
    r = verify_morphism(a, b, m.hyperbolic);
    if (r.ok()) {
      Json rows = Json::array();
      for (const auto& row : check_balance_transfer(a, b, m.hyperbolic)) {
        rows.push_back({{"edge", row.edge},
                        {"d_head", row.d_head.str()},
                        {"d_tail", row.d_tail.str()},
                        {"delta_src", row.delta_src.str()},
                        {"delta_dst", row.delta_dst.str()},
                        {"holds", row.holds}});
      }
      extra["balance_transfer"] = rows;
    }
  }
  extra["violations"] = report_to_json(r);
  return finish(r.ok(), extra, r.ok() ? "morphism verifies\n" : r.str());
}

HGraph checked_h_graph(const std::string& file) {
  HGraph h = load_h_graph(file, default_catalog());
  if (const Report r = validate_h(h); !r.ok()) throw InvalidGraph("'" + file + "' is not a valid H-graph:\n" + r.str());
  return h;
}

int cmd_hnormalize(const std::string& file, const std::string& out) {
  HGraph h = h_canonical_moves(checked_h_graph(file));
  h.hyperbolic.catalog_ref = rebase_ref(h.hyperbolic.catalog_ref, dir_of(file), out_dir(out));
  emit(dump_json(h_graph_to_json(h)), out);
  return 0;
}

int cmd_hminimize(const std::string& file, const std::string& out, const std::string& morphism_out) {
  HQuotient q = minimize_h(checked_h_graph(file));
  q.graph.hyperbolic.catalog_ref = rebase_ref(q.graph.hyperbolic.catalog_ref, dir_of(file), out_dir(out));
  if (!morphism_out.empty()) write_text_file(morphism_out, dump_json(morphism_to_json(q.morphism)));
  emit(dump_json(h_graph_to_json(q.graph)), out);
  return 0;
}

int cmd_hiso(const std::string& a, const std::string& b) {
  const bool ok = h_isomorphic(checked_h_graph(a), checked_h_graph(b));
  return finish(ok, Json::object(), ok ? "isomorphic up to moves\n" : "not isomorphic up to moves\n");
}

Json covering_map_json(const CoveringMap& m) {
  Json j{{"vertex_map", m.vertex_map}, {"edge_map", Json::object()}};
  for (const auto& [k, v] : m.edge_map) j["edge_map"][k] = v.str();
  return j;
}

int cmd_common_cover(const std::string& a, const std::string& b, int max_size, bool force, long max_steps,
                     const std::string& out) {
  const TypedGraph g1 = typed_graph_from_json(parse_json(read_text_file(a)));
  const TypedGraph g2 = typed_graph_from_json(parse_json(read_text_file(b)));
  const auto cc = find_common_cover(g1, g2, max_size, force, max_steps);
  if (!cc) {
    return finish(false, Json::object(),
                  "no common cover with at most " + std::to_string(max_size) + " vertices found (bounded search)\n");
  }
  if (!out.empty()) write_text_file(out, dump_json(typed_graph_to_json(cc->cover)));
  const std::size_t n = cc->cover.vertices.size();
  Json j{{"vertices", n},
         {"degree_first", n / g1.vertices.size()},
         {"degree_second", n / g2.vertices.size()},
         {"cover", typed_graph_to_json(cc->cover)},
         {"to_first", covering_map_json(cc->to_first)},
         {"to_second", covering_map_json(cc->to_second)}};
  return finish(true, j,
                "common cover with " + std::to_string(n) + " vertices (degrees " +
                    std::to_string(n / g1.vertices.size()) + " and " + std::to_string(n / g2.vertices.size()) + ")\n");
}

int cmd_generate(const std::string& kind, const std::string& out, int size) {
  std::mt19937_64 rng(globals.seed);
  std::string text;
  if (kind == "catalog") {
    text = dump_json(catalog_to_json(*generate_catalog(rng).catalog));
  } else if (kind == "graph" || kind == "balanced" || kind == "integral") {
    const GeneratedCatalog cat = generate_catalog(rng);
    GraphShape shape;
    shape.max_vertices = size;
    shape.mode = kind == "graph" ? LabelMode::Any : (kind == "balanced" ? LabelMode::Balanced : LabelMode::Integral);
    text = dump_json(graph_to_json(generate_graph(cat, rng, shape)));
  } else if (kind == "h_graph") {
    const GeneratedCatalog cat = generate_catalog(rng);
    HShape shape;
    shape.max_vertices = size;
    text = dump_json(h_graph_to_json(generate_h_graph(cat, rng, shape)));
  } else if (kind == "typed_graph") {
    text = dump_json(typed_graph_to_json(generate_typed_tree(rng, size, 3)));
  } else {
    throw SchemaError("unknown kind '" + kind + "' (catalog, graph, balanced, integral, h_graph, typed_graph)");
  }
  emit(text, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Commensurability toolkit for graphs of cusped hyperbolic orbifolds"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", globals.json, "Machine-readable output");
  app.add_option("--catalog", globals.catalog, "Catalog for graphs that name none (default: $QIGRAPH_CATALOG)");
  app.add_option("--seed", globals.seed, "Seed for randomized generation");

  std::string a;
  std::string b;
  std::string c;
  std::string out;
  std::string morphism_out;
  std::function<int()> run;

  auto* validate_cmd = app.add_subcommand("validate", "Check any document against its invariants");
  validate_cmd->add_option("FILE", a)->required();
  validate_cmd->callback([&] { run = [&] { return cmd_validate(a); }; });

  auto* catalog_cmd = app.add_subcommand("catalog-validate", "Check a catalog");
  catalog_cmd->add_option("CATALOG", a)->required();
  catalog_cmd->callback([&] { run = [&] { return cmd_catalog_validate(a); }; });

  auto* balanced_cmd = app.add_subcommand("balanced", "Decide balance and print the potential");
  balanced_cmd->add_option("GRAPH", a)->required();
  balanced_cmd->callback([&] { run = [&] { return cmd_balanced(a); }; });

  auto* integral_cmd = app.add_subcommand("integral", "Decide integrality");
  integral_cmd->add_option("GRAPH", a)->required();
  integral_cmd->callback([&] { run = [&] { return cmd_integral(a); }; });

  auto* minimize_cmd = app.add_subcommand("minimize", "Minimal graph of the bisimilarity class");
  minimize_cmd->add_option("GRAPH", a)->required();
  minimize_cmd->add_option("-o,--output", out, "Output graph (default stdout)");
  minimize_cmd->add_option("-m,--morphism", morphism_out, "Write the quotient morphism here");
  minimize_cmd->callback([&] { run = [&] { return cmd_minimize(a, out, morphism_out); }; });

  auto* iso_cmd = app.add_subcommand("iso", "Decide isomorphism");
  iso_cmd->add_option("A", a)->required();
  iso_cmd->add_option("B", b)->required();
  iso_cmd->callback([&] { run = [&] { return cmd_pair(a, b, true); }; });

  auto* bisim_cmd = app.add_subcommand("bisimilar", "Decide bisimilarity");
  bisim_cmd->add_option("A", a)->required();
  bisim_cmd->add_option("B", b)->required();
  bisim_cmd->callback([&] { run = [&] { return cmd_pair(a, b, false); }; });

  std::string covers_file;
  std::string fragment_out;
  std::vector<std::string> cover_args;
  std::vector<std::string> sublattice_args;
  auto* realize_cmd = app.add_subcommand("realize", "Integral graph in the same bisimilarity class");
  realize_cmd->add_option("GRAPH", a)->required();
  realize_cmd->add_option("--covers", covers_file, "JSON with 'covers' (vertex -> covering id) and optional 'catalog'");
  realize_cmd->add_option("--cover", cover_args, "VERTEX=COVERING, repeatable");
  realize_cmd->add_option("--sublattice", sublattice_args, "EDGE=a,b,c,d (row-major basis), repeatable");
  realize_cmd->add_option("-o,--output", out, "Output graph (default stdout)");
  realize_cmd->add_option("-m,--manifest", morphism_out, "Output gluing manifest");
  realize_cmd->add_option("--fragment", fragment_out, "Synthetic cover catalog (default OUTPUT.covers.json)");
  realize_cmd->callback([&] {
    run = [&] { return cmd_realize(a, covers_file, cover_args, sublattice_args, out, morphism_out, fragment_out); };
  });

  auto* mcheck_cmd = app.add_subcommand("morphism-check", "Verify a morphism between two graphs");
  mcheck_cmd->add_option("SRC", a)->required();
  mcheck_cmd->add_option("DST", b)->required();
  mcheck_cmd->add_option("MORPHISM", c)->required();
  mcheck_cmd->callback([&] { run = [&] { return cmd_morphism_check(a, b, c); }; });

  auto* hnorm_cmd = app.add_subcommand("hnormalize", "Canonical representative under the equivalence moves");
  hnorm_cmd->add_option("HGRAPH", a)->required();
  hnorm_cmd->add_option("-o,--output", out, "Output graph (default stdout)");
  hnorm_cmd->callback([&] { run = [&] { return cmd_hnormalize(a, out); }; });

  auto* hmin_cmd = app.add_subcommand("hminimize", "Minimal H-graph");
  hmin_cmd->add_option("HGRAPH", a)->required();
  hmin_cmd->add_option("-o,--output", out, "Output graph (default stdout)");
  hmin_cmd->add_option("-m,--morphism", morphism_out, "Write the quotient morphism here");
  hmin_cmd->callback([&] { run = [&] { return cmd_hminimize(a, out, morphism_out); }; });

  auto* hiso_cmd = app.add_subcommand("hiso", "Decide isomorphism of H-graphs up to moves");
  hiso_cmd->add_option("A", a)->required();
  hiso_cmd->add_option("B", b)->required();
  hiso_cmd->callback([&] { run = [&] { return cmd_hiso(a, b); }; });

  int max_size = 48;
  bool force = false;
  long max_steps = 20'000'000;
  auto* cc_cmd = app.add_subcommand("common-cover", "Bounded search for a common finite cover of typed graphs");
  cc_cmd->add_option("G1", a)->required();
  cc_cmd->add_option("G2", b)->required();
  cc_cmd->add_option("--max-size", max_size, "Largest cover to try, in vertices")->capture_default_str();
  cc_cmd->add_flag("--force", force, "Search even when the base quotient is not a tree");
  cc_cmd->add_option("--max-steps", max_steps, "Search step budget")->capture_default_str();
  cc_cmd->add_option("-o,--output", out, "Write the cover here");
  cc_cmd->callback([&] { run = [&] { return cmd_common_cover(a, b, max_size, force, max_steps, out); }; });

  int size = 5;
  auto* gen_cmd = app.add_subcommand("generate", "Random fixture (deterministic for a given --seed)");
  gen_cmd->add_option("KIND", a, "catalog, graph, balanced, integral, h_graph, typed_graph")->required();
  gen_cmd->add_option("--size", size, "Vertex bound")->capture_default_str();
  gen_cmd->add_option("-o,--output", out, "Output file (default stdout)");
  gen_cmd->callback([&] { run = [&] { return cmd_generate(a, out, size); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return run();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
