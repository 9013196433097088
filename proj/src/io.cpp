#include "qigraph/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "qigraph/error.hpp"

namespace qigraph {

namespace {

namespace fs = std::filesystem;

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }
std::string shown(const std::string& path) { return path.empty() ? "/" : path; }

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw SchemaError(shown(path) + ": " + what);
}

const char* type_name(const Json& j) {
  return j.type_name();
}

void expect_object(const Json& j, const std::string& path, std::initializer_list<const char*> required,
                   std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) schema_error(path, std::string("expected an object, found ") + type_name(j));
  std::set<std::string> known;
  for (const char* k : required) {
    known.insert(k);
    if (!j.contains(k)) schema_error(path, std::string("missing field '") + k + "'");
  }
  for (const char* k : optional) known.insert(k);
  for (const auto& [k, _] : j.items()) {
    if (!known.count(k)) schema_error(child(path, k), "unknown field");
  }
}

void expect_map(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, std::string("expected an object, found ") + type_name(j));
}

void expect_array(const Json& j, const std::string& path, std::optional<std::size_t> size = std::nullopt) {
  if (!j.is_array()) schema_error(path, std::string("expected an array, found ") + type_name(j));
  if (size && j.size() != *size) {
    schema_error(path, "expected " + std::to_string(*size) + " entries, found " + std::to_string(j.size()));
  }
}

std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, std::string("expected a string, found ") + type_name(j));
  auto s = j.get<std::string>();
  if (s.empty()) schema_error(path, "empty string");
  return s;
}

long get_long(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, std::string("expected an integer, found ") + type_name(j));
  return j.get<long>();
}

bool get_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) schema_error(path, std::string("expected a boolean, found ") + type_name(j));
  return j.get<bool>();
}

Rational get_rational(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) schema_error(path, std::string("expected a rational string, found ") + type_name(j));
  try {
    return Rational::parse(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    schema_error(path, e.what());
  }
}

Matrix2 get_matrix(const Json& j, const std::string& path) {
  expect_array(j, path, 4);
  return {get_rational(j[0], child(path, 0)), get_rational(j[1], child(path, 1)), get_rational(j[2], child(path, 2)),
          get_rational(j[3], child(path, 3))};
}

Vec2 get_vec(const Json& j, const std::string& path) {
  expect_array(j, path, 2);
  return {get_rational(j[0], child(path, 0)), get_rational(j[1], child(path, 1))};
}

std::map<std::string, std::string> get_string_map(const Json& j, const std::string& path) {
  expect_map(j, path);
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : j.items()) out[k] = get_string(v, child(path, k));
  return out;
}

DirectedEdge get_directed(const Json& j, const std::string& path) {
  const std::string s = get_string(j, path);
  if (s == "~") schema_error(path, "empty edge id");
  return DirectedEdge::parse(s);
}

Json matrix_json(const Matrix2& m) {
  Json out = Json::array();
  for (const auto& e : m.entries()) out.push_back(e.str());
  return out;
}

Json vec_json(const Vec2& v) { return Json::array({v.x.str(), v.y.str()}); }

void check_header(const Json& doc, const char* kind) {
  const std::string found = document_kind(doc);
  if (found != kind) schema_error("/kind", "expected '" + std::string(kind) + "', found '" + found + "'");
}

// ---- catalog ---------------------------------------------------------------

Catalog catalog_body(const Json& j, const std::string& path) {
  Catalog cat;
  if (j.contains("note")) cat.note = get_string(j["note"], child(path, "note"));
  const std::string opath = child(path, "orbifolds");
  expect_map(j["orbifolds"], opath);
  for (const auto& [id, o] : j["orbifolds"].items()) {
    const std::string p = child(opath, id);
    expect_object(o, p, {"cusps"}, {"arithmetic", "minimal", "minimal_quotients"});
    OrbifoldEntry entry;
    entry.id = id;
    if (o.contains("arithmetic")) entry.arithmetic = get_bool(o["arithmetic"], child(p, "arithmetic"));
    if (o.contains("minimal")) entry.is_minimal = get_bool(o["minimal"], child(p, "minimal"));
    const std::string cpath = child(p, "cusps");
    expect_array(o["cusps"], cpath);
    for (std::size_t i = 0; i < o["cusps"].size(); ++i) {
      const Json& c = o["cusps"][i];
      const std::string q = child(cpath, i);
      expect_object(c, q, {"id", "degree"}, {"lattice", "symmetry"});
      CuspSpec cusp;
      cusp.id = get_string(c["id"], child(q, "id"));
      cusp.degree = static_cast<int>(get_long(c["degree"], child(q, "degree")));
      if (c.contains("lattice")) {
        try {
          cusp.lattice = Lattice2::from_basis(get_matrix(c["lattice"], child(q, "lattice")));
        } catch (const DegenerateLattice& e) {
          schema_error(child(q, "lattice"), e.what());
        }
      }
      if (c.contains("symmetry")) {
        const std::string s = child(q, "symmetry");
        expect_object(c["symmetry"], s, {"order", "generator"});
        cusp.symmetry.order = static_cast<int>(get_long(c["symmetry"]["order"], child(s, "order")));
        cusp.symmetry.generator = get_matrix(c["symmetry"]["generator"], child(s, "generator"));
      } else {
        try {
          cusp.symmetry = CyclicSymmetry::standard(cusp.degree);
        } catch (const InvalidTarget& e) {
          schema_error(child(q, "degree"), e.what());
        }
      }
      entry.cusps.push_back(std::move(cusp));
    }
    if (o.contains("minimal_quotients")) {
      const std::string mpath = child(p, "minimal_quotients");
      expect_array(o["minimal_quotients"], mpath);
      for (std::size_t i = 0; i < o["minimal_quotients"].size(); ++i) {
        const Json& m = o["minimal_quotients"][i];
        const std::string q = child(mpath, i);
        expect_object(m, q, {"targets", "covering"});
        QuotientDecl decl;
        expect_map(m["targets"], child(q, "targets"));
        for (const auto& [cusp, d] : m["targets"].items()) {
          decl.targets[cusp] = static_cast<int>(get_long(d, child(child(q, "targets"), cusp)));
        }
        decl.covering = get_string(m["covering"], child(q, "covering"));
        entry.minimal_quotients.push_back(std::move(decl));
      }
    }
    cat.orbifolds[id] = std::move(entry);
  }
  const std::string vpath = child(path, "coverings");
  expect_map(j["coverings"], vpath);
  for (const auto& [id, c] : j["coverings"].items()) {
    const std::string p = child(vpath, id);
    expect_object(c, p, {"source", "target", "degree", "cusps"});
    CoveringEntry cov;
    cov.id = id;
    cov.source = get_string(c["source"], child(p, "source"));
    cov.target = get_string(c["target"], child(p, "target"));
    cov.total_degree = get_long(c["degree"], child(p, "degree"));
    const std::string cpath = child(p, "cusps");
    expect_array(c["cusps"], cpath);
    for (std::size_t i = 0; i < c["cusps"].size(); ++i) {
      const Json& a = c["cusps"][i];
      const std::string q = child(cpath, i);
      expect_object(a, q, {"source", "target", "psi"});
      cov.cusps.push_back({get_string(a["source"], child(q, "source")), get_string(a["target"], child(q, "target")),
                           get_matrix(a["psi"], child(q, "psi"))});
    }
    cat.coverings[id] = std::move(cov);
  }
  return cat;
}

Json catalog_body_json(const Catalog& cat) {
  Json j;
  if (!cat.note.empty()) j["note"] = cat.note;
  j["orbifolds"] = Json::object();
  for (const auto& [id, o] : cat.orbifolds) {
    Json e;
    e["arithmetic"] = o.arithmetic;
    e["minimal"] = o.is_minimal;
    e["cusps"] = Json::array();
    for (const auto& c : o.cusps) {
      e["cusps"].push_back({{"id", c.id},
                            {"degree", c.degree},
                            {"lattice", matrix_json(c.lattice.basis())},
                            {"symmetry", {{"order", c.symmetry.order}, {"generator", matrix_json(c.symmetry.generator)}}}});
    }
    e["minimal_quotients"] = Json::array();
    for (const auto& q : o.minimal_quotients) {
      Json targets = Json::object();
      for (const auto& [cusp, d] : q.targets) targets[cusp] = d;
      e["minimal_quotients"].push_back({{"targets", targets}, {"covering", q.covering}});
    }
    j["orbifolds"][id] = std::move(e);
  }
  j["coverings"] = Json::object();
  for (const auto& [id, c] : cat.coverings) {
    Json e{{"source", c.source}, {"target", c.target}, {"degree", c.total_degree}, {"cusps", Json::array()}};
    for (const auto& a : c.cusps) {
      e["cusps"].push_back({{"source", a.source_cusp}, {"target", a.target_cusp}, {"psi", matrix_json(a.psi)}});
    }
    j["coverings"][id] = std::move(e);
  }
  return j;
}

Json header(const char* kind) { return Json{{"format_version", kFormatVersion}, {"kind", kind}}; }

// Resolves the "catalog" field of a graph or manifest document.
std::pair<std::shared_ptr<const Catalog>, std::string> catalog_field(const Json& doc, const LoadContext& ctx,
                                                                     bool optional) {
  if (!doc.contains("catalog")) {
    if (!ctx.default_catalog.empty()) {
      const fs::path p = fs::absolute(ctx.default_catalog).lexically_normal();
      return {load_catalog(p), p.string()};
    }
    if (optional) return {std::make_shared<Catalog>(), ""};
    schema_error("", "missing field 'catalog' and no default catalog (QIGRAPH_CATALOG) set");
  }
  const Json& c = doc["catalog"];
  if (c.is_string()) {
    const std::string ref = get_string(c, "/catalog");
    fs::path p(ref);
    if (p.is_relative()) p = ctx.base_dir / p;
    return {load_catalog(p), ref};
  }
  expect_object(c, "/catalog", {"orbifolds", "coverings"}, {"note"});
  return {std::make_shared<Catalog>(catalog_body(c, "/catalog")), ""};
}

Json catalog_ref_json(const std::shared_ptr<const Catalog>& cat, const std::string& ref) {
  if (!ref.empty()) return ref;
  return catalog_body_json(cat ? *cat : Catalog{});
}

void read_nah_fields(const Json& doc, const LoadContext& ctx, NahGraph& g, bool catalog_optional) {
  std::tie(g.catalog, g.catalog_ref) = catalog_field(doc, ctx, catalog_optional);
  g.vertices = get_string_map(doc["vertices"], "/vertices");
  expect_map(doc["edges"], "/edges");
  for (const auto& [id, e] : doc["edges"].items()) {
    const std::string p = child("/edges", id);
    expect_object(e, p, {"tail", "tail_cusp", "head", "head_cusp", "label"});
    Edge edge;
    edge.id = id;
    edge.tail = get_string(e["tail"], child(p, "tail"));
    edge.tail_cusp = get_string(e["tail_cusp"], child(p, "tail_cusp"));
    edge.head = get_string(e["head"], child(p, "head"));
    edge.head_cusp = get_string(e["head_cusp"], child(p, "head_cusp"));
    edge.label = get_matrix(e["label"], child(p, "label"));
    g.edges[id] = std::move(edge);
  }
}

void write_nah_fields(const NahGraph& g, Json& j) {
  j["catalog"] = catalog_ref_json(g.catalog, g.catalog_ref);
  j["vertices"] = Json::object();
  for (const auto& [v, o] : g.vertices) j["vertices"][v] = o;
  j["edges"] = Json::object();
  for (const auto& [id, e] : g.edges) {
    j["edges"][id] = {{"tail", e.tail},
                      {"tail_cusp", e.tail_cusp},
                      {"head", e.head},
                      {"head_cusp", e.head_cusp},
                      {"label", matrix_json(e.label)}};
  }
}

fs::path dir_of(const fs::path& file) {
  const fs::path parent = file.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (auto pos = what.find("] "); pos != std::string::npos) what = what.substr(pos + 2);
    throw SyntaxError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
  }
}

namespace {

// Like Json::dump(2), except that arrays of scalars stay on one line so
// matrices and slopes read naturally.
void dump_node(const Json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  if (j.is_object() && !j.empty()) {
    out += "{\n";
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad + Json(k).dump() + ": ";
      dump_node(v, indent + 2, out);
    }
    out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "}";
  } else if (j.is_array() && !j.empty()) {
    const bool flat = std::none_of(j.begin(), j.end(), [](const Json& x) { return x.is_structured(); });
    out += flat ? "[" : "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i > 0) out += flat ? ", " : ",\n";
      if (!flat) out += pad;
      dump_node(j[i], indent + 2, out);
    }
    out += flat ? "]" : "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "]";
  } else {
    out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump_node(j, 0, out);
  return out + "\n";
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write '" + path.string() + "'");
  out << text;
}

std::string document_kind(const Json& doc) {
  if (!doc.is_object()) schema_error("", std::string("expected an object, found ") + type_name(doc));
  if (!doc.contains("format_version")) schema_error("", "missing field 'format_version'");
  if (!doc["format_version"].is_string() || doc["format_version"].get<std::string>() != kFormatVersion) {
    throw VersionError("unsupported format_version " + doc["format_version"].dump() + " (expected \"" +
                       kFormatVersion + "\")");
  }
  if (!doc.contains("kind")) schema_error("", "missing field 'kind'");
  const std::string kind = get_string(doc["kind"], "/kind");
  static const std::set<std::string> kinds = {"catalog", "nah_graph", "h_graph", "morphism", "manifest", "typed_graph"};
  if (!kinds.count(kind)) schema_error("/kind", "unknown document kind '" + kind + "'");
  return kind;
}

Catalog catalog_from_json(const Json& doc) {
  check_header(doc, "catalog");
  expect_object(doc, "", {"format_version", "kind", "orbifolds", "coverings"}, {"note"});
  return catalog_body(doc, "");
}

Json catalog_to_json(const Catalog& cat) {
  Json j = catalog_body_json(cat);
  j.update(header("catalog"));
  return j;
}

NahGraph graph_from_json(const Json& doc, const LoadContext& ctx) {
  check_header(doc, "nah_graph");
  expect_object(doc, "", {"format_version", "kind", "vertices", "edges"}, {"catalog"});
  NahGraph g;
  read_nah_fields(doc, ctx, g, false);
  return g;
}

Json graph_to_json(const NahGraph& g) {
  Json j = header("nah_graph");
  write_nah_fields(g, j);
  return j;
}

HGraph h_graph_from_json(const Json& doc, const LoadContext& ctx) {
  check_header(doc, "h_graph");
  expect_object(doc, "", {"format_version", "kind"},
                {"catalog", "vertices", "edges", "seifert_vertices", "slopes", "seifert_edges", "signs"});
  Json full = doc;
  for (const char* k : {"vertices", "edges", "seifert_vertices", "slopes", "seifert_edges", "signs"}) {
    if (!full.contains(k)) full[k] = Json::object();
  }
  HGraph h;
  read_nah_fields(full, ctx, h.hyperbolic, full["vertices"].empty());

  expect_map(full["seifert_vertices"], "/seifert_vertices");
  for (const auto& [id, s] : full["seifert_vertices"].items()) {
    const std::string p = child("/seifert_vertices", id);
    expect_object(s, p, {"color", "type"});
    SeifertVertex sv;
    const std::string color = get_string(s["color"], child(p, "color"));
    const std::string type = get_string(s["type"], child(p, "type"));
    if (color != "black" && color != "white") schema_error(child(p, "color"), "expected 'black' or 'white'");
    if (type != "o" && type != "n") schema_error(child(p, "type"), "expected 'o' or 'n'");
    sv.color = color == "black" ? SeifertColor::Black : SeifertColor::White;
    sv.type = type == "o" ? FiberType::O : FiberType::N;
    h.seifert[id] = sv;
  }
  expect_map(full["slopes"], "/slopes");
  for (const auto& [id, s] : full["slopes"].items()) {
    const std::string p = child("/slopes", id);
    expect_object(s, p, {"vertex", "cusp", "seifert", "slope"});
    h.slopes[id] = {id, get_string(s["vertex"], child(p, "vertex")), get_string(s["cusp"], child(p, "cusp")),
                    get_string(s["seifert"], child(p, "seifert")), get_vec(s["slope"], child(p, "slope"))};
  }
  expect_map(full["seifert_edges"], "/seifert_edges");
  for (const auto& [id, s] : full["seifert_edges"].items()) {
    const std::string p = child("/seifert_edges", id);
    expect_object(s, p, {"a", "b"}, {"degree"});
    SeifertEdge e{id, get_string(s["a"], child(p, "a")), get_string(s["b"], child(p, "b")), 1};
    if (s.contains("degree")) e.degree = static_cast<int>(get_long(s["degree"], child(p, "degree")));
    h.seifert_edges[id] = e;
  }
  expect_map(full["signs"], "/signs");
  for (const auto& [id, s] : full["signs"].items()) {
    const long v = get_long(s, child("/signs", id));
    if (v != 1 && v != -1) schema_error(child("/signs", id), "sign must be 1 or -1");
    h.signs[id] = static_cast<int>(v);
  }
  return h;
}

Json h_graph_to_json(const HGraph& h) {
  Json j = header("h_graph");
  write_nah_fields(h.hyperbolic, j);
  j["seifert_vertices"] = Json::object();
  for (const auto& [id, s] : h.seifert) j["seifert_vertices"][id] = {{"color", to_string(s.color)}, {"type", to_string(s.type)}};
  j["slopes"] = Json::object();
  for (const auto& [id, s] : h.slopes) {
    j["slopes"][id] = {{"vertex", s.vertex}, {"cusp", s.cusp}, {"seifert", s.seifert}, {"slope", vec_json(s.slope)}};
  }
  j["seifert_edges"] = Json::object();
  for (const auto& [id, e] : h.seifert_edges) j["seifert_edges"][id] = {{"a", e.a}, {"b", e.b}, {"degree", e.degree}};
  j["signs"] = Json::object();
  for (const auto& [id, s] : h.signs) j["signs"][id] = s;
  return j;
}

HMorphism morphism_from_json(const Json& doc) {
  check_header(doc, "morphism");
  expect_object(doc, "", {"format_version", "kind", "vertex_map", "edge_map", "vertex_coverings"},
                {"seifert_map", "slope_map", "seifert_edge_map"});
  HMorphism m;
  m.hyperbolic.vertex_map = get_string_map(doc["vertex_map"], "/vertex_map");
  expect_map(doc["edge_map"], "/edge_map");
  for (const auto& [k, v] : doc["edge_map"].items()) m.hyperbolic.edge_map[k] = get_directed(v, child("/edge_map", k));
  m.hyperbolic.vertex_coverings = get_string_map(doc["vertex_coverings"], "/vertex_coverings");
  if (doc.contains("seifert_map")) m.seifert_map = get_string_map(doc["seifert_map"], "/seifert_map");
  if (doc.contains("slope_map")) m.slope_map = get_string_map(doc["slope_map"], "/slope_map");
  if (doc.contains("seifert_edge_map")) {
    expect_map(doc["seifert_edge_map"], "/seifert_edge_map");
    for (const auto& [k, v] : doc["seifert_edge_map"].items()) {
      m.seifert_edge_map[k] = get_directed(v, child("/seifert_edge_map", k));
    }
  }
  return m;
}

Json morphism_to_json(const GraphMorphism& m) {
  Json j = header("morphism");
  j["vertex_map"] = m.vertex_map;
  j["edge_map"] = Json::object();
  for (const auto& [k, v] : m.edge_map) j["edge_map"][k] = v.str();
  j["vertex_coverings"] = m.vertex_coverings;
  return j;
}

Json morphism_to_json(const HMorphism& m) {
  Json j = morphism_to_json(m.hyperbolic);
  j["seifert_map"] = m.seifert_map;
  j["slope_map"] = m.slope_map;
  j["seifert_edge_map"] = Json::object();
  for (const auto& [k, v] : m.seifert_edge_map) j["seifert_edge_map"][k] = v.str();
  return j;
}

GluingManifest manifest_from_json(const Json& doc, const LoadContext& ctx) {
  check_header(doc, "manifest");
  expect_object(doc, "", {"format_version", "kind", "pieces", "pairings"}, {"catalog"});
  GluingManifest m;
  std::tie(m.catalog, m.catalog_ref) = catalog_field(doc, ctx, false);
  m.pieces = get_string_map(doc["pieces"], "/pieces");
  expect_map(doc["pairings"], "/pairings");
  for (const auto& [id, p] : doc["pairings"].items()) {
    const std::string q = child("/pairings", id);
    expect_object(p, q, {"a", "a_cusp", "b", "b_cusp", "gluing"});
    m.pairings[id] = {id,
                      get_string(p["a"], child(q, "a")),
                      get_string(p["a_cusp"], child(q, "a_cusp")),
                      get_string(p["b"], child(q, "b")),
                      get_string(p["b_cusp"], child(q, "b_cusp")),
                      get_matrix(p["gluing"], child(q, "gluing"))};
  }
  return m;
}

Json manifest_to_json(const GluingManifest& m) {
  Json j = header("manifest");
  j["catalog"] = catalog_ref_json(m.catalog, m.catalog_ref);
  j["pieces"] = m.pieces;
  j["pairings"] = Json::object();
  for (const auto& [id, p] : m.pairings) {
    j["pairings"][id] = {{"a", p.a}, {"a_cusp", p.a_cusp}, {"b", p.b}, {"b_cusp", p.b_cusp}, {"gluing", matrix_json(p.gluing)}};
  }
  return j;
}

TypedGraph typed_graph_from_json(const Json& doc) {
  check_header(doc, "typed_graph");
  expect_object(doc, "", {"format_version", "kind", "types", "edges"}, {"permutations"});
  TypedGraph g;
  g.vertices = get_string_map(doc["types"], "/types");
  expect_map(doc["edges"], "/edges");
  for (const auto& [id, e] : doc["edges"].items()) {
    const std::string p = child("/edges", id);
    expect_object(e, p, {"a", "b", "type"});
    g.edges[id] = {id, get_string(e["a"], child(p, "a")), get_string(e["b"], child(p, "b")),
                   get_string(e["type"], child(p, "type"))};
  }
  if (doc.contains("permutations")) {
    expect_map(doc["permutations"], "/permutations");
    for (const auto& [type, gens] : doc["permutations"].items()) {
      const std::string p = child("/permutations", type);
      expect_array(gens, p);
      auto& out = g.permutations[type];
      for (std::size_t i = 0; i < gens.size(); ++i) {
        expect_array(gens[i], child(p, i));
        std::vector<int> perm;
        for (std::size_t k = 0; k < gens[i].size(); ++k) {
          perm.push_back(static_cast<int>(get_long(gens[i][k], child(child(p, i), k))));
        }
        out.push_back(std::move(perm));
      }
    }
  }
  return g;
}

Json typed_graph_to_json(const TypedGraph& g) {
  Json j = header("typed_graph");
  j["types"] = g.vertices;
  j["edges"] = Json::object();
  for (const auto& [id, e] : g.edges) j["edges"][id] = {{"a", e.a}, {"b", e.b}, {"type", e.type}};
  if (!g.permutations.empty()) j["permutations"] = g.permutations;
  return j;
}

std::string Document::kind() const {
  switch (payload.index()) {
    case 0: return "catalog";
    case 1: return "nah_graph";
    case 2: return "h_graph";
    case 3: return "morphism";
    case 4: return "manifest";
    default: return "typed_graph";
  }
}

Document parse_document(std::string_view text, const LoadContext& ctx) {
  const Json doc = parse_json(text);
  const std::string kind = document_kind(doc);
  Document out;
  if (kind == "catalog") {
    out.payload = catalog_from_json(doc);
  } else if (kind == "nah_graph") {
    out.payload = graph_from_json(doc, ctx);
  } else if (kind == "h_graph") {
    out.payload = h_graph_from_json(doc, ctx);
  } else if (kind == "morphism") {
    out.payload = morphism_from_json(doc);
    out.plain_morphism = !doc.contains("seifert_map") && !doc.contains("slope_map") && !doc.contains("seifert_edge_map");
  } else if (kind == "manifest") {
    out.payload = manifest_from_json(doc, ctx);
  } else {
    out.payload = typed_graph_from_json(doc);
  }
  return out;
}

std::string serialize(const Document& doc) {
  const Json j = std::visit(
      [&doc](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Catalog>) return catalog_to_json(p);
        else if constexpr (std::is_same_v<T, NahGraph>) return graph_to_json(p);
        else if constexpr (std::is_same_v<T, HGraph>) return h_graph_to_json(p);
        else if constexpr (std::is_same_v<T, HMorphism>) {
          return doc.plain_morphism ? morphism_to_json(p.hyperbolic) : morphism_to_json(p);
        } else if constexpr (std::is_same_v<T, GluingManifest>) return manifest_to_json(p);
        else return typed_graph_to_json(p);
      },
      doc.payload);
  return dump_json(j);
}

std::shared_ptr<const Catalog> load_catalog(const fs::path& path) {
  return std::make_shared<Catalog>(catalog_from_json(parse_json(read_text_file(path))));
}

Document load_document(const fs::path& path, const std::string& default_catalog) {
  return parse_document(read_text_file(path), {dir_of(path), default_catalog});
}

NahGraph load_graph(const fs::path& path, const std::string& default_catalog) {
  return graph_from_json(parse_json(read_text_file(path)), {dir_of(path), default_catalog});
}

HGraph load_h_graph(const fs::path& path, const std::string& default_catalog) {
  const Json doc = parse_json(read_text_file(path));
  if (document_kind(doc) == "nah_graph") return from_nah(graph_from_json(doc, {dir_of(path), default_catalog}));
  return h_graph_from_json(doc, {dir_of(path), default_catalog});
}

Json report_to_json(const Report& r) {
  Json out = Json::array();
  for (const auto& v : r.items()) out.push_back({{"subject", v.subject}, {"rule", v.rule}, {"detail", v.detail}});
  return out;
}

}  // namespace qigraph
