#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"

#include "qigraph/common_cover.hpp"
#include "qigraph/hgraph.hpp"

namespace qigraph {

using Json = nlohmann::json;

inline constexpr const char* kFormatVersion = "1";

/// Strict JSON parse.  Throws SyntaxError naming line and column.
Json parse_json(std::string_view text);
/// Two-space indented, keys sorted, newline terminated.
std::string dump_json(const Json& j);

/// Throws SchemaError when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Where relative catalog paths are resolved, and the catalog used by
/// graph documents that name none.
struct LoadContext {
  std::filesystem::path base_dir;
  std::string default_catalog;
};

/// Checks "format_version" and "kind"; throws VersionError or SchemaError.
std::string document_kind(const Json& doc);

// Each *_from_json takes a whole document (header included) and throws
// SchemaError with a JSON-pointer path on any violation of the format.
Catalog catalog_from_json(const Json& doc);
Json catalog_to_json(const Catalog& cat);

NahGraph graph_from_json(const Json& doc, const LoadContext& ctx);
Json graph_to_json(const NahGraph& g);

HGraph h_graph_from_json(const Json& doc, const LoadContext& ctx);
Json h_graph_to_json(const HGraph& h);

/// Accepts both plain and H-graph morphisms; plain ones leave the Seifert
/// maps empty.
HMorphism morphism_from_json(const Json& doc);
Json morphism_to_json(const GraphMorphism& m);
Json morphism_to_json(const HMorphism& m);

GluingManifest manifest_from_json(const Json& doc, const LoadContext& ctx);
Json manifest_to_json(const GluingManifest& m);

TypedGraph typed_graph_from_json(const Json& doc);
Json typed_graph_to_json(const TypedGraph& g);

struct Document {
  std::variant<Catalog, NahGraph, HGraph, HMorphism, GluingManifest, TypedGraph> payload;
  /// Plain morphisms serialize without the Seifert maps.
  bool plain_morphism = true;

  std::string kind() const;
};

Document parse_document(std::string_view text, const LoadContext& ctx = {});
std::string serialize(const Document& doc);

/// File loaders: relative catalog paths resolve against the file's
/// directory.  `default_catalog` is used when a graph names no catalog.
std::shared_ptr<const Catalog> load_catalog(const std::filesystem::path& path);
Document load_document(const std::filesystem::path& path, const std::string& default_catalog = {});
NahGraph load_graph(const std::filesystem::path& path, const std::string& default_catalog = {});
HGraph load_h_graph(const std::filesystem::path& path, const std::string& default_catalog = {});

Json report_to_json(const Report& r);

}  // namespace qigraph
