#pragma once

// On-disk JSON documents: datasets and weight schemes.
//
// Loading is strict. Unknown fields, missing fields and wrong types are
// collected as diagnostics and raised together in one DocumentError. The
// canonical serialization (sorted keys, two-space indent, trailing newline)
// is byte-stable, so parse -> serialize reproduces a canonical file exactly.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ivmf/core_model.hpp"
#include "ivmf/error.hpp"

namespace ivmf {

using json = nlohmann::json;

inline constexpr std::string_view supported_schema_version = "1.0";

namespace detail {

class SchemaReader {
 public:
  std::vector<Diagnostic> diagnostics;
  bool structural_error = false;

  void error(const std::string& location, std::string message, bool type_error = false) {
    if (!type_error) structural_error = true;
    diagnostics.push_back({location, std::move(message)});
  }

  bool expect_object(const json& value, const std::string& location) {
    if (value.is_object()) return true;
    error(location, std::string("expected object, got ") + value.type_name(), true);
    return false;
  }

  void reject_unknown(const json& object, std::initializer_list<std::string_view> allowed,
                      const std::string& location) {
    for (const auto& [key, _] : object.items()) {
      bool known = false;
      for (auto a : allowed) known = known || key == a;
      if (!known) error(join(location, key), "unknown field");
    }
  }

  const json* required(const json& object, std::string_view key, const std::string& location) {
    auto it = object.find(key);
    if (it == object.end()) {
      error(join(location, key), "required field missing");
      return nullptr;
    }
    return &*it;
  }

  static const json* optional(const json& object, std::string_view key) {
    auto it = object.find(key);
    return it == object.end() ? nullptr : &*it;
  }

  std::optional<int> integer(const json& value, const std::string& location) {
    if (!value.is_number_integer()) {
      error(location, std::string("expected integer, got ") + value.type_name(), true);
      return std::nullopt;
    }
    return value.get<int>();
  }

  std::optional<double> number(const json& value, const std::string& location) {
    if (!value.is_number()) {
      error(location, std::string("expected number, got ") + value.type_name(), true);
      return std::nullopt;
    }
    return value.get<double>();
  }

  std::optional<std::string> string(const json& value, const std::string& location) {
    if (!value.is_string()) {
      error(location, std::string("expected string, got ") + value.type_name(), true);
      return std::nullopt;
    }
    return value.get<std::string>();
  }

  static std::string join(const std::string& location, std::string_view key) {
    return location.empty() ? std::string(key) : location + "." + std::string(key);
  }
};

inline json parse_json_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string message = e.what();
    if (auto pos = message.find("column "); pos != std::string::npos) {
      if (auto colon = message.find(": ", pos); colon != std::string::npos) {
        message = message.substr(colon + 2);
      }
    }
    throw DocumentError(Errc::malformed_document,
                        {{"line " + std::to_string(line) + ", column " + std::to_string(column),
                          message}});
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::file_not_found, "cannot read file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline std::string protocol_location(std::size_t index, const json& protocol) {
  std::string location = "protocols[" + std::to_string(index) + "]";
  if (protocol.is_object()) {
    auto it = protocol.find("name");
    if (it != protocol.end() && it->is_string()) location += "(" + it->get<std::string>() + ")";
  }
  return location;
}

inline void read_protocol(SchemaReader& reader, const json& doc, const std::string& loc,
                          ProtocolRecord& out) {
  if (!reader.expect_object(doc, loc)) return;
  reader.reject_unknown(doc, {"name", "components", "pu", "pu_sources", "properties"}, loc);

  if (const auto* v = reader.required(doc, "name", loc)) {
    out.name = reader.string(*v, loc + ".name").value_or("");
  }
  if (const auto* v = reader.required(doc, "pu", loc)) {
    out.pu = reader.integer(*v, loc + ".pu").value_or(0);
  }
  if (const auto* v = reader.required(doc, "components", loc)) {
    if (!v->is_array()) {
      reader.error(loc + ".components", "expected array", true);
    } else {
      for (std::size_t i = 0; i < v->size(); ++i) {
        const auto& c = (*v)[i];
        const std::string cloc = loc + ".components[" + std::to_string(i) + "]";
        if (!reader.expect_object(c, cloc)) continue;
        reader.reject_unknown(c, {"name", "class"}, cloc);
        ComponentSpec spec;
        if (const auto* n = reader.required(c, "name", cloc)) {
          spec.name = reader.string(*n, cloc + ".name").value_or("");
        }
        if (const auto* k = reader.required(c, "class", cloc)) {
          spec.complexity_class = static_cast<ComplexityClass>(
              reader.integer(*k, cloc + ".class").value_or(1));
        }
        out.components.push_back(std::move(spec));
      }
    }
  }
  if (const auto* v = SchemaReader::optional(doc, "pu_sources")) {
    if (!v->is_array()) {
      reader.error(loc + ".pu_sources", "expected array", true);
    } else {
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (auto s = reader.string((*v)[i], loc + ".pu_sources[" + std::to_string(i) + "]")) {
          out.sources.push_back(*s);
        }
      }
    }
  }
  if (const auto* v = reader.required(doc, "properties", loc)) {
    const std::string ploc = loc + ".properties";
    if (!reader.expect_object(*v, ploc)) return;
    reader.reject_unknown(*v, {"SEC", "ANON", "IVF", "UVF", "EVF", "CRES"}, ploc);
    for (auto prop : all_properties) {
      const std::string symbol(property_symbol(prop));
      const auto* entry = reader.required(*v, symbol, ploc);
      if (entry == nullptr) continue;
      const std::string eloc = ploc + "." + symbol;
      if (!reader.expect_object(*entry, eloc)) continue;
      reader.reject_unknown(*entry, {"score", "expression", "justification"}, eloc);
      TrustAssignment a;
      a.property = prop;
      if (const auto* s = reader.required(*entry, "score", eloc)) {
        a.score = reader.integer(*s, eloc + ".score").value_or(0);
      }
      if (const auto* e = SchemaReader::optional(*entry, "expression")) {
        a.expression = reader.string(*e, eloc + ".expression");
      }
      if (const auto* j = SchemaReader::optional(*entry, "justification")) {
        a.justification = reader.string(*j, eloc + ".justification").value_or("");
      }
      out.assignments.emplace(prop, std::move(a));
    }
  }
}

inline void raise_if_any(const SchemaReader& reader) {
  if (reader.diagnostics.empty()) return;
  throw DocumentError(reader.structural_error ? Errc::schema_violation : Errc::type_error,
                      reader.diagnostics);
}

}  // namespace detail

// Accepts "data/ivmf-2024" for "data/ivmf-2024.json".
inline std::filesystem::path resolve_document_path(const std::filesystem::path& path) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(path, ec)) return path;
  if (!path.has_extension()) {
    auto with_ext = path;
    with_ext += ".json";
    if (std::filesystem::is_regular_file(with_ext, ec)) return with_ext;
  }
  throw Error(Errc::file_not_found, "file not found: " + path.string());
}

inline Dataset dataset_from_json(const json& doc) {
  detail::SchemaReader reader;
  Dataset dataset;
  if (!reader.expect_object(doc, "")) detail::raise_if_any(reader);
  reader.reject_unknown(doc, {"schema_version", "protocols"}, "");
  if (const auto* v = reader.required(doc, "schema_version", "")) {
    dataset.schema_version = reader.string(*v, "schema_version").value_or("");
    if (v->is_string() && dataset.schema_version != supported_schema_version) {
      reader.error("schema_version", "unsupported schema version '" + dataset.schema_version +
                                         "' (expected " + std::string(supported_schema_version) +
                                         ")");
    }
  }
  if (const auto* v = reader.required(doc, "protocols", "")) {
    if (!v->is_array()) {
      reader.error("protocols", "expected array", true);
    } else {
      for (std::size_t i = 0; i < v->size(); ++i) {
        ProtocolRecord record;
        detail::read_protocol(reader, (*v)[i], detail::protocol_location(i, (*v)[i]), record);
        dataset.protocols.push_back(std::move(record));
      }
    }
  }
  detail::raise_if_any(reader);

  const auto findings = validate_dataset(dataset);
  if (!findings.empty()) {
    std::vector<Diagnostic> diagnostics;
    for (const auto& f : findings) {
      diagnostics.push_back({f.protocol.empty() ? f.field : "'" + f.protocol + "'." + f.field,
                             f.rule});
    }
    throw DocumentError(Errc::invariant_violation, std::move(diagnostics));
  }
  return dataset;
}

inline Dataset parse_dataset(std::string_view text) {
  return dataset_from_json(detail::parse_json_text(text));
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  return parse_dataset(detail::read_file(resolve_document_path(path)));
}

inline json dataset_to_json(const Dataset& dataset) {
  json protocols = json::array();
  for (const auto& p : dataset.protocols) {
    json components = json::array();
    for (const auto& c : p.components) {
      components.push_back({{"name", c.name}, {"class", static_cast<int>(c.complexity_class)}});
    }
    json properties = json::object();
    for (const auto& [prop, a] : p.assignments) {
      json entry = {{"score", a.score}, {"justification", a.justification}};
      if (a.expression) entry["expression"] = *a.expression;
      properties[std::string(property_symbol(prop))] = std::move(entry);
    }
    protocols.push_back({{"name", p.name},
                         {"components", std::move(components)},
                         {"pu", p.pu},
                         {"pu_sources", p.sources},
                         {"properties", std::move(properties)}});
  }
  return {{"schema_version", dataset.schema_version}, {"protocols", std::move(protocols)}};
}

inline std::string serialize_dataset(const Dataset& dataset) {
  return dataset_to_json(dataset).dump(2) + "\n";
}

// `location` prefixes diagnostics, e.g. "weights" for a request body field.
inline WeightScheme weights_from_json(const json& doc, const std::string& location = "") {
  detail::SchemaReader reader;
  WeightScheme scheme;
  if (!reader.expect_object(doc, location)) detail::raise_if_any(reader);
  reader.reject_unknown(doc, {"name", "description", "ivmf", "tm"}, location);
  using detail::SchemaReader;
  if (const auto* v = reader.required(doc, "name", location)) {
    scheme.name = reader.string(*v, SchemaReader::join(location, "name")).value_or("");
  }
  if (const auto* v = SchemaReader::optional(doc, "description")) {
    scheme.description =
        reader.string(*v, SchemaReader::join(location, "description")).value_or("");
  }
  auto read_group = [&](std::string_view group,
                        std::initializer_list<std::pair<std::string_view, double*>> fields) {
    const std::string gloc = SchemaReader::join(location, group);
    const auto* g = reader.required(doc, group, location);
    if (g == nullptr || !reader.expect_object(*g, gloc)) return;
    std::vector<std::string_view> allowed;
    for (const auto& [key, _] : fields) allowed.push_back(key);
    for (const auto& [key, _] : g->items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        reader.error(SchemaReader::join(gloc, key), "unknown field");
      }
    }
    for (const auto& [key, target] : fields) {
      if (const auto* w = reader.required(*g, key, gloc)) {
        if (auto value = reader.number(*w, SchemaReader::join(gloc, key))) *target = *value;
      }
    }
  };
  read_group("ivmf", {{"cmpx", &scheme.w_cmpx}, {"pu", &scheme.w_pu}, {"tm", &scheme.w_tm}});
  read_group("tm", {{"sec", &scheme.w_property[0]},
                    {"anon", &scheme.w_property[1]},
                    {"ivf", &scheme.w_property[2]},
                    {"uvf", &scheme.w_property[3]},
                    {"evf", &scheme.w_property[4]},
                    {"cres", &scheme.w_property[5]}});
  detail::raise_if_any(reader);
  if (!scheme.all_finite()) {
    throw DocumentError(Errc::schema_violation, {{location, "weights must be finite"}});
  }
  return scheme;
}

inline WeightScheme parse_weights(std::string_view text) {
  return weights_from_json(detail::parse_json_text(text));
}

inline WeightScheme load_weights(const std::filesystem::path& path) {
  return parse_weights(detail::read_file(resolve_document_path(path)));
}

inline json weights_to_json(const WeightScheme& scheme) {
  json doc = {
      {"name", scheme.name},
      {"ivmf", {{"cmpx", scheme.w_cmpx}, {"pu", scheme.w_pu}, {"tm", scheme.w_tm}}},
      {"tm",
       {{"sec", scheme.w_property[0]},
        {"anon", scheme.w_property[1]},
        {"ivf", scheme.w_property[2]},
        {"uvf", scheme.w_property[3]},
        {"evf", scheme.w_property[4]},
        {"cres", scheme.w_property[5]}}},
  };
  if (!scheme.description.empty()) doc["description"] = scheme.description;
  return doc;
}

inline std::string serialize_weights(const WeightScheme& scheme) {
  return weights_to_json(scheme).dump(2) + "\n";
}

}  // namespace ivmf
