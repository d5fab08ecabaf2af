#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "schurlab/compactification.hpp"
#include "schurlab/funcspace.hpp"
#include "schurlab/posdef.hpp"

namespace schurlab::io {

using nlohmann::json;

// Elements: Z^d as [x1, ..., xd], free-group words as "a B a" ("e" for the
// identity, uppercase = inverse), residues as integers.
json element_to_json(const Group& g, const Element& x);
/// `where` names the JSON location for error messages (a JSON pointer).
Element element_from_json(const Group& g, const json& j, const std::string& where = "");

/// Command-line element syntax: "3", "-1,2", "[1,-2]", "a B a", "e".
Element parse_element(const Group& g, std::string_view text);
std::vector<Element> parse_element_list(const Group& g, std::string_view text, char sep = ';');

json elements_to_json(const Group& g, std::span<const Element> xs);
std::vector<Element> elements_from_json(const Group& g, const json& j, const std::string& where = "");

// {"group": "Z1", "entries": [[element, value], ...]}
json function_to_json(const SparseFunction& f);
/// The group comes from the "group" field unless `group` is given (then the
/// field, if present, must agree). Values must lie in [0, 1].
SparseFunction function_from_json(const json& j, const std::optional<Group>& group = std::nullopt,
                                  const std::string& where = "");
/// A JSON list of functions, or {"group": ..., "sequence": [...]}.
std::vector<SparseFunction> sequence_from_json(const json& j,
                                               const std::optional<Group>& group = std::nullopt);

// {"group": "Z1", "label": "...", "entries": [[element, value], ...]}
json kernel_to_json(const Kernel& k);
Kernel kernel_from_json(const json& j, const std::optional<Group>& group = std::nullopt);

// {"group": ..., "p": ..., "profiles": [{"entries": [...], "norm_p": ...}, ...]}
json xi_to_json(const Xi& xi);

/// Reads and parses a JSON file; syntax errors become ValidationError with
/// line and column.
json read_json_file(const std::string& path);

/// CSV rows "element,value" with a header; elements containing commas are
/// quoted.
std::string entries_to_csv(const Group& g, std::span<const Entry> entries,
                           std::string_view value_header = "value");

std::string csv_field(std::string_view s);

}  // namespace schurlab::io
