#include "schurlab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "schurlab/errors.hpp"

namespace schurlab::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError((where.empty() ? std::string("<root>") : where) + ": " + what);
}

std::string child(const std::string& where, const std::string& key) { return where + "/" + key; }
std::string child(const std::string& where, std::size_t i) {
  return where + "/" + std::to_string(i);
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Group resolve_group(const json& j, const std::optional<Group>& group, const std::string& where) {
  if (j.is_object() && j.contains("group")) {
    const auto& tag = j.at("group");
    if (!tag.is_string()) fail(child(where, "group"), "group tag must be a string");
    Group parsed = Group::parse(tag.get<std::string>());
    if (group && !(*group == parsed)) {
      fail(child(where, "group"), "group " + parsed.spec() + " does not match " + group->spec());
    }
    return group ? *group : parsed;
  }
  if (!group) fail(where, "missing \"group\" field");
  return *group;
}

std::vector<Entry> entries_from_json(const Group& g, const json& j, const std::string& where,
                                     bool nonnegative) {
  if (!j.is_array()) fail(where, "entries must be an array of [element, value] pairs");
  std::vector<Entry> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& pair = j[i];
    const auto at = child(where, i);
    if (!pair.is_array() || pair.size() != 2) fail(at, "expected [element, value]");
    Element x = element_from_json(g, pair[0], child(at, 0));
    if (!pair[1].is_number()) fail(child(at, 1), "value must be a number");
    const double v = pair[1].get<double>();
    if (!std::isfinite(v)) fail(child(at, 1), "value must be finite");
    if (nonnegative && (v < 0.0 || v > 1.0)) fail(child(at, 1), "value must lie in [0, 1]");
    out.emplace_back(std::move(x), v);
  }
  return out;
}

json entries_to_json(const Group& g, std::span<const Entry> entries) {
  json arr = json::array();
  for (const auto& [x, v] : entries) arr.push_back(json::array({element_to_json(g, x), v}));
  return arr;
}

}  // namespace

json element_to_json(const Group& g, const Element& x) {
  g.validate(x);
  switch (g.kind()) {
    case GroupKind::ZD: {
      json arr = json::array();
      for (auto c : x.data()) arr.push_back(c);
      return arr;
    }
    case GroupKind::Free:
      return g.format(x);
    case GroupKind::Cyclic:
      return x[0];
  }
  return nullptr;
}

Element element_from_json(const Group& g, const json& j, const std::string& where) {
  try {
    switch (g.kind()) {
      case GroupKind::ZD: {
        if (j.is_number_integer() && g.rank() == 1) return g.coords({j.get<std::int32_t>()});
        if (!j.is_array()) fail(where, "Z^d elements are integer arrays");
        std::vector<std::int32_t> xs;
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (!j[i].is_number_integer()) fail(child(where, i), "coordinate must be an integer");
          xs.push_back(j[i].get<std::int32_t>());
        }
        return g.coords(std::move(xs));
      }
      case GroupKind::Free:
        if (!j.is_string()) fail(where, "free-group elements are word strings like \"a B\"");
        return g.word(j.get<std::string>());
      case GroupKind::Cyclic:
        if (!j.is_number_integer()) fail(where, "cyclic-group elements are integers");
        {
          const auto r = j.get<std::int64_t>();
          if (r < 0 || r >= g.modulus()) fail(where, "residue must lie in [0, m)");
          return g.residue(r);
        }
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
  fail(where, "unsupported group");
}

Element parse_element(const Group& g, std::string_view text) {
  std::string s(text);
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  while (!s.empty() && s.back() == ' ') s.pop_back();
  if (g.kind() == GroupKind::Free) return g.word(s);
  if (g.kind() == GroupKind::ZD && (s.empty() || s.front() != '[')) s = "[" + s + "]";
  json j;
  try {
    j = json::parse(s);
  } catch (const json::parse_error&) {
    throw ValidationError("cannot parse element '" + std::string(text) + "' for " + g.spec());
  }
  return element_from_json(g, j, "'" + std::string(text) + "'");
}

std::vector<Element> parse_element_list(const Group& g, std::string_view text, char sep) {
  std::vector<Element> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(sep, start);
    const auto piece = text.substr(start, pos == std::string_view::npos ? text.npos : pos - start);
    if (!piece.empty()) out.push_back(parse_element(g, piece));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

json elements_to_json(const Group& g, std::span<const Element> xs) {
  json arr = json::array();
  for (const auto& x : xs) arr.push_back(element_to_json(g, x));
  return arr;
}

std::vector<Element> elements_from_json(const Group& g, const json& j, const std::string& where) {
  const json* list = &j;
  std::string at = where;
  if (j.is_object()) {
    if (!j.contains("elements")) fail(where, "expected an \"elements\" array");
    list = &j.at("elements");
    at = child(where, "elements");
  }
  if (!list->is_array()) fail(at, "expected an array of elements");
  std::vector<Element> out;
  for (std::size_t i = 0; i < list->size(); ++i) {
    out.push_back(element_from_json(g, (*list)[i], child(at, i)));
  }
  return out;
}

json function_to_json(const SparseFunction& f) {
  return {{"group", f.group().spec()}, {"entries", entries_to_json(f.group(), f.entries())}};
}

SparseFunction function_from_json(const json& j, const std::optional<Group>& group,
                                  const std::string& where) {
  const Group g = resolve_group(j, group, where);
  const json* entries = &j;
  std::string at = where;
  if (j.is_object()) {
    if (!j.contains("entries")) fail(where, "missing \"entries\" field");
    entries = &j.at("entries");
    at = child(where, "entries");
  }
  return SparseFunction::make(g, entries_from_json(g, *entries, at, true));
}

std::vector<SparseFunction> sequence_from_json(const json& j, const std::optional<Group>& group) {
  const json* list = &j;
  std::string at;
  std::optional<Group> g = group;
  if (j.is_object()) {
    g = resolve_group(j, group, "");
    if (!j.contains("sequence")) fail("", "missing \"sequence\" field");
    list = &j.at("sequence");
    at = "/sequence";
  }
  if (!list->is_array()) fail(at, "a sequence is a JSON array of functions");
  std::vector<SparseFunction> out;
  for (std::size_t i = 0; i < list->size(); ++i) {
    out.push_back(function_from_json((*list)[i], g, child(at, i)));
    if (!g) g = out.back().group();
  }
  return out;
}

json kernel_to_json(const Kernel& k) {
  return {{"group", k.group().spec()},
          {"label", k.label()},
          {"entries", entries_to_json(k.group(), k.entries())}};
}

Kernel kernel_from_json(const json& j, const std::optional<Group>& group) {
  const Group g = resolve_group(j, group, "");
  const json* entries = &j;
  std::string at;
  std::string label = "kernel";
  if (j.is_object()) {
    if (!j.contains("entries")) fail("", "missing \"entries\" field");
    entries = &j.at("entries");
    at = "/entries";
    if (j.contains("label") && j.at("label").is_string()) label = j.at("label").get<std::string>();
  }
  return Kernel::make(g, entries_from_json(g, *entries, at, false), label);
}

json xi_to_json(const Xi& xi) {
  json profiles = json::array();
  for (const auto& prof : xi.profiles()) {
    profiles.push_back({{"entries", entries_to_json(xi.group(), prof.alpha.entries())},
                        {"norm_p", norm_p(prof.alpha, xi.p())}});
  }
  return {{"group", xi.group().spec()}, {"p", xi.p()}, {"mass", xi.mass()}, {"profiles", profiles}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ValidationError(path + ":" + std::to_string(line) + ":" + std::to_string(column) +
                          ": malformed JSON (" + e.what() + ")");
  }
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string entries_to_csv(const Group& g, std::span<const Entry> entries,
                           std::string_view value_header) {
  std::string out = "element," + std::string(value_header) + "\n";
  for (const auto& [x, v] : entries) {
    out += csv_field(g.format(x));
    out += ',';
    out += shortest(v);
    out += '\n';
  }
  return out;
}

}  // namespace schurlab::io
