#include "inputs.hpp"

#include <charconv>
#include <cmath>

namespace schurlab::cli {

namespace {

double to_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ValidationError("invalid number '" + std::string(text) + "' for " + std::string(what));
  }
  return v;
}

int to_integer(std::string_view text, std::string_view what) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ValidationError("invalid integer '" + std::string(text) + "' for " + std::string(what));
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == text.npos ? text.npos : pos - start));
    if (pos == text.npos) break;
    start = pos + 1;
  }
  return out;
}

// A point at distance n from e, for the two-bump sequence.
Element far_point(const Group& g, int n) {
  switch (g.kind()) {
    case GroupKind::ZD: {
      std::vector<std::int32_t> xs(static_cast<std::size_t>(g.rank()), 0);
      xs[0] = n;
      return g.coords(std::move(xs));
    }
    case GroupKind::Free: {
      std::string w;
      for (int i = 0; i < n; ++i) w += i == 0 ? "a" : " a";
      return n == 0 ? g.identity() : g.word(w);
    }
    case GroupKind::Cyclic:
      return g.residue(n);
  }
  return g.identity();
}

std::vector<Element> box_or_ball(const Group& g, int n) {
  if (g.kind() == GroupKind::ZD) {
    const auto box = folner_boxes(g, n);
    return {box.elements().begin(), box.elements().end()};
  }
  return *g.ball_at_identity(n);
}

SparseFunction two_bump(const Group& g, int n, double p) {
  if (n < 1) throw ValidationError("two-bump needs n >= 1");
  const Element x = far_point(g, n);
  const Element y = g.inv(x);
  const double c = std::pow(2.0, -1.0 / p);
  if (x == y) return dirac(g, x, c);
  return SparseFunction::make(g, {{x, c}, {y, c}});
}

}  // namespace

SpecArgs SpecArgs::parse(std::string_view text, std::string_view prefix) {
  if (!text.starts_with(prefix)) {
    throw ValidationError("spec '" + std::string(text) + "' must start with '" +
                          std::string(prefix) + "'");
  }
  const auto parts = split(text.substr(prefix.size()), ':');
  SpecArgs out;
  out.name = std::string(parts.front());
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ValidationError("expected key=value in '" + std::string(text) + "', got '" +
                            std::string(parts[i]) + "'");
    }
    out.args.emplace_back(std::string(parts[i].substr(0, eq)),
                          std::string(parts[i].substr(eq + 1)));
  }
  return out;
}

bool SpecArgs::has(std::string_view key) const {
  for (const auto& [k, v] : args) {
    if (k == key) return true;
  }
  return false;
}

double SpecArgs::number(std::string_view key, double fallback) const {
  for (const auto& [k, v] : args) {
    if (k == key) return to_number(v, key);
  }
  return fallback;
}

int SpecArgs::integer(std::string_view key, int fallback) const {
  for (const auto& [k, v] : args) {
    if (k == key) return to_integer(v, key);
  }
  return fallback;
}

void SpecArgs::check_keys(std::initializer_list<std::string_view> allowed) const {
  for (const auto& [k, v] : args) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ValidationError("unknown key '" + k + "' in builtin:" + name);
    }
  }
}

SparseFunction function_from_spec(const Group& g, const std::string& spec) {
  if (!spec.starts_with("builtin:")) return io::function_from_json(io::read_json_file(spec), g);
  const auto a = SpecArgs::parse(spec, "builtin:");
  if (a.name == "folner") {
    a.check_keys({"n", "p"});
    const int n = a.integer("n", 10);
    if (n < 0) throw ValidationError("builtin:folner needs n >= 0");
    return normalized_indicator(g, box_or_ball(g, n), a.number("p", 2.0));
  }
  if (a.name == "dirac") {
    a.check_keys({});
    return dirac(g, g.identity());
  }
  if (a.name == "two-bump") {
    a.check_keys({"n", "p"});
    return two_bump(g, a.integer("n", 5), a.number("p", 2.0));
  }
  throw ValidationError("unknown builtin function '" + a.name +
                        "' (expected folner, dirac or two-bump)");
}

std::vector<SparseFunction> builtin_sequence(const Group& g, const std::string& name, int first,
                                             int last, double p) {
  if (!(p >= 1.0 && p < 2.0)) throw ValidationError("--p must lie in [1, 2)");
  std::vector<SparseFunction> out;
  for (int n = first; n <= last; ++n) {
    if (name == "two-bump") {
      out.push_back(two_bump(g, n, p));
    } else if (name == "folner") {
      out.push_back(normalized_indicator(g, box_or_ball(g, n), p));
    } else if (name == "dirac") {
      out.push_back(dirac(g, g.identity()));
    } else {
      throw ValidationError("unknown builtin sequence '" + name +
                            "' (expected two-bump, folner or dirac)");
    }
  }
  return out;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ValidationError("--n-range expects a:b, got '" + text + "'");
  const int a = to_integer(parts[0], "--n-range");
  const int b = to_integer(parts[1], "--n-range");
  if (a < 0 || b < a) throw ValidationError("--n-range needs 0 <= a <= b");
  return {a, b};
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (auto piece : split(text, ',')) out.push_back(to_number(piece, "list"));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (auto piece : split(text, ',')) out.push_back(to_integer(piece, "list"));
  return out;
}

std::vector<Element> set_from_options(const Group& g, int radius, const std::string& file) {
  if (!file.empty()) {
    auto xs = io::elements_from_json(g, io::read_json_file(file));
    if (xs.empty()) throw ValidationError(file + ": the set is empty");
    return xs;
  }
  if (radius < 0) throw ValidationError("the set radius must be >= 0");
  return *g.ball_at_identity(radius);
}

std::vector<ScheduleStep> schedule_from_spec(const Group& g, const std::string& spec) {
  if (spec.starts_with("builtin:")) {
    const auto a = SpecArgs::parse(spec, "builtin:");
    if (a.name != "doubling") throw ValidationError("unknown schedule '" + a.name + "'");
    a.check_keys({"first", "last"});
    return doubling_schedule(g, a.integer("first", 2), a.integer("last", 10));
  }
  const auto j = io::read_json_file(spec);
  if (!j.is_array()) throw ValidationError(spec + ": <root>: a schedule is a JSON array");
  std::vector<ScheduleStep> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto where = spec + ": /" + std::to_string(i);
    const auto& row = j[i];
    if (!row.is_object() || !row.contains("p") || !row.at("p").is_number()) {
      throw ValidationError(where + ": expected {\"L\" or \"q\", \"p\"}");
    }
    const double p = row.at("p").get<double>();
    if (row.contains("L") && row.at("L").is_number_integer()) {
      out.push_back({PercModel::tiling(g, row.at("L").get<int>()), p, static_cast<int>(i + 1)});
    } else if (row.contains("q") && row.at("q").is_number()) {
      const std::size_t cap = row.contains("cap") && row.at("cap").is_number_unsigned()
                                  ? row.at("cap").get<std::size_t>()
                                  : PercModel::kDefaultCap;
      out.push_back(
          {PercModel::bernoulli(g, row.at("q").get<double>(), cap), p, static_cast<int>(i + 1)});
    } else {
      throw ValidationError(where + ": expected an integer \"L\" or a number \"q\"");
    }
  }
  if (out.empty()) throw ValidationError(spec + ": the schedule is empty");
  return out;
}

}  // namespace schurlab::cli
