#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "schurlab/schurlab.hpp"

namespace schurlab::cli {

/// "key=value" pairs after the leading name of a colon-separated spec, so
/// "builtin:folner:n=10:p=2" yields name "folner" and {n: 10, p: 2}.
struct SpecArgs {
  std::string name;
  std::vector<std::pair<std::string, std::string>> args;

  static SpecArgs parse(std::string_view text, std::string_view prefix);
  bool has(std::string_view key) const;
  double number(std::string_view key, double fallback) const;
  int integer(std::string_view key, int fallback) const;
  /// Rejects keys outside `allowed`.
  void check_keys(std::initializer_list<std::string_view> allowed) const;
};

/// A single function: "builtin:folner:n=10[:p=2]", "builtin:dirac",
/// "builtin:two-bump:n=5[:p=1.5]", or a JSON file path.
SparseFunction function_from_spec(const Group& g, const std::string& spec);

/// Builtin sequences indexed by n in [first, last]:
///   two-bump  2^{-1/p} (delta_{x_n} + delta_{x_n^{-1}}), x_n at distance n
///   folner    |B_n|^{-1/p} 1_{B_n}, B_n = [-n, n]^d on Z^d (the ball elsewhere)
///   dirac     delta_e
std::vector<SparseFunction> builtin_sequence(const Group& g, const std::string& name, int first,
                                             int last, double p);

/// "a:b" with a <= b.
std::pair<int, int> parse_range(const std::string& text);

/// Comma-separated numbers.
std::vector<double> parse_number_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

/// The set B(e, radius), or the elements listed in a JSON file.
std::vector<Element> set_from_options(const Group& g, int radius, const std::string& file);

/// "builtin:doubling[:first=2][:last=10]" or a JSON file holding a list of
/// {"L": side, "p": exponent} or {"q": density, "p": exponent[, "cap": n]}.
std::vector<ScheduleStep> schedule_from_spec(const Group& g, const std::string& spec);

}  // namespace schurlab::cli
