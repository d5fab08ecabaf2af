#include "schurlab/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "schurlab/errors.hpp"

namespace schurlab {

namespace detail {

SparseTable::SparseTable(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::erase_if(entries_, [](const Entry& e) { return e.second == 0.0; });
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].first == entries_[i - 1].first) {
      throw ValidationError("duplicate support point in sparse table");
    }
  }
  index_.reserve(entries_.size());
  for (const auto& [x, v] : entries_) index_.emplace(x, v);
}

}  // namespace detail

SparseFunction::SparseFunction(Group group, std::vector<Entry> entries, bool relaxed)
    : group_(std::move(group)), relaxed_(relaxed) {
  for (const auto& [x, v] : entries) {
    group_.validate(x);
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("function values must be finite and nonnegative");
    }
    if (!relaxed && v > 1.0) {
      throw ValidationError("function values must lie in [0,1]");
    }
  }
  table_ = detail::SparseTable(std::move(entries));
  by_value_.resize(table_.size());
  std::iota(by_value_.begin(), by_value_.end(), std::size_t{0});
  auto es = table_.entries();
  std::stable_sort(by_value_.begin(), by_value_.end(),
                   [&](std::size_t a, std::size_t b) { return es[a].second > es[b].second; });
}

SparseFunction SparseFunction::make(Group group, std::vector<Entry> entries) {
  return SparseFunction(std::move(group), std::move(entries), false);
}

SparseFunction SparseFunction::make_relaxed(Group group, std::vector<Entry> entries) {
  return SparseFunction(std::move(group), std::move(entries), true);
}

double SparseFunction::max_value() const noexcept {
  return by_value_.empty() ? 0.0 : entries()[by_value_.front()].second;
}

std::vector<Element> SparseFunction::support() const {
  std::vector<Element> out;
  out.reserve(support_size());
  for (const auto& [x, v] : entries()) out.push_back(x);
  return out;
}

SparseFunction dirac(const Group& g, const Element& x, double value) {
  return SparseFunction::make(g, {{x, value}});
}

SparseFunction normalized_indicator(const Group& g, std::span<const Element> set,
                                    double p) {
  if (set.empty()) return SparseFunction(g);
  const double value = std::pow(static_cast<double>(set.size()), -1.0 / p);
  std::vector<Entry> entries;
  entries.reserve(set.size());
  for (const auto& x : set) entries.emplace_back(x, value);
  return SparseFunction::make(g, std::move(entries));
}

double power_sum(const SparseFunction& f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw ValidationError("power_sum needs a finite exponent p >= 1");
  }
  auto es = f.entries();
  double total = 0.0;
  if (p == 1.0) {
    for (auto i : f.descending_order()) total += es[i].second;
  } else if (p == 2.0) {
    for (auto i : f.descending_order()) total += es[i].second * es[i].second;
  } else {
    for (auto i : f.descending_order()) total += std::pow(es[i].second, p);
  }
  return total;
}

double norm_p(const SparseFunction& f, double p) {
  if (!(p >= 1.0)) throw ValidationError("norm_p needs p in [1, inf]");
  if (std::isinf(p)) return f.max_value();
  const double s = power_sum(f, p);
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  return std::pow(s, 1.0 / p);
}

double distance_p(const SparseFunction& f, const SparseFunction& g, double p) {
  if (!(f.group() == g.group())) throw ValidationError("functions live on different groups");
  std::vector<double> diffs;
  diffs.reserve(f.support_size() + g.support_size());
  for (const auto& [x, v] : f.entries()) diffs.push_back(std::abs(v - g(x)));
  for (const auto& [x, v] : g.entries()) {
    if (!f.contains(x)) diffs.push_back(v);
  }
  std::sort(diffs.begin(), diffs.end(), std::greater<>());
  if (std::isinf(p)) return diffs.empty() ? 0.0 : diffs.front();
  double total = 0.0;
  for (double d : diffs) total += std::pow(d, p);
  return std::pow(total, 1.0 / p);
}

namespace {

SparseFunction rebuild(const SparseFunction& like, std::vector<Entry> entries) {
  return like.relaxed() ? SparseFunction::make_relaxed(like.group(), std::move(entries))
                        : SparseFunction::make(like.group(), std::move(entries));
}

}  // namespace

SparseFunction translate_left(const Element& s, const SparseFunction& f) {
  const auto& g = f.group();
  std::vector<Entry> out;
  out.reserve(f.support_size());
  for (const auto& [x, v] : f.entries()) out.emplace_back(g.mul(s, x), v);
  return rebuild(f, std::move(out));
}

SparseFunction translate_right(const SparseFunction& f, const Element& s) {
  const auto& g = f.group();
  const Element s_inv = g.inv(s);
  std::vector<Entry> out;
  out.reserve(f.support_size());
  for (const auto& [x, v] : f.entries()) out.emplace_back(g.mul(x, s_inv), v);
  return rebuild(f, std::move(out));
}

SparseFunction restrict_to_ball(const SparseFunction& f, const Element& center, int r) {
  if (r < 0) throw ValidationError("restriction radius must be nonnegative");
  std::vector<Entry> out;
  for (const auto& [x, v] : f.entries()) {
    if (f.group().distance(center, x) <= r) out.emplace_back(x, v);
  }
  return rebuild(f, std::move(out));
}

SparseFunction remove_ball(const SparseFunction& f, const Element& center, int r) {
  if (r < 0) throw ValidationError("restriction radius must be nonnegative");
  std::vector<Entry> out;
  for (const auto& [x, v] : f.entries()) {
    if (f.group().distance(center, x) > r) out.emplace_back(x, v);
  }
  return rebuild(f, std::move(out));
}

SparseFunction pointwise_power(const SparseFunction& f, double exponent) {
  std::vector<Entry> out;
  out.reserve(f.support_size());
  for (const auto& [x, v] : f.entries()) out.emplace_back(x, std::pow(v, exponent));
  return SparseFunction::make_relaxed(f.group(), std::move(out));
}

Concentration concentration(const SparseFunction& f, double p, int r) {
  if (!(p >= 1.0) || std::isinf(p)) throw ValidationError("concentration needs p in [1, inf)");
  if (r < 0) throw ValidationError("concentration radius must be nonnegative");
  const auto& g = f.group();
  Concentration best{0.0, g.identity()};
  if (f.empty()) return best;

  auto ball = g.ball_at_identity(r);
  std::unordered_map<Element, double, ElementHash> mass;
  mass.reserve(f.support_size() * ball->size());
  for (const auto& [y, v] : f.entries()) {
    const double w = std::pow(v, p);
    for (const auto& u : *ball) mass[g.mul(y, u)] += w;
  }
  std::vector<std::pair<Element, double>> candidates(mass.begin(), mass.end());
  std::sort(candidates.begin(), candidates.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const double tie_tol = 1e-12 * std::max(1.0, power_sum(f, p));
  bool first = true;
  for (auto& [x, m] : candidates) {
    if (first || m > best.value + tie_tol) {
      best.value = m;
      best.center = x;
      first = false;
    }
  }
  return best;
}

bool in_unit_ball(const SparseFunction& f, double p, double tol) {
  return norm_p(f, p) <= 1.0 + tol;
}

}  // namespace schurlab
