#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "schurlab/group.hpp"

namespace schurlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

using Entry = std::pair<Element, double>;

namespace detail {

// Finite map Element -> double, sorted by element order, with a hash index.
// Exact zeros are never stored.
class SparseTable {
 public:
  SparseTable() = default;
  explicit SparseTable(std::vector<Entry> entries);

  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  double at(const Element& x) const noexcept {
    auto it = index_.find(x);
    return it == index_.end() ? 0.0 : it->second;
  }
  bool contains(const Element& x) const noexcept { return index_.contains(x); }

  friend bool operator==(const SparseTable& a, const SparseTable& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<Element, double, ElementHash> index_;
};

}  // namespace detail

/// A finitely supported nonnegative function on a group.
///
/// The strict constructor enforces values in [0, 1] (zeros are dropped), the
/// setting of sub-normalized l^p densities. The relaxed constructor accepts
/// any finite nonnegative values, for optimizer iterates and residuals.
class SparseFunction {
 public:
  explicit SparseFunction(Group group) : group_(std::move(group)) {}

  static SparseFunction make(Group group, std::vector<Entry> entries);
  static SparseFunction make_relaxed(Group group, std::vector<Entry> entries);

  const Group& group() const noexcept { return group_; }
  /// Support points and values in element order.
  std::span<const Entry> entries() const noexcept { return table_.entries(); }
  std::size_t support_size() const noexcept { return table_.size(); }
  bool empty() const noexcept { return table_.empty(); }
  double operator()(const Element& x) const noexcept { return table_.at(x); }
  bool contains(const Element& x) const noexcept { return table_.contains(x); }
  bool relaxed() const noexcept { return relaxed_; }
  double max_value() const noexcept;
  std::vector<Element> support() const;

  /// Indices into entries() by value descending, element order on ties; the
  /// summation order of every norm.
  std::span<const std::size_t> descending_order() const noexcept { return by_value_; }

  friend bool operator==(const SparseFunction& a, const SparseFunction& b) {
    return a.group_ == b.group_ && a.table_ == b.table_;
  }

 private:
  SparseFunction(Group group, std::vector<Entry> entries, bool relaxed);

  Group group_;
  detail::SparseTable table_;
  std::vector<std::size_t> by_value_;
  bool relaxed_ = false;
};

SparseFunction dirac(const Group& g, const Element& x, double value = 1.0);
/// |F|^{-1/p} 1_F.
SparseFunction normalized_indicator(const Group& g, std::span<const Element> set,
                                    double p);

/// sum_x f(x)^p for finite p >= 1, i.e. ||f||_p^p.
double power_sum(const SparseFunction& f, double p);
/// ||f||_p for p in [1, inf]; kInfinity selects the max norm.
double norm_p(const SparseFunction& f, double p);
/// ||f - g||_p over the union of supports.
double distance_p(const SparseFunction& f, const SparseFunction& g, double p);

/// (delta_s * f)(x) = f(s^{-1} x): support moves to s . supp(f).
SparseFunction translate_left(const Element& s, const SparseFunction& f);
/// (rho(s) f)(x) = f(x s): support moves to supp(f) . s^{-1}.
SparseFunction translate_right(const SparseFunction& f, const Element& s);

/// f . 1_{B(center, r)}.
SparseFunction restrict_to_ball(const SparseFunction& f, const Element& center, int r);
/// f . 1_{complement of B(center, r)}.
SparseFunction remove_ball(const SparseFunction& f, const Element& center, int r);

/// Pointwise f^exponent (relaxed when the result may leave [0, 1]).
SparseFunction pointwise_power(const SparseFunction& f, double exponent);

struct Concentration {
  double value = 0.0;  // sup_x ||f|_{B(x,r)}||_p^p
  Element center;      // an argmax, smallest in element order among ties
};

/// Concentration function q_f(r) = sup_x ||f|_{B(x,r)}||_p^p.
///
/// Candidate centers are the r-neighbourhood of supp(f); any other center
/// sees an empty restriction, so the supremum over candidates is exact.
/// Masses within 1e-12 of the running best count as ties.
Concentration concentration(const SparseFunction& f, double p, int r);

/// ||f||_p <= 1 within `tol`.
bool in_unit_ball(const SparseFunction& f, double p, double tol = 1e-12);

}  // namespace schurlab
