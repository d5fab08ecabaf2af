#pragma once

#include <span>
#include <string>
#include <vector>

#include "schurlab/funcspace.hpp"

namespace schurlab {

/// A finitely supported real function phi on a group, seen as the kernel
/// k_phi(x, y) = phi(x y^{-1}). Evaluation outside the support returns 0.
class Kernel {
 public:
  explicit Kernel(Group group, std::string label = {})
      : group_(std::move(group)), label_(std::move(label)) {}

  static Kernel make(Group group, std::vector<Entry> entries, std::string label = {});

  const Group& group() const noexcept { return group_; }
  const std::string& label() const noexcept { return label_; }
  std::span<const Entry> entries() const noexcept { return table_.entries(); }
  std::size_t support_size() const noexcept { return table_.size(); }
  bool empty() const noexcept { return table_.empty(); }
  double operator()(const Element& s) const noexcept { return table_.at(s); }
  std::vector<Element> support() const;

  double at_identity() const { return (*this)(group_.identity()); }
  double sup_norm() const noexcept;
  double l1_norm() const noexcept;

  friend bool operator==(const Kernel& a, const Kernel& b) {
    return a.group_ == b.group_ && a.table_ == b.table_;
  }

 private:
  Group group_;
  std::string label_;
  detail::SparseTable table_;
};

/// Phi(f)(s) = sum_t f(t) f(t s) = <f, rho(s) f>.
///
/// The products are summed in descending order, so the value depends only on
/// the multiset of products; in particular Phi(delta_u * f) == Phi(f)
/// bit-for-bit.
double phi(const SparseFunction& f, const Element& s);

/// Phi(f) on its whole support {t^{-1} u : t, u in supp f}. Checks that the
/// support stays inside B(e, 2R) when supp f is inside B(e, R).
Kernel phi_kernel(const SparseFunction& f);
/// Phi(f) evaluated on the finite set `at` (zero values are not stored).
Kernel phi_kernel(const SparseFunction& f, std::span<const Element> at);

struct PsdReport {
  bool psd = true;
  double min_eigenvalue = 0.0;
  double scale = 0.0;      // max |G[s,t]|
  double asymmetry = 0.0;  // max |G[s,t] - G[t,s]| before symmetrization
};

inline constexpr std::size_t kDefaultGramCap = 400;

/// Positive-definiteness test on a finite set: G[s,t] = k(s^{-1} t),
/// psd iff lambda_min(G) >= -tol * scale. Throws ValidationError when G is
/// asymmetric beyond tol * scale, ResourceError when |F| exceeds `cap`.
PsdReport gram_psd_check(const Kernel& k, std::span<const Element> set,
                         double tol = 1e-9, std::size_t cap = kDefaultGramCap);

/// | ||f - rho(s) f||_2^2 - 2 (1 - Phi(f)(s)) | for unit-l^2 f.
double invariance_identity_residual(const SparseFunction& f, const Element& s);

/// Pointwise sum; all kernels must share a group.
Kernel sum_kernels(std::span<const Kernel> kernels);

}  // namespace schurlab
