#include "schurlab/posdef.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_set>

#include "linalg.hpp"
#include "schurlab/errors.hpp"

namespace schurlab {

namespace {

double sum_descending(std::vector<double>& xs) {
  std::sort(xs.begin(), xs.end(), std::greater<>());
  double total = 0.0;
  for (double x : xs) total += x;
  return total;
}

}  // namespace

Kernel Kernel::make(Group group, std::vector<Entry> entries, std::string label) {
  for (const auto& [x, v] : entries) {
    group.validate(x);
    if (!std::isfinite(v)) throw ValidationError("kernel values must be finite");
  }
  Kernel k(std::move(group), std::move(label));
  k.table_ = detail::SparseTable(std::move(entries));
  return k;
}

std::vector<Element> Kernel::support() const {
  std::vector<Element> out;
  out.reserve(support_size());
  for (const auto& [x, v] : entries()) out.push_back(x);
  return out;
}

double Kernel::sup_norm() const noexcept {
  double m = 0.0;
  for (const auto& [x, v] : entries()) m = std::max(m, std::abs(v));
  return m;
}

double Kernel::l1_norm() const noexcept {
  std::vector<double> xs;
  xs.reserve(support_size());
  for (const auto& [x, v] : entries()) xs.push_back(std::abs(v));
  return sum_descending(xs);
}

double phi(const SparseFunction& f, const Element& s) {
  const auto& g = f.group();
  std::vector<double> products;
  products.reserve(f.support_size());
  for (const auto& [t, v] : f.entries()) {
    const double w = f(g.mul(t, s));
    if (w != 0.0) products.push_back(v * w);
  }
  return sum_descending(products);
}

Kernel phi_kernel(const SparseFunction& f) {
  const auto& g = f.group();
  std::unordered_map<Element, std::vector<double>, ElementHash> products;
  std::vector<Element> tinv;
  tinv.reserve(f.support_size());
  for (const auto& [t, v] : f.entries()) tinv.push_back(g.inv(t));
  auto es = f.entries();
  for (std::size_t i = 0; i < es.size(); ++i) {
    for (std::size_t j = 0; j < es.size(); ++j) {
      products[g.mul(tinv[i], es[j].first)].push_back(es[i].second * es[j].second);
    }
  }
  int radius = 0;
  for (const auto& [t, v] : es) radius = std::max(radius, g.length(t));

  std::vector<Entry> entries;
  entries.reserve(products.size());
  for (auto& [s, xs] : products) {
    if (g.length(s) > 2 * radius) {
      throw std::logic_error("supp Phi(f) escaped B(e, 2R)");
    }
    entries.emplace_back(s, sum_descending(xs));
  }
  return Kernel::make(g, std::move(entries), "Phi(f)");
}

Kernel phi_kernel(const SparseFunction& f, std::span<const Element> at) {
  std::vector<Entry> entries;
  entries.reserve(at.size());
  std::unordered_set<Element, ElementHash> seen;
  for (const auto& s : at) {
    f.group().validate(s);
    if (!seen.insert(s).second) continue;
    entries.emplace_back(s, phi(f, s));
  }
  return Kernel::make(f.group(), std::move(entries), "Phi(f)");
}

PsdReport gram_psd_check(const Kernel& k, std::span<const Element> set, double tol,
                         std::size_t cap) {
  if (set.size() > cap) {
    throw ResourceError("Gram matrix of size " + std::to_string(set.size()) +
                        " exceeds the cap of " + std::to_string(cap));
  }
  const auto& g = k.group();
  const std::size_t n = set.size();
  std::vector<Element> inverses;
  inverses.reserve(n);
  for (const auto& s : set) inverses.push_back(g.inv(s));

  Matrix gram(n, n);
  PsdReport report;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      gram(i, j) = k(g.mul(inverses[i], set[j]));
      report.scale = std::max(report.scale, std::abs(gram(i, j)));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      report.asymmetry = std::max(report.asymmetry, std::abs(gram(i, j) - gram(j, i)));
      const double mean = 0.5 * (gram(i, j) + gram(j, i));
      gram(i, j) = mean;
      gram(j, i) = mean;
    }
  }
  if (report.asymmetry > tol * report.scale) {
    throw ValidationError("Gram matrix is not symmetric (asymmetry " +
                          std::to_string(report.asymmetry) + ")");
  }
  if (n == 0 || report.scale == 0.0) return report;
  report.min_eigenvalue = detail::min_eigenvalue_symmetric(gram);
  report.psd = report.min_eigenvalue >= -tol * report.scale;
  return report;
}

double invariance_identity_residual(const SparseFunction& f, const Element& s) {
  const double norm = norm_p(f, 2.0);
  if (std::abs(norm - 1.0) > 1e-12) {
    throw ValidationError("invariance identity needs a unit-l2 function");
  }
  const auto& g = f.group();
  const Element s_inv = g.inv(s);
  std::vector<double> squares;
  squares.reserve(2 * f.support_size());
  for (const auto& [x, v] : f.entries()) {
    const double d = v - f(g.mul(x, s));
    if (d != 0.0) squares.push_back(d * d);
  }
  for (const auto& [y, v] : f.entries()) {
    if (!f.contains(g.mul(y, s_inv))) squares.push_back(v * v);
  }
  const double lhs = sum_descending(squares);
  const double rhs = 2.0 * (1.0 - phi(f, s));
  return std::abs(lhs - rhs);
}

Kernel sum_kernels(std::span<const Kernel> kernels) {
  if (kernels.empty()) throw ValidationError("sum_kernels needs at least one kernel");
  const Group& g = kernels.front().group();
  std::unordered_map<Element, std::vector<double>, ElementHash> values;
  std::string label;
  for (const auto& k : kernels) {
    if (!(k.group() == g)) throw ValidationError("kernels live on different groups");
    for (const auto& [s, v] : k.entries()) values[s].push_back(v);
    if (!label.empty()) label += " + ";
    label += k.label().empty() ? "kernel" : k.label();
  }
  std::vector<Entry> entries;
  entries.reserve(values.size());
  for (auto& [s, vs] : values) {
    // Signed values: plain left-to-right sum in input order.
    double total = 0.0;
    for (double v : vs) total += v;
    entries.emplace_back(s, total);
  }
  return Kernel::make(g, std::move(entries), label);
}

}  // namespace schurlab
