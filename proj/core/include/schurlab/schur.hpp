#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "schurlab/matrix.hpp"
#include "schurlab/posdef.hpp"

namespace schurlab {

/// A finite truncation domain W of the group, sorted in element order.
class Window {
 public:
  Window(Group group, std::vector<Element> elements);
  static std::shared_ptr<const Window> ball(const Group& g, int radius);

  const Group& group() const noexcept { return group_; }
  std::span<const Element> elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }
  const Element& operator[](std::size_t i) const { return elements_[i]; }
  std::optional<std::size_t> index_of(const Element& x) const;

 private:
  Group group_;
  std::vector<Element> elements_;
  std::unordered_map<Element, std::size_t, ElementHash> index_;
};

/// The compression of an operator on l^2(Gamma) to a window:
/// entry (i, j) is T(x_i, x_j) = <delta_{x_i}, T delta_{x_j}>.
class WindowOperator {
 public:
  WindowOperator(std::shared_ptr<const Window> window, Matrix matrix);
  static WindowOperator zero(std::shared_ptr<const Window> window);
  static WindowOperator identity(std::shared_ptr<const Window> window);

  const Window& window() const noexcept { return *window_; }
  const std::shared_ptr<const Window>& window_ptr() const noexcept { return window_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t size() const noexcept { return matrix_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return matrix_(i, j); }

  /// max |T(x, y)|.
  double sup_norm() const noexcept;

  WindowOperator operator-(const WindowOperator& other) const;

 private:
  std::shared_ptr<const Window> window_;
  Matrix matrix_;
};

/// 1_{Tube(F)} on the window: entry 1 iff x y^{-1} in F.
WindowOperator tube_mask(std::shared_ptr<const Window> window, std::span<const Element> set);

/// M_k(T) = [k(x y^{-1}) T(x, y)].
WindowOperator schur_product(const Kernel& k, const WindowOperator& t);

/// [k(x y^{-1})] on the window, i.e. M_k applied to the all-ones matrix.
WindowOperator convolution_operator(const Kernel& k, std::shared_ptr<const Window> window);

struct NormResult {
  double value = 0.0;
  bool converged = true;
  std::size_t iterations = 0;
  std::string method;  // "svd" or "power"
};

inline constexpr std::size_t kSvdThreshold = 200;

/// Spectral norm. Below kSvdThreshold rows a full SVD; otherwise power
/// iteration on T^T T from the normalized all-ones vector, relative
/// tolerance 1e-10, at most 1e5 iterations (converged = false past the cap).
NormResult op_norm(const Matrix& m);
NormResult op_norm(const WindowOperator& t);
/// Power iteration regardless of size (exposed for testing and benchmarks).
NormResult op_norm_power(const Matrix& m, double rel_tol = 1e-10,
                         std::size_t max_iterations = 100'000);

/// Finite-propagation bound |F| ||T||_inf. Throws ValidationError when the
/// support of T leaves Tube(F) inside the window.
double fin_prop_bound(const WindowOperator& t, std::span<const Element> set);

struct SchurTestBound {
  double c1 = 0.0;  // max_x sum_z |T(x,z)| p(z) / p(x)
  double c2 = 0.0;  // max_y sum_z |T(z,y)| p(z) / p(y)
  double bound = 0.0;  // sqrt(c1 c2)
};

/// Weighted Schur test with weights aligned to the window order.
SchurTestBound schur_test_bound(const WindowOperator& t, std::span<const double> weights);
/// Weights p = 1.
SchurTestBound schur_test_bound(const WindowOperator& t);

struct L1MultiplierBound {
  double multiplied_norm = 0.0;  // ||M_f(T)||
  double base_norm = 0.0;        // ||T||
  double l1_norm = 0.0;          // ||f||_1
  double ratio = 0.0;            // ||M_f(T)|| / ||T|| (0 when T = 0)
  bool holds = true;             // ||M_f(T)|| <= ||f||_1 ||T|| + 1e-9
};

/// The l^1 bound for the multiplier with kernel k_f(x, y) = f(x y^{-1}).
L1MultiplierBound l1_multiplier_bound(const SparseFunction& f, const WindowOperator& t);

struct CpNormReport {
  std::size_t trials = 0;
  std::size_t upper_violations = 0;  // trials with ||M_k(T)|| > k(e) ||T|| + 1e-8
  double max_ratio = 0.0;            // max ||M_k(T)|| / ||T|| over trials
  double witness_ratio = 0.0;        // ||M_k(I)|| / ||I||
  double kernel_at_identity = 0.0;
};

/// Random operator on the window with entries uniform in [-1, 1], drawn from
/// the given stream seed. With `tube`, entries outside Tube(tube) are zero.
WindowOperator random_operator(std::shared_ptr<const Window> window, std::uint64_t seed,
                               std::optional<std::span<const Element>> tube = std::nullopt);

/// Norm check for a positive-definite kernel: ||M_k|| = k(e). Trial i uses
/// stream_seed(seed, i). Throws ValidationError when k fails gram_psd_check
/// on the window.
CpNormReport cp_norm_check(const Kernel& k, std::shared_ptr<const Window> window,
                           std::size_t trials, std::uint64_t seed, unsigned threads = 1);

/// r_F at kernel level: k on F, zero elsewhere.
Kernel cutoff(const Kernel& k, std::span<const Element> set);

struct LadderStep {
  int radius = 0;
  std::size_t window_size = 0;
  double norm = 0.0;
};

/// op_norm of [k(x y^{-1})]_{x,y in B(e,r)} along a ladder of radii; stops
/// early once a window would exceed `max_window` elements.
std::vector<LadderStep> convolution_norm_ladder(const Kernel& k, std::span<const int> radii,
                                                std::size_t max_window = 600);

}  // namespace schurlab
