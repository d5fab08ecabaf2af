#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "schurlab/posdef.hpp"
#include "schurlab/schur.hpp"

namespace schurlab {

/// An orbit-canonical representative alpha of a profile in M_p^{<=1}.
struct Profile {
  SparseFunction alpha;
  double p = 1.0;
};

struct Recentred {
  SparseFunction alpha;  // canonical representative
  Element shift;         // input = delta_shift * alpha
};

/// Canonical representative of the left-translation orbit of alpha.
///
/// Let A be the set of points where alpha attains its maximum. The candidate
/// centers are the x in A for which the identity is the smallest element of
/// x^{-1} A; among the recentred functions delta_{x^{-1}} * alpha the one
/// with the smallest encoding (entry list compared lexicographically) wins.
/// On Z^d this is the smallest maximizer. The zero function is its own
/// canonical form with shift e.
Recentred recentre(const SparseFunction& alpha);

/// Canonical profile; throws ValidationError when ||alpha||_p > 1.
Profile canonicalize(const SparseFunction& alpha, double p);

/// A finite collection of profiles with sum_i ||alpha_i||_p^p <= 1, sorted by
/// ||alpha_i||_p nonincreasing. Zero profiles are dropped; the empty
/// collection is the orbit of zero.
class Xi {
 public:
  Xi(Group group, double p);

  /// Canonicalizes, drops zeros, sorts, validates.
  static Xi make(Group group, double p, std::span<const SparseFunction> alphas);

  const Group& group() const noexcept { return group_; }
  double p() const noexcept { return p_; }
  std::span<const Profile> profiles() const noexcept { return profiles_; }
  std::size_t size() const noexcept { return profiles_.size(); }
  bool empty() const noexcept { return profiles_.empty(); }
  /// sum_i ||alpha_i||_p^p.
  double mass() const;

  friend bool operator==(const Xi& a, const Xi& b);

 private:
  Group group_;
  double p_;
  std::vector<Profile> profiles_;
};

/// Arity-2 test family: member r is f_r(x1, x2) = h_r(x1^{-1} x2) with
/// h_r = value * 1_{B(e, radius)}.
struct TestMember {
  int radius = 0;
  double value = 1.0;
  double weight = 0.0;  // 2^{-r} / (1 + ||h_r||_inf)
};

class TestFamily {
 public:
  /// Radii 0, 1, 2, 4, 8, ... in the outer loop and values 1, 1/2, 1/4 in the
  /// inner loop, `length` members in total.
  static TestFamily standard(std::size_t length = 30);

  std::span<const TestMember> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }

 private:
  std::vector<TestMember> members_;
};

/// c_r(alpha) = sum_{x,y} h_r(x^{-1} y) alpha(x)^p alpha(y)^p.
double test_coefficient(const TestMember& member, const SparseFunction& alpha, double p);

/// Truncated D_p over the first `depth` members; the neglected tail is at
/// most 2^{-depth}. Throws ValidationError when the exponents differ or
/// depth exceeds the family.
double metric_dp(const Xi& a, const Xi& b, const TestFamily& family, std::size_t depth);

struct Component {
  Element shift;       // canonical point of the component
  Element center;      // concentration argmax that triggered the capture
  SparseFunction part;
};

struct Extraction {
  std::vector<Component> components;
  SparseFunction residual;
};

/// Greedy single-function profile extraction: while the concentration at
/// radius sep_r is at least eps, capture f restricted to B(x*, ext_R) and
/// remove it. At most max_k components. Components are disjointly supported
/// and copy the values of f, so components plus residual rebuild f exactly.
Extraction extract_profiles(const SparseFunction& f, double p, int sep_r, int ext_R, double eps,
                            std::size_t max_k);

/// Pointwise sum of functions with pairwise disjoint supports.
SparseFunction sum_disjoint(const Group& g, std::span<const SparseFunction> parts, bool relaxed);

struct DecomposeParams {
  int sep_r = 2;
  int ext_R = 8;
  /// Absolute threshold; when unset the threshold at index n is
  /// eps_relative * ||f_n||_p^p.
  std::optional<double> eps;
  double eps_relative = 1e-3;
  std::size_t max_k = 16;
  double tol_match = 1e-9;
  std::size_t dp_depth = 24;
  std::vector<int> window_radii{2, 4, 8, 16};
  std::size_t max_window = 600;
};

enum class ChainStatus { Accepted, Dissipated, Unstable };

struct ChainSummary {
  std::size_t index = 0;
  ChainStatus status = ChainStatus::Unstable;
  std::vector<std::optional<Element>> shifts;  // per n, empty when absent
  std::vector<double> masses;                  // ||component||_p^p per n (0 when absent)
  double late_spread = 0.0;                    // max pairwise l^p distance in the late window
  std::string reason;
};

struct SeparationTrack {
  std::size_t i = 0;
  std::size_t j = 0;
  std::vector<std::size_t> indices;  // n where both chains are present
  std::vector<int> distances;
  int late_minimum = 0;
  bool nondecreasing = true;
  bool strictly_increasing = true;
};

struct NormConvergence {
  double sup_gap = 0.0;  // ||psi||_inf, a lower bound for ||M_psi||
  double l1_gap = 0.0;   // ||psi||_1, an upper bound for ||M_psi||
  std::vector<LadderStep> ladder;  // window norms of [psi(x y^{-1})]
};

struct DecompositionReport {
  bool stable = false;
  std::optional<Xi> xi;
  double p = 1.0;
  std::vector<double> eps_used;
  std::vector<ChainSummary> chains;
  std::vector<double> residual_pp;   // ||w_n||_p^p
  std::vector<double> residual_inf;  // ||w_n||_inf
  std::vector<SeparationTrack> separations;
  std::vector<double> dp_trajectory;  // D_p(Xi_n, Xi)
  bool dp_nonincreasing = true;
  bool residual_inf_final_ok = false;  // ||w_N||_inf^p <= eps_N
  bool residual_mass_ok = false;       // ||w_N||_p^p <= 1 - mass(Xi) + tol_match
  double orthogonality_residual = 0.0;
  std::optional<NormConvergence> norm_convergence;
  std::string diagnostics;
};

/// Profile decomposition of a finite prefix f_1..f_N. Components at each n
/// are ranked by mass (ties by shift order); chain i collects the i-th
/// component across n. Over the last floor(N/2) indices a chain is accepted
/// when present throughout with recentred components within tol_match in
/// l^p; it is dissipated when it disappears and never returns; anything
/// else makes the decomposition unstable.
DecompositionReport decompose_sequence(std::span<const SparseFunction> fs, double p,
                                       const DecomposeParams& params = {});

/// sum_i Phi(alpha_i), on the full support or restricted to `at`.
Kernel xi_kernel(const Xi& xi);
Kernel xi_kernel(const Xi& xi, std::span<const Element> at);

std::string to_string(ChainStatus s);

}  // namespace schurlab
