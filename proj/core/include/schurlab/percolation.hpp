#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "schurlab/group.hpp"
#include "schurlab/posdef.hpp"

namespace schurlab {

enum class PercKind { ShiftedTiling, BernoulliSite };

/// An invariant site percolation on the right Cayley graph (x ~ x s).
///
/// ShiftedTiling (Z^d only): Z^d is cut into the boxes u + L k + [0, L)^d
/// for a uniform offset u in [0, L)^d; every site is open and the clusters
/// are the boxes. BernoulliSite: each site is open independently with
/// probability q; site states are a hash of (seed, element), so they do not
/// depend on the order in which the BFS discovers them.
class PercModel {
 public:
  static constexpr std::size_t kDefaultCap = 100'000;

  static PercModel tiling(Group g, int side);
  static PercModel bernoulli(Group g, double q, std::size_t cap = kDefaultCap);
  /// "tiling:L=4" or "bernoulli:q=0.4" (optionally ":cap=N").
  static PercModel parse(Group g, std::string_view spec);

  PercKind kind() const noexcept { return kind_; }
  const Group& group() const noexcept { return group_; }
  int side() const noexcept { return side_; }
  double q() const noexcept { return q_; }
  std::size_t cap() const noexcept { return cap_; }
  std::string spec() const;

 private:
  PercModel(PercKind kind, Group g, int side, double q, std::size_t cap);

  PercKind kind_;
  Group group_;
  int side_;
  double q_;
  std::size_t cap_;
};

struct ClusterSample {
  bool open = false;              // o in omega
  std::vector<Element> vertices;  // K(o) in element order; empty when o is closed
  bool truncated = false;         // BFS stopped at the cap
  std::vector<std::int32_t> offset;  // tiling offset u (empty for Bernoulli)
  std::vector<std::int32_t> corner;  // tiling: K(o) = corner + [0, side)^d
  int side = 0;
};

/// One configuration drawn from `seed`, explored from the identity.
ClusterSample sample_cluster(const PercModel& m, std::uint64_t seed);

/// Whether site x is open in the Bernoulli configuration of `seed`.
bool bernoulli_open(const PercModel& m, std::uint64_t seed, const Element& x);

/// Phi(|K|^{-1/p} 1_K)(s) = |K cap K s^{-1}| |K|^{-2/p}; 0 for empty K.
/// Throws ValidationError on truncated samples or p outside [1, 2].
double phi_cluster(const ClusterSample& sample, const Group& g, double p, const Element& s);

/// Closed form for the shifted tiling: prod_i (L - |s_i|)_+ L^{-2/p}.
std::optional<double> phi_perc_exact(const PercModel& m, double p, const Element& s);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::optional<double> exact;
  std::size_t samples = 0;
  std::size_t truncated = 0;
  std::uint64_t seed = 0;
};

inline constexpr double kMaxTruncatedFraction = 0.01;

/// Monte-Carlo estimate of E[Phi(...)(s)] for every s in `points`. Sample i
/// uses stream_seed(seed, i); truncated samples are excluded from the mean,
/// and more than 1% of them aborts with StatisticalGuardError.
std::vector<Estimate> phi_perc_estimates(const PercModel& m, double p,
                                         std::span<const Element> points, std::size_t n,
                                         std::uint64_t seed, unsigned threads = 1);
Estimate phi_perc_estimate(const PercModel& m, double p, const Element& s, std::size_t n,
                           std::uint64_t seed, unsigned threads = 1);

struct MtpReport {
  Estimate lhs;  // E[|K \ K s^{-1}| / |K|] = E[sum_x m(x, o, omega)]
  Estimate rhs;  // P[o in omega, o s not in K(o)] = E[sum_y m(o, y, omega)]
  double difference = 0.0;
  double difference_std_error = 0.0;  // of the paired per-sample differences
  double z_score = 0.0;
};

/// Both sides of the mass-transport identity for the transport
/// m(x, y, omega) = 1{x in omega, x s not in K(x), y in K(x)} / |K(x)|.
/// z = |mean difference| / paired standard error (0 when both vanish).
MtpReport mtp_check(const PercModel& m, const Element& s, std::size_t n, std::uint64_t seed,
                    unsigned threads = 1);

struct ScheduleStep {
  PercModel model;
  double p = 2.0;
  int index = 0;
};

/// L_n = 2^n, with p_n solving |K|^{1 - 2/p_n} = 1 - 1/n for |K| = L_n^d,
/// for n = first..last (first >= 2).
std::vector<ScheduleStep> doubling_schedule(const Group& g, int first = 2, int last = 10);

struct ScheduleRow {
  int index = 0;
  std::string model;
  double p = 2.0;
  std::vector<Element> set;
  std::vector<Estimate> values;  // phi_n(s), s in set
  PsdReport psd;
  double psd_tolerance = 0.0;    // relative tolerance handed to gram_psd_check
  double max_deviation = 0.0;    // max_{s in F} |phi_n(s) - 1|
  bool bounded_by_one = true;    // phi_n(e) <= 1
};

struct ScheduleReport {
  std::vector<ScheduleRow> rows;
  /// Whether the identity column and every other column rises with n
  /// (exact values when available, else Monte-Carlo means).
  bool rising = true;
  /// Strong-convergence surrogate: pointwise deviation shrinks along the
  /// schedule and
  /// phi_n(e) <= 1 throughout.
  bool strong_convergence_surrogate = true;
};

ScheduleReport run_schedule(const Group& g, std::span<const ScheduleStep> schedule,
                              std::span<const Element> set, std::size_t n, std::uint64_t seed,
                              unsigned threads = 1);

/// Exact law of the tiling partition seen through a finite window: for every
/// offset, the pattern (for each window position, the first position in the
/// same box) with its probability. Used for exact invariance tests.
std::map<std::vector<std::size_t>, double> tiling_window_law(const PercModel& m,
                                                             std::span<const Element> window);

}  // namespace schurlab
