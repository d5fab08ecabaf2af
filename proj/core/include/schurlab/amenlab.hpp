#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "schurlab/compactification.hpp"
#include "schurlab/posdef.hpp"
#include "schurlab/schur.hpp"

namespace schurlab {

/// A finite nonempty set F_n, stored in element order without duplicates.
class FolnerSet {
 public:
  FolnerSet(Group group, std::vector<Element> elements, int label = 0);

  const Group& group() const noexcept { return group_; }
  std::span<const Element> elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }
  int label() const noexcept { return label_; }
  bool contains(const Element& x) const;
  /// max |x| over the set.
  int radius() const;

 private:
  Group group_;
  std::vector<Element> elements_;
  int label_;
};

/// The box [-n, n]^d in Z^d. Throws ValidationError on other groups.
FolnerSet folner_boxes(const Group& g, int n);

/// |F Delta F s| / |F|.
double folner_quality(const FolnerSet& f, const Element& s);

struct FolnerPhi {
  double value = 0.0;           // Phi(|F|^{-1/p} 1_F)(s) = |F cap F s^{-1}| / |F|^{2/p}
  double two_term_form = 0.0;   // |F|^{1-2/p} - |F Delta F s^{-1}| / (2 |F|^{2/p})
  std::size_t intersection = 0;
  std::size_t symmetric_difference = 0;
};

/// Closed form of Phi on the normalized indicator of F. Throws
/// std::logic_error if the two forms disagree by more than 1e-12.
FolnerPhi phi_folner_exact(const FolnerSet& f, double p, const Element& s);

/// d_F(k, 1) = max_{s in F} |k(s) - 1|; 0 for empty F.
double d_F(const Kernel& k, std::span<const Element> set);

struct DeltaSearch {
  /// Profiles live on B(e, K); 0 selects max(2 radius(F), radius(F) + 2).
  int support_radius = 0;
  std::size_t n_profiles = 1;
  std::size_t restarts = 8;
  std::uint64_t seed = 0;
  bool grid_oracle = false;
  std::size_t oracle_max_support = 4;
  std::size_t max_sweeps = 200;
  unsigned threads = 1;
  std::vector<int> window_radii{2, 4, 8, 16};
  std::size_t max_window = 600;
};

struct StartRecord {
  std::string label;
  double initial = 0.0;
  double final_value = 0.0;
  std::size_t sweeps = 0;
};

struct SearchLog {
  std::size_t evaluations = 0;
  std::vector<StartRecord> starts;
  std::size_t best_start = 0;
  int support_radius = 0;
  std::size_t coordinates = 0;
  /// Present when n_profiles > 1: the best single-profile value found with
  /// the same budget, logged next to the multi-profile value.
  std::optional<double> single_profile_value;
};

struct OracleResult {
  double value = 0.0;
  std::size_t supports = 0;
  std::size_t evaluations = 0;
  std::vector<Entry> best;  // unprojected grid point
};

struct DeltaResult {
  std::vector<Element> set;
  double p = 1.0;
  double value = 0.0;           // d_F(sum_i Phi(alpha_i), 1) at the minimizer
  double witness_value = 0.0;   // the same objective at |F|^{-1/p} 1_F
  Xi minimizer;
  std::vector<double> phi_on_set;  // sum_i Phi(alpha_i)(s), s in F
  double window_norm = 0.0;        // ||[psi(x y^{-1})]_{x,y in W}||, psi = (1 - phi_xi) 1_F
  std::size_t window_size = 0;
  bool window_stabilized = false;
  std::vector<LadderStep> window_ladder;
  std::optional<OracleResult> oracle;
  SearchLog log;
};

/// Surrogate for delta^{(F,p)}: minimizes d_F(sum_i Phi(alpha_i), 1) over
/// collections supported in B(e, K) with 0 <= alpha <= 1 and
/// sum_i ||alpha_i||_p^p <= 1.
///
/// Projected coordinate descent: cyclic over the coordinates, golden-section
/// search on [0, 1] per coordinate, every trial point projected (clamp, then
/// rescale onto the constraint ball), only improvements accepted. Starts are
/// the normalized indicators of F and of B(e, j), j <= K, plus `restarts`
/// random points drawn from stream_seed(seed, i).
DeltaResult minimize_delta(const Group& g, std::span<const Element> set, double p,
                           const DeltaSearch& search = {});

/// Brute-force competitor: supports S of size <= max_support inside B(e, K)
/// with e = min S, values in {1/16, ..., 16/16}, each point projected onto
/// the constraint ball and scored with an independent pair-sum evaluator.
OracleResult delta_grid_oracle(const Group& g, std::span<const Element> set, double p,
                               int support_radius, std::size_t max_support = 4);

struct AmenabilityRow {
  int set_label = 0;
  std::size_t set_size = 0;
  double p = 1.0;
  DeltaResult result;
};

struct AmenabilityReport {
  std::vector<AmenabilityRow> rows;  // sets outer, exponents inner
  /// Per set, whether the value is nonincreasing along the p ladder.
  std::vector<bool> nonincreasing_in_p;
  double floor = 0.0;  // smallest value in the table
};

AmenabilityReport amenability_report(const Group& g, std::span<const FolnerSet> sets,
                                     std::span<const double> ps, const DeltaSearch& search = {});

}  // namespace schurlab
