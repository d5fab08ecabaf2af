#include "schurlab/amenlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "schurlab/errors.hpp"
#include "schurlab/parallel.hpp"
#include "schurlab/rng.hpp"

namespace schurlab {

FolnerSet::FolnerSet(Group group, std::vector<Element> elements, int label)
    : group_(std::move(group)), label_(label) {
  for (const auto& x : elements) group_.validate(x);
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  if (elements.empty()) throw ValidationError("a Folner set must be nonempty");
  elements_ = std::move(elements);
}

bool FolnerSet::contains(const Element& x) const {
  return std::binary_search(elements_.begin(), elements_.end(), x);
}

int FolnerSet::radius() const {
  int r = 0;
  for (const auto& x : elements_) r = std::max(r, group_.length(x));
  return r;
}

FolnerSet folner_boxes(const Group& g, int n) {
  if (g.kind() != GroupKind::ZD) {
    throw ValidationError("Folner boxes are only available on Z^d; supply a set file instead");
  }
  if (n < 0) throw ValidationError("box half-width must be nonnegative");
  const int d = g.rank();
  std::vector<Element> box;
  std::vector<std::int32_t> x(d, -n);
  while (true) {
    box.push_back(g.coords(x));
    int k = d - 1;
    while (k >= 0 && x[k] == n) {
      x[k] = -n;
      --k;
    }
    if (k < 0) break;
    ++x[k];
  }
  return FolnerSet(g, std::move(box), n);
}

double folner_quality(const FolnerSet& f, const Element& s) {
  const Group& g = f.group();
  std::size_t hit = 0;
  for (const auto& x : f.elements()) {
    if (f.contains(g.mul(x, s))) ++hit;
  }
  // |F Delta F s| = 2 (|F| - |F cap F s|), and |F cap F s| = #{y in F : y s^{-1} in F}
  // equals #{x in F : x s in F} after the substitution y = x s.
  const auto n = static_cast<double>(f.size());
  return 2.0 * (n - static_cast<double>(hit)) / n;
}

FolnerPhi phi_folner_exact(const FolnerSet& f, double p, const Element& s) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("exponent p must be finite and >= 1");
  const Group& g = f.group();
  FolnerPhi out;
  for (const auto& x : f.elements()) {
    if (f.contains(g.mul(x, s))) ++out.intersection;
  }
  out.symmetric_difference = 2 * (f.size() - out.intersection);
  const auto n = static_cast<double>(f.size());
  const double scale = std::pow(n, -2.0 / p);
  out.value = static_cast<double>(out.intersection) * scale;
  out.two_term_form =
      std::pow(n, 1.0 - 2.0 / p) - 0.5 * static_cast<double>(out.symmetric_difference) * scale;
  if (std::abs(out.value - out.two_term_form) > 1e-12) {
    throw std::logic_error("closed forms of Phi on a normalized indicator disagree");
  }
  return out;
}

double d_F(const Kernel& k, std::span<const Element> set) {
  double worst = 0.0;
  for (const auto& s : set) worst = std::max(worst, std::abs(k(s) - 1.0));
  return worst;
}

namespace {

constexpr double kGolden = 0.6180339887498949;
constexpr int kGoldenSteps = 40;
constexpr double kAcceptGain = 1e-14;

// Coordinates of the search: values of profile k at point i of B(e, K).
struct Problem {
  Group group;
  double p = 1.0;
  std::size_t profiles = 1;
  std::vector<Element> points;
  std::vector<Element> set;
  std::vector<std::vector<int>> plus;   // plus[i][j]: index of x_i s_j, or -1
  std::vector<std::vector<int>> minus;  // minus[i][j]: index of x_i s_j^{-1}, or -1
  int identity_in_set = -1;
};

Problem make_problem(const Group& g, std::span<const Element> set, double p, int radius,
                     std::size_t profiles) {
  Problem pr{g, p, profiles, *g.ball_at_identity(radius), {set.begin(), set.end()}, {}, {}, -1};
  std::unordered_map<Element, int, ElementHash> index;
  for (std::size_t i = 0; i < pr.points.size(); ++i) index.emplace(pr.points[i], static_cast<int>(i));
  std::vector<Element> inverses;
  for (std::size_t j = 0; j < pr.set.size(); ++j) {
    inverses.push_back(g.inv(pr.set[j]));
    if (pr.set[j] == g.identity()) pr.identity_in_set = static_cast<int>(j);
  }
  auto lookup = [&](const Element& x) {
    auto it = index.find(x);
    return it == index.end() ? -1 : it->second;
  };
  pr.plus.assign(pr.points.size(), std::vector<int>(pr.set.size(), -1));
  pr.minus.assign(pr.points.size(), std::vector<int>(pr.set.size(), -1));
  for (std::size_t i = 0; i < pr.points.size(); ++i) {
    for (std::size_t j = 0; j < pr.set.size(); ++j) {
      pr.plus[i][j] = lookup(g.mul(pr.points[i], pr.set[j]));
      pr.minus[i][j] = lookup(g.mul(pr.points[i], inverses[j]));
    }
  }
  return pr;
}

class Descent {
 public:
  Descent(const Problem& pr, std::vector<std::vector<double>> values)
      : pr_(pr), values_(std::move(values)) {
    project_start();
    refresh();
  }

  double objective() const { return objective_; }
  std::size_t evaluations() const { return evaluations_; }
  const std::vector<std::vector<double>>& values() const { return values_; }

  // One cyclic pass; returns the decrease of the objective.
  double sweep() {
    const double before = objective_;
    for (std::size_t k = 0; k < pr_.profiles; ++k) {
      for (std::size_t i = 0; i < pr_.points.size(); ++i) update(k, i);
    }
    refresh();
    return before - objective_;
  }

 private:
  double mass() const {
    double s = 0.0;
    for (const auto& vs : values_) {
      for (double v : vs) s += std::pow(v, pr_.p);
    }
    return s;
  }

  void project_start() {
    for (auto& vs : values_) {
      for (double& v : vs) v = std::clamp(v, 0.0, 1.0);
    }
    const double s = mass();
    if (s > 1.0) rescale(std::pow(s, -1.0 / pr_.p));
  }

  void rescale(double c) {
    for (auto& vs : values_) {
      for (double& v : vs) v *= c;
    }
  }

  void refresh() {
    const std::size_t nf = pr_.set.size();
    phis_.assign(pr_.profiles, std::vector<double>(nf, 0.0));
    for (std::size_t k = 0; k < pr_.profiles; ++k) {
      const auto& vs = values_[k];
      for (std::size_t i = 0; i < vs.size(); ++i) {
        if (vs[i] == 0.0) continue;
        for (std::size_t j = 0; j < nf; ++j) {
          const int t = pr_.plus[i][j];
          if (t >= 0) phis_[k][j] += vs[i] * vs[t];
        }
      }
    }
    mass_ = mass();
    totals_.assign(nf, 0.0);
    for (std::size_t k = 0; k < pr_.profiles; ++k) {
      for (std::size_t j = 0; j < nf; ++j) totals_[j] += phis_[k][j];
    }
    objective_ = score(totals_, 1.0);
  }

  static double score(const std::vector<double>& totals, double c2) {
    double worst = 0.0;
    for (double t : totals) worst = std::max(worst, std::abs(c2 * t - 1.0));
    return worst;
  }

  // Objective after setting coordinate (k, i) to u and projecting.
  double trial(std::size_t k, std::size_t i, double u, std::vector<double>& new_phi,
               double& new_mass) {
    ++evaluations_;
    const double v = values_[k][i];
    const double delta = u - v;
    const auto& vs = values_[k];
    const std::size_t nf = pr_.set.size();
    new_phi.resize(nf);
    double worst = 0.0;
    new_mass = mass_ - std::pow(v, pr_.p) + std::pow(u, pr_.p);
    const double c2 = new_mass > 1.0 ? std::pow(new_mass, -2.0 / pr_.p) : 1.0;
    for (std::size_t j = 0; j < nf; ++j) {
      const int a = pr_.plus[i][j];
      const int b = pr_.minus[i][j];
      double change = delta * ((a >= 0 ? vs[a] : 0.0) + (b >= 0 ? vs[b] : 0.0));
      if (static_cast<int>(j) == pr_.identity_in_set) change += delta * delta;
      new_phi[j] = phis_[k][j] + change;
      const double total = totals_[j] - phis_[k][j] + new_phi[j];
      worst = std::max(worst, std::abs(c2 * total - 1.0));
    }
    return worst;
  }

  void update(std::size_t k, std::size_t i) {
    std::vector<double> phi_buf;
    double mass_buf = 0.0;
    auto f = [&](double u) { return trial(k, i, u, phi_buf, mass_buf); };

    double lo = 0.0;
    double hi = 1.0;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int step = 0; step < kGoldenSteps; ++step) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kGolden * (hi - lo);
        f1 = f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kGolden * (hi - lo);
        f2 = f(x2);
      }
    }
    double best_u = values_[k][i];
    double best = objective_;
    for (double u : {0.5 * (lo + hi), 0.0, 1.0}) {
      const double val = f(u);
      if (val < best - kAcceptGain) {
        best = val;
        best_u = u;
      }
    }
    if (best_u == values_[k][i]) return;

    std::vector<double> new_phi;
    double new_mass = 0.0;
    const double val = trial(k, i, best_u, new_phi, new_mass);
    const std::size_t nf = pr_.set.size();
    values_[k][i] = best_u;
    for (std::size_t j = 0; j < nf; ++j) {
      totals_[j] += new_phi[j] - phis_[k][j];
      phis_[k][j] = new_phi[j];
    }
    mass_ = new_mass;
    if (new_mass > 1.0) {
      const double c = std::pow(new_mass, -1.0 / pr_.p);
      rescale(c);
      for (auto& row : phis_) {
        for (double& x : row) x *= c * c;
      }
      for (double& x : totals_) x *= c * c;
      mass_ = mass();
    }
    objective_ = val;
  }

  const Problem& pr_;
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<double>> phis_;
  std::vector<double> totals_;
  double mass_ = 0.0;
  double objective_ = 0.0;
  std::size_t evaluations_ = 0;
};

struct Start {
  std::string label;
  std::vector<std::vector<double>> values;
};

std::vector<double> indicator_on(const Problem& pr, std::span<const Element> set) {
  std::unordered_set<Element, ElementHash> members(set.begin(), set.end());
  std::vector<double> vs(pr.points.size(), 0.0);
  const double value = std::pow(static_cast<double>(members.size()), -1.0 / pr.p);
  for (std::size_t i = 0; i < pr.points.size(); ++i) {
    if (members.contains(pr.points[i])) vs[i] = value;
  }
  return vs;
}

std::vector<Start> make_starts(const Problem& pr, int radius, const DeltaSearch& search) {
  const std::size_t m = pr.points.size();
  auto single = [&](std::vector<double> first) {
    std::vector<std::vector<double>> values(pr.profiles, std::vector<double>(m, 0.0));
    values[0] = std::move(first);
    return values;
  };
  std::vector<Start> starts;
  starts.push_back({"witness:F", single(indicator_on(pr, pr.set))});
  for (int j = 0; j <= radius; ++j) {
    auto ball = pr.group.ball_at_identity(j);
    starts.push_back({"ball:" + std::to_string(j), single(indicator_on(pr, *ball))});
  }
  for (std::size_t r = 0; r < search.restarts; ++r) {
    CounterRng rng(stream_seed(search.seed, r));
    std::vector<std::vector<double>> values(pr.profiles, std::vector<double>(m, 0.0));
    for (auto& vs : values) {
      for (double& v : vs) v = rng.uniform();
    }
    starts.push_back({"random:" + std::to_string(r), std::move(values)});
  }
  return starts;
}

SparseFunction to_function(const Problem& pr, const std::vector<double>& vs) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i] > 0.0) entries.emplace_back(pr.points[i], std::min(vs[i], 1.0));
  }
  return SparseFunction::make(pr.group, std::move(entries));
}

int resolve_radius(const Group& g, std::span<const Element> set, const DeltaSearch& search) {
  int set_radius = 0;
  for (const auto& s : set) set_radius = std::max(set_radius, g.length(s));
  const int k = search.support_radius > 0 ? search.support_radius
                                          : std::max(2 * set_radius, set_radius + 2);
  if (k < set_radius) {
    throw ValidationError("support radius K = " + std::to_string(k) +
                          " is smaller than the radius of F (" + std::to_string(set_radius) + ")");
  }
  return k;
}

}  // namespace

DeltaResult minimize_delta(const Group& g, std::span<const Element> set, double p,
                           const DeltaSearch& search) {
  if (!(p >= 1.0 && p < 2.0)) throw ValidationError("delta needs p in [1, 2)");
  if (set.empty()) throw ValidationError("delta needs a nonempty set F");
  if (search.n_profiles == 0) throw ValidationError("delta needs at least one profile");
  for (const auto& s : set) g.validate(s);
  std::vector<Element> sorted(set.begin(), set.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  const int radius = resolve_radius(g, sorted, search);
  const Problem pr = make_problem(g, sorted, p, radius, search.n_profiles);
  const std::vector<Start> starts = make_starts(pr, radius, search);

  struct Outcome {
    double initial = 0.0;
    double final_value = 0.0;
    std::size_t sweeps = 0;
    std::size_t evaluations = 0;
    std::vector<std::vector<double>> values;
  };
  std::vector<Outcome> outcomes(starts.size());
  parallel_for(starts.size(), search.threads, [&](std::size_t s) {
    Descent d(pr, starts[s].values);
    Outcome& out = outcomes[s];
    out.initial = d.objective();
    for (std::size_t sweep = 0; sweep < search.max_sweeps; ++sweep) {
      ++out.sweeps;
      if (d.sweep() < 1e-13) break;
    }
    out.final_value = d.objective();
    out.evaluations = d.evaluations();
    out.values = d.values();
  });

  DeltaResult result{sorted, p, 0.0, 0.0, Xi(g, p), {}, 0.0, 0, false, {}, std::nullopt, {}};
  result.log.support_radius = radius;
  result.log.coordinates = pr.points.size() * pr.profiles;
  std::size_t best = 0;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    result.log.evaluations += outcomes[s].evaluations;
    result.log.starts.push_back(
        {starts[s].label, outcomes[s].initial, outcomes[s].final_value, outcomes[s].sweeps});
    if (outcomes[s].final_value < outcomes[best].final_value) best = s;
  }
  result.log.best_start = best;

  std::vector<SparseFunction> profiles;
  for (const auto& vs : outcomes[best].values) profiles.push_back(to_function(pr, vs));
  result.minimizer = Xi::make(g, p, profiles);

  const Kernel on_set = xi_kernel(result.minimizer, sorted);
  result.value = d_F(on_set, sorted);
  for (const auto& s : sorted) result.phi_on_set.push_back(on_set(s));
  const SparseFunction witness = normalized_indicator(g, sorted, p);
  result.witness_value = d_F(phi_kernel(witness, sorted), sorted);

  std::vector<Entry> psi_entries;
  for (const auto& s : sorted) psi_entries.emplace_back(s, 1.0 - on_set(s));
  const Kernel psi = Kernel::make(g, std::move(psi_entries), "(1 - phi_xi) 1_F");
  std::vector<int> radii;
  for (int r : search.window_radii) radii.push_back(r);
  result.window_ladder = convolution_norm_ladder(psi, radii, search.max_window);
  if (!result.window_ladder.empty()) {
    const auto& last = result.window_ladder.back();
    result.window_norm = last.norm;
    result.window_size = last.window_size;
    if (result.window_ladder.size() >= 2) {
      const double prev = result.window_ladder[result.window_ladder.size() - 2].norm;
      result.window_stabilized = std::abs(last.norm - prev) <= 1e-9 * std::max(1.0, last.norm);
    }
  }

  if (search.grid_oracle) {
    result.oracle = delta_grid_oracle(g, sorted, p, radius, search.oracle_max_support);
  }
  if (search.n_profiles > 1) {
    DeltaSearch single = search;
    single.n_profiles = 1;
    single.grid_oracle = false;
    result.log.single_profile_value = minimize_delta(g, sorted, p, single).value;
  }
  return result;
}

OracleResult delta_grid_oracle(const Group& g, std::span<const Element> set, double p,
                               int support_radius, std::size_t max_support) {
  constexpr int kLevels = 16;
  constexpr std::size_t kMaxEvaluations = 200'000'000;
  if (max_support == 0) throw ValidationError("oracle support size must be positive");
  std::vector<Element> fset(set.begin(), set.end());
  std::unordered_map<Element, int, ElementHash> set_index;
  for (std::size_t j = 0; j < fset.size(); ++j) set_index.emplace(fset[j], static_cast<int>(j));

  const Element e = g.identity();
  const auto ball = g.ball_at_identity(support_radius);
  std::vector<Element> above;
  for (const auto& x : *ball) {
    if (e < x) above.push_back(x);
  }

  double level_pow[kLevels];
  double level_val[kLevels];
  for (int l = 0; l < kLevels; ++l) {
    level_val[l] = static_cast<double>(l + 1) / kLevels;
    level_pow[l] = std::pow(level_val[l], p);
  }

  OracleResult out;
  out.value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> choice;  // indices into `above`
  std::vector<double> phis(fset.size());

  auto score_support = [&](const std::vector<Element>& pts) {
    const std::size_t k = pts.size();
    // pair_index[a * k + b]: index in F of pts[a]^{-1} pts[b], or -1.
    std::vector<int> pair_index(k * k, -1);
    std::vector<bool> hit(fset.size(), false);
    for (std::size_t a = 0; a < k; ++a) {
      const Element inv = g.inv(pts[a]);
      for (std::size_t b = 0; b < k; ++b) {
        auto it = set_index.find(g.mul(inv, pts[b]));
        if (it != set_index.end()) {
          pair_index[a * k + b] = it->second;
          hit[it->second] = true;
        }
      }
    }
    ++out.supports;
    // A point of F outside pts^{-1} pts keeps Phi = 0 there, objective 1.
    if (std::find(hit.begin(), hit.end(), false) != hit.end()) {
      if (1.0 < out.value) {
        out.value = 1.0;
        out.best.clear();
      }
      return;
    }
    std::vector<int> level(k, 0);
    while (true) {
      ++out.evaluations;
      double mass = 0.0;
      for (std::size_t a = 0; a < k; ++a) mass += level_pow[level[a]];
      const double c2 = mass > 1.0 ? std::pow(mass, -2.0 / p) : 1.0;
      std::fill(phis.begin(), phis.end(), 0.0);
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
          const int j = pair_index[a * k + b];
          if (j >= 0) phis[j] += level_val[level[a]] * level_val[level[b]];
        }
      }
      double worst = 0.0;
      for (double v : phis) worst = std::max(worst, std::abs(c2 * v - 1.0));
      if (worst < out.value) {
        out.value = worst;
        out.best.clear();
        for (std::size_t a = 0; a < k; ++a) out.best.emplace_back(pts[a], level_val[level[a]]);
      }
      std::size_t pos = 0;
      while (pos < k && level[pos] == kLevels - 1) level[pos++] = 0;
      if (pos == k) break;
      ++level[pos];
    }
    if (out.evaluations > kMaxEvaluations) {
      throw ResourceError("grid oracle exceeded its evaluation budget");
    }
  };

  // Subsets of `above` of size < max_support, each joined with e.
  std::vector<Element> pts;
  auto recurse = [&](auto&& self, std::size_t from) -> void {
    pts.clear();
    pts.push_back(e);
    for (std::size_t c : choice) pts.push_back(above[c]);
    score_support(pts);
    if (choice.size() + 1 == max_support) return;
    for (std::size_t next = from; next < above.size(); ++next) {
      choice.push_back(next);
      self(self, next + 1);
      choice.pop_back();
    }
  };
  recurse(recurse, 0);
  return out;
}

AmenabilityReport amenability_report(const Group& g, std::span<const FolnerSet> sets,
                                     std::span<const double> ps, const DeltaSearch& search) {
  if (sets.empty() || ps.empty()) throw ValidationError("amenability report needs nonempty ladders");
  AmenabilityReport report;
  report.floor = std::numeric_limits<double>::infinity();
  for (const auto& f : sets) {
    if (!(f.group() == g)) throw ValidationError("Folner set lives on a different group");
    bool nonincreasing = true;
    double previous = std::numeric_limits<double>::infinity();
    for (double p : ps) {
      AmenabilityRow row{f.label(), f.size(), p, minimize_delta(g, f.elements(), p, search)};
      if (row.result.value > previous + 1e-12) nonincreasing = false;
      previous = row.result.value;
      report.floor = std::min(report.floor, row.result.value);
      report.rows.push_back(std::move(row));
    }
    report.nonincreasing_in_p.push_back(nonincreasing);
  }
  return report;
}

}  // namespace schurlab
