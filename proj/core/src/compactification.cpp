#include "schurlab/compactification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "schurlab/errors.hpp"

namespace schurlab {

namespace {

void check_exponent(double p) {
  if (!(p >= 1.0 && p < 2.0)) {
    throw ValidationError("profile exponent p must lie in [1, 2), got " + std::to_string(p));
  }
}

bool encodes_before(const SparseFunction& a, const SparseFunction& b) {
  return std::lexicographical_compare(a.entries().begin(), a.entries().end(),
                                      b.entries().begin(), b.entries().end());
}

}  // namespace

Recentred recentre(const SparseFunction& alpha) {
  const Group& g = alpha.group();
  if (alpha.empty()) return {alpha, g.identity()};

  const double top = alpha.max_value();
  std::vector<Element> peaks;
  for (const auto& [x, v] : alpha.entries()) {
    if (v == top) peaks.push_back(x);
  }

  std::vector<Element> candidates;
  if (g.kind() == GroupKind::ZD) {
    // Lexicographic order is translation invariant, so only min(A) qualifies.
    candidates.push_back(peaks.front());
  } else {
    const Element e = g.identity();
    for (const auto& x : peaks) {
      const Element x_inv = g.inv(x);
      const bool minimal = std::all_of(peaks.begin(), peaks.end(), [&](const Element& a) {
        return !(g.mul(x_inv, a) < e);
      });
      if (minimal) candidates.push_back(x);
    }
  }

  std::optional<Recentred> best;
  for (const auto& x : candidates) {
    SparseFunction moved = translate_left(g.inv(x), alpha);
    if (!best || encodes_before(moved, best->alpha)) best = Recentred{std::move(moved), x};
  }
  return std::move(*best);
}

Profile canonicalize(const SparseFunction& alpha, double p) {
  check_exponent(p);
  if (norm_p(alpha, p) > 1.0 + 1e-12) {
    throw ValidationError("profile must satisfy ||alpha||_p <= 1");
  }
  return Profile{recentre(alpha).alpha, p};
}

Xi::Xi(Group group, double p) : group_(std::move(group)), p_(p) { check_exponent(p); }

Xi Xi::make(Group group, double p, std::span<const SparseFunction> alphas) {
  Xi xi(std::move(group), p);
  std::vector<std::pair<double, Profile>> keyed;
  for (const auto& a : alphas) {
    if (!(a.group() == xi.group_)) throw ValidationError("profile lives on a different group");
    if (a.empty()) continue;
    Profile prof = canonicalize(a, p);
    const double mass = power_sum(prof.alpha, p);
    keyed.emplace_back(mass, std::move(prof));
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return encodes_before(a.second.alpha, b.second.alpha);
  });
  for (auto& [m, prof] : keyed) xi.profiles_.push_back(std::move(prof));
  if (xi.mass() > 1.0 + 1e-12) {
    throw ValidationError("profiles violate sum ||alpha_i||_p^p <= 1 (mass " +
                          std::to_string(xi.mass()) + ")");
  }
  return xi;
}

double Xi::mass() const {
  double total = 0.0;
  for (const auto& prof : profiles_) total += power_sum(prof.alpha, p_);
  return total;
}

bool operator==(const Xi& a, const Xi& b) {
  if (!(a.group_ == b.group_) || a.p_ != b.p_ || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a.profiles_[i].alpha == b.profiles_[i].alpha)) return false;
  }
  return true;
}

TestFamily TestFamily::standard(std::size_t length) {
  static constexpr double kValues[] = {1.0, 0.5, 0.25};
  TestFamily family;
  int radius = 0;
  while (family.members_.size() < length) {
    for (double value : kValues) {
      if (family.members_.size() == length) break;
      const auto r = static_cast<int>(family.members_.size()) + 1;
      family.members_.push_back({radius, value, std::ldexp(1.0, -r) / (1.0 + value)});
    }
    radius = radius == 0 ? 1 : 2 * radius;
  }
  return family;
}

double test_coefficient(const TestMember& member, const SparseFunction& alpha, double p) {
  const Group& g = alpha.group();
  const auto es = alpha.entries();
  std::vector<double> powered;
  std::vector<Element> inverses;
  powered.reserve(es.size());
  inverses.reserve(es.size());
  for (const auto& [x, v] : es) {
    powered.push_back(std::pow(v, p));
    inverses.push_back(g.inv(x));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < es.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < es.size(); ++j) {
      if (g.length(g.mul(inverses[i], es[j].first)) <= member.radius) row += powered[j];
    }
    total += powered[i] * row;
  }
  return member.value * total;
}

double metric_dp(const Xi& a, const Xi& b, const TestFamily& family, std::size_t depth) {
  if (a.p() != b.p()) throw ValidationError("D_p needs collections with the same exponent");
  if (!(a.group() == b.group())) throw ValidationError("collections live on different groups");
  if (depth > family.size()) throw ValidationError("depth exceeds the test family length");
  double total = 0.0;
  for (std::size_t r = 0; r < depth; ++r) {
    const auto& member = family.members()[r];
    double ca = 0.0;
    double cb = 0.0;
    for (const auto& prof : a.profiles()) ca += test_coefficient(member, prof.alpha, a.p());
    for (const auto& prof : b.profiles()) cb += test_coefficient(member, prof.alpha, b.p());
    total += member.weight * std::abs(ca - cb);
  }
  return total;
}

Extraction extract_profiles(const SparseFunction& f, double p, int sep_r, int ext_R, double eps,
                            std::size_t max_k) {
  if (sep_r < 1 || ext_R < sep_r) throw ValidationError("extraction needs ext_R >= sep_r >= 1");
  if (!(eps > 0.0)) throw ValidationError("extraction threshold eps must be positive");
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("exponent p must be finite and >= 1");
  Extraction out{{}, f};
  while (out.components.size() < max_k && !out.residual.empty()) {
    const Concentration q = concentration(out.residual, p, sep_r);
    if (q.value < eps) break;
    SparseFunction part = restrict_to_ball(out.residual, q.center, ext_R);
    out.residual = remove_ball(out.residual, q.center, ext_R);
    Element shift = recentre(part).shift;
    out.components.push_back({std::move(shift), q.center, std::move(part)});
  }
  return out;
}

SparseFunction sum_disjoint(const Group& g, std::span<const SparseFunction> parts, bool relaxed) {
  std::vector<Entry> entries;
  for (const auto& part : parts) {
    if (!(part.group() == g)) throw ValidationError("parts live on different groups");
    entries.insert(entries.end(), part.entries().begin(), part.entries().end());
  }
  return relaxed ? SparseFunction::make_relaxed(g, std::move(entries))
                 : SparseFunction::make(g, std::move(entries));
}

std::string to_string(ChainStatus s) {
  switch (s) {
    case ChainStatus::Accepted:
      return "accepted";
    case ChainStatus::Dissipated:
      return "dissipated";
    case ChainStatus::Unstable:
      return "unstable";
  }
  return "unknown";
}

namespace {

struct RankedComponent {
  Component component;
  double mass = 0.0;
  SparseFunction recentred;
};

std::vector<RankedComponent> ranked_components(const Extraction& ext, double p) {
  std::vector<RankedComponent> out;
  out.reserve(ext.components.size());
  for (const auto& c : ext.components) {
    const double mass = power_sum(c.part, p);
    SparseFunction canonical = recentre(c.part).alpha;
    out.push_back({c, mass, std::move(canonical)});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    return a.component.shift < b.component.shift;
  });
  return out;
}

Kernel negate(const Kernel& k) {
  std::vector<Entry> entries(k.entries().begin(), k.entries().end());
  for (auto& [s, v] : entries) v = -v;
  return Kernel::make(k.group(), std::move(entries), "-" + k.label());
}

}  // namespace

DecompositionReport decompose_sequence(std::span<const SparseFunction> fs, double p,
                                       const DecomposeParams& params) {
  check_exponent(p);
  const std::size_t n_total = fs.size();
  if (n_total < 2) throw ValidationError("decomposition needs a prefix of length N >= 2");
  const Group& g = fs.front().group();
  for (std::size_t n = 0; n < n_total; ++n) {
    if (!(fs[n].group() == g)) throw ValidationError("sequence mixes groups");
    if (!in_unit_ball(fs[n], p)) {
      throw ValidationError("f_" + std::to_string(n + 1) + " violates ||f||_p <= 1");
    }
  }

  DecompositionReport report;
  report.p = p;
  std::vector<std::vector<RankedComponent>> per_n(n_total);
  std::size_t chain_count = 0;
  for (std::size_t n = 0; n < n_total; ++n) {
    const double eps = params.eps ? *params.eps : params.eps_relative * power_sum(fs[n], p);
    report.eps_used.push_back(eps);
    // A zero f_n has nothing to extract; any positive threshold works.
    const double threshold = eps > 0.0 ? eps : 1.0;
    const Extraction ext =
        extract_profiles(fs[n], p, params.sep_r, params.ext_R, threshold, params.max_k);
    per_n[n] = ranked_components(ext, p);
    chain_count = std::max(chain_count, per_n[n].size());
  }

  const std::size_t late = n_total / 2;
  const std::size_t late_begin = n_total - late;
  std::vector<std::size_t> accepted;
  std::ostringstream diag;
  for (std::size_t i = 0; i < chain_count; ++i) {
    ChainSummary chain;
    chain.index = i;
    for (std::size_t n = 0; n < n_total; ++n) {
      if (i < per_n[n].size()) {
        chain.shifts.emplace_back(per_n[n][i].component.shift);
        chain.masses.push_back(per_n[n][i].mass);
      } else {
        chain.shifts.emplace_back(std::nullopt);
        chain.masses.push_back(0.0);
      }
    }
    auto present = [&](std::size_t n) { return i < per_n[n].size(); };
    bool all_present = true;
    bool vanished_for_good = true;
    bool seen_absent = false;
    for (std::size_t n = late_begin; n < n_total; ++n) {
      if (!present(n)) {
        all_present = false;
        seen_absent = true;
      } else if (seen_absent) {
        vanished_for_good = false;
      }
    }
    if (all_present) {
      for (std::size_t a = late_begin; a < n_total; ++a) {
        for (std::size_t b = a + 1; b < n_total; ++b) {
          chain.late_spread = std::max(
              chain.late_spread, distance_p(per_n[a][i].recentred, per_n[b][i].recentred, p));
        }
      }
      if (chain.late_spread <= params.tol_match) {
        chain.status = ChainStatus::Accepted;
        accepted.push_back(i);
      } else {
        chain.status = ChainStatus::Unstable;
        chain.reason = "recentred components are not Cauchy in l^p over the late window";
      }
    } else if (vanished_for_good) {
      chain.status = ChainStatus::Dissipated;
    } else {
      chain.status = ChainStatus::Unstable;
      chain.reason = "chain reappears after vanishing in the late window";
    }
    if (chain.status == ChainStatus::Unstable) {
      diag << "chain " << i << ": " << chain.reason << " (spread " << chain.late_spread
           << "); ";
    }
    report.chains.push_back(std::move(chain));
  }
  report.stable = std::none_of(report.chains.begin(), report.chains.end(), [](const auto& c) {
    return c.status == ChainStatus::Unstable;
  });
  report.diagnostics = diag.str();

  // Residuals w_n: everything outside the accepted chains.
  std::vector<SparseFunction> residuals;
  residuals.reserve(n_total);
  for (std::size_t n = 0; n < n_total; ++n) {
    std::vector<SparseFunction> parts;
    for (std::size_t i = 0; i < per_n[n].size(); ++i) {
      if (!std::binary_search(accepted.begin(), accepted.end(), i)) {
        parts.push_back(per_n[n][i].component.part);
      }
    }
    std::vector<Element> taken;
    for (const auto& rc : per_n[n]) {
      for (const auto& [x, v] : rc.component.part.entries()) taken.push_back(x);
    }
    std::unordered_set<Element, ElementHash> taken_set(taken.begin(), taken.end());
    std::vector<Entry> rest;
    for (const auto& [x, v] : fs[n].entries()) {
      if (!taken_set.contains(x)) rest.emplace_back(x, v);
    }
    parts.push_back(SparseFunction::make_relaxed(g, std::move(rest)));
    SparseFunction w = sum_disjoint(g, parts, true);
    report.residual_pp.push_back(power_sum(w, p));
    report.residual_inf.push_back(norm_p(w, kInfinity));
    residuals.push_back(std::move(w));
  }

  for (std::size_t a = 0; a < accepted.size(); ++a) {
    for (std::size_t b = a + 1; b < accepted.size(); ++b) {
      SeparationTrack track;
      track.i = accepted[a];
      track.j = accepted[b];
      track.late_minimum = -1;
      for (std::size_t n = 0; n < n_total; ++n) {
        if (track.j >= per_n[n].size()) continue;
        const int d = g.distance(per_n[n][track.i].component.shift,
                                 per_n[n][track.j].component.shift);
        if (!track.distances.empty()) {
          if (d < track.distances.back()) track.nondecreasing = false;
          if (d <= track.distances.back()) track.strictly_increasing = false;
        }
        track.indices.push_back(n);
        track.distances.push_back(d);
        if (n >= late_begin) {
          track.late_minimum = track.late_minimum < 0 ? d : std::min(track.late_minimum, d);
        }
      }
      report.separations.push_back(std::move(track));
    }
  }

  const std::size_t last = n_total - 1;
  const double tiny = 1e-15;
  report.residual_inf_final_ok =
      std::pow(report.residual_inf[last], p) <= report.eps_used[last] + tiny;

  if (!report.stable) return report;

  std::vector<SparseFunction> finals;
  for (std::size_t i : accepted) finals.push_back(per_n[last][i].recentred);
  Xi xi = Xi::make(g, p, finals);
  report.residual_mass_ok = report.residual_pp[last] <= 1.0 - xi.mass() + params.tol_match;

  double profile_l2 = 0.0;
  for (const auto& prof : xi.profiles()) profile_l2 += power_sum(prof.alpha, 2.0);
  report.orthogonality_residual = std::abs(phi(fs[last], g.identity()) - profile_l2 -
                                           power_sum(residuals[last], 2.0));

  const auto family = TestFamily::standard(std::max<std::size_t>(params.dp_depth, 1));
  for (std::size_t n = 0; n < n_total; ++n) {
    std::vector<SparseFunction> present;
    for (std::size_t i : accepted) {
      if (i < per_n[n].size()) present.push_back(per_n[n][i].recentred);
    }
    const Xi xi_n = Xi::make(g, p, present);
    const double d = metric_dp(xi_n, xi, family, params.dp_depth);
    if (!report.dp_trajectory.empty() && d > report.dp_trajectory.back() + tiny) {
      report.dp_nonincreasing = false;
    }
    report.dp_trajectory.push_back(d);
  }

  const Kernel parts[] = {phi_kernel(fs[last]), negate(xi_kernel(xi))};
  const Kernel psi = sum_kernels(parts);
  NormConvergence nc;
  nc.sup_gap = psi.sup_norm();
  nc.l1_gap = psi.l1_norm();
  nc.ladder = convolution_norm_ladder(psi, params.window_radii, params.max_window);
  report.norm_convergence = std::move(nc);
  report.xi = std::move(xi);
  return report;
}

Kernel xi_kernel(const Xi& xi) {
  std::vector<Kernel> ks;
  for (const auto& prof : xi.profiles()) ks.push_back(phi_kernel(prof.alpha));
  if (ks.empty()) return Kernel(xi.group(), "M_xi");
  Kernel sum = sum_kernels(ks);
  return Kernel::make(xi.group(), {sum.entries().begin(), sum.entries().end()}, "M_xi");
}

Kernel xi_kernel(const Xi& xi, std::span<const Element> at) {
  std::vector<Entry> entries;
  std::unordered_set<Element, ElementHash> seen;
  for (const auto& s : at) {
    xi.group().validate(s);
    if (!seen.insert(s).second) continue;
    double total = 0.0;
    for (const auto& prof : xi.profiles()) total += phi(prof.alpha, s);
    entries.emplace_back(s, total);
  }
  return Kernel::make(xi.group(), std::move(entries), "M_xi");
}

}  // namespace schurlab
