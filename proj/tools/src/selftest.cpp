#include "selftest.hpp"

#include <cmath>
#include <sstream>

#include "schurlab/schurlab.hpp"

namespace schurlab::cli {

namespace {

SparseFunction random_function(const Group& g, CounterRng& rng, int radius, std::size_t max_size) {
  const auto ball = g.ball_at_identity(radius);
  const std::size_t n = 1 + rng.below(max_size);
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < n; ++i) {
    const Element& x = (*ball)[rng.below(ball->size())];
    if (std::ranges::any_of(entries, [&](const Entry& e) { return e.first == x; })) continue;
    entries.emplace_back(x, rng.uniform(0.05, 1.0));
  }
  return SparseFunction::make(g, std::move(entries));
}

SparseFunction unit_l2(const SparseFunction& f) {
  const double n = norm_p(f, 2.0);
  std::vector<Entry> entries;
  for (const auto& [x, v] : f.entries()) entries.emplace_back(x, v / n);
  return SparseFunction::make(f.group(), std::move(entries));
}

template <class Fn>
CheckResult guarded(std::string name, Fn&& fn) {
  CheckResult r{std::move(name), false, {}};
  try {
    r.passed = fn(r.detail);
  } catch (const std::exception& e) {
    r.detail = std::string("threw: ") + e.what();
  }
  return r;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

}  // namespace

std::vector<CheckResult> run_selftest(unsigned long long seed, unsigned threads) {
  std::vector<CheckResult> out;
  const Group z1 = Group::zd(1);
  const Group z2 = Group::zd(2);
  const Group f2 = Group::free(2);

  out.push_back(guarded("phi-identities", [&](std::string& d) {
    CounterRng rng(stream_seed(seed, 1));
    double worst = 0.0;
    bool invariant = true;
    for (int i = 0; i < 100; ++i) {
      const auto f = random_function(z2, rng, 3, 12);
      const double n2 = power_sum(f, 2.0);
      worst = std::max(worst, std::abs(phi(f, z2.identity()) - n2));
      const auto k = phi_kernel(f);
      for (const auto& [s, v] : k.entries()) worst = std::max(worst, std::abs(v) - n2);
      const auto shifted = translate_left(z2.coords({2, -1}), f);
      invariant = invariant && phi_kernel(shifted) == k;
    }
    d = "max deviation " + fmt(worst);
    return worst <= 1e-12 && invariant;
  }));

  out.push_back(guarded("gram-psd", [&](std::string& d) {
    CounterRng rng(stream_seed(seed, 2));
    double worst = kInfinity;
    bool ok = true;
    for (int i = 0; i < 20; ++i) {
      const Group& g = i % 2 ? f2 : z1;
      const auto f = random_function(g, rng, 3, 8);
      const auto set = *g.ball_at_identity(2);
      const auto r = gram_psd_check(phi_kernel(f), set);
      ok = ok && r.psd;
      worst = std::min(worst, r.min_eigenvalue / std::max(r.scale, 1e-300));
    }
    d = "min relative eigenvalue " + fmt(worst);
    return ok;
  }));

  out.push_back(guarded("equality-identity", [&](std::string& d) {
    CounterRng rng(stream_seed(seed, 3));
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const auto f = unit_l2(random_function(z2, rng, 3, 10));
      for (const auto& s : *z2.ball_at_identity(2)) {
        worst = std::max(worst, invariance_identity_residual(f, s));
      }
    }
    d = "max residual " + fmt(worst);
    return worst <= 1e-10;
  }));

  out.push_back(guarded("folner-law", [&](std::string& d) {
    double worst = 0.0;
    for (int n : {5, 10}) {
      const auto box = folner_boxes(z1, n);
      const auto f = normalized_indicator(z1, box.elements(), 2.0);
      const double m = 2.0 * n + 1.0;
      for (int s = -2 * n; s <= 2 * n; ++s) {
        worst = std::max(worst, std::abs(phi(f, z1.coords({s})) - (1.0 - std::abs(s) / m)));
      }
    }
    d = "max deviation " + fmt(worst);
    return worst <= 1e-12;
  }));

  out.push_back(guarded("two-bump-decomposition", [&](std::string& d) {
    const double p = 1.5;
    const double c = std::pow(2.0, -1.0 / p);
    std::vector<SparseFunction> fs;
    for (int n = 1; n <= 12; ++n) {
      fs.push_back(SparseFunction::make(z1, {{z1.coords({-n}), c}, {z1.coords({n}), c}}));
    }
    const auto r = decompose_sequence(fs, p);
    const bool ok = r.stable && r.xi && r.xi->profiles().size() == 2 &&
                    r.residual_pp.back() <= 1e-9 && !r.separations.empty() &&
                    r.separations.front().strictly_increasing;
    d = ok ? "two profiles" : r.diagnostics;
    return ok;
  }));

  out.push_back(guarded("extraction-bookkeeping", [&](std::string& d) {
    CounterRng rng(stream_seed(seed, 6));
    int bad = 0;
    for (int i = 0; i < 50; ++i) {
      const auto f = random_function(z1, rng, 20, 15);
      const auto ex = extract_profiles(f, 1.5, 2, 3, 1e-3 * power_sum(f, 1.5), 16);
      std::vector<SparseFunction> parts;
      for (const auto& comp : ex.components) parts.push_back(comp.part);
      parts.push_back(ex.residual);
      if (!(sum_disjoint(z1, parts, false) == f)) ++bad;
    }
    d = std::to_string(bad) + " mismatches";
    return bad == 0;
  }));

  out.push_back(guarded("schur-bounds", [&](std::string& d) {
    const auto window = Window::ball(z1, 4);
    const std::vector<Element> tube = *z1.ball_at_identity(2);
    double worst = kInfinity;
    for (std::uint64_t i = 0; i < 50; ++i) {
      const auto t = random_operator(window, stream_seed(seed ^ 7, i), std::span(tube));
      const double n = op_norm(t).value;
      worst = std::min({worst, fin_prop_bound(t, tube) - n, schur_test_bound(t).bound - n});
    }
    d = "min slack " + fmt(worst);
    return worst >= -1e-9;
  }));

  out.push_back(guarded("cp-norm", [&](std::string& d) {
    CounterRng rng(stream_seed(seed, 8));
    const auto window = Window::ball(z1, 5);
    std::size_t violations = 0;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 10; ++i) {
      const auto f = random_function(z1, rng, 3, 6);
      const auto r = cp_norm_check(phi_kernel(f), window, 5, stream_seed(seed, 100 + i), threads);
      violations += r.upper_violations;
      worst = std::max(worst, std::abs(r.witness_ratio - power_sum(f, 2.0)));
    }
    d = std::to_string(violations) + " violations, witness gap " + fmt(worst);
    return violations == 0 && worst <= 1e-12;
  }));

  out.push_back(guarded("delta-ladder", [&](std::string& d) {
    const std::vector<Element> set = *z1.ball_at_identity(1);
    DeltaSearch search;
    search.support_radius = 4;
    search.restarts = 2;
    search.seed = seed;
    search.threads = threads;
    double prev = kInfinity;
    bool ok = true;
    for (double p : {1.2, 1.8}) {
      const auto r = minimize_delta(z1, set, p, search);
      ok = ok && r.value < prev && r.value <= r.witness_value + 1e-12;
      d += (d.empty() ? "" : ", ") + fmt(r.value);
      prev = r.value;
    }
    return ok;
  }));

  out.push_back(guarded("tiling-exact-law", [&](std::string& d) {
    const auto m = PercModel::tiling(z1, 4);
    const std::vector<Element> pts = {z1.coords({0}), z1.coords({1}), z1.coords({2})};
    const auto est = phi_perc_estimates(m, 1.5, pts, 20'000, seed, threads);
    double worst = 0.0;
    for (const auto& e : est) {
      const double z = e.std_error > 0 ? std::abs(e.mean - *e.exact) / e.std_error
                                       : (std::abs(e.mean - *e.exact) <= 1e-12 ? 0.0 : kInfinity);
      worst = std::max(worst, z);
    }
    d = "max z " + fmt(worst);
    return worst <= 4.0;
  }));

  out.push_back(guarded("doubling-schedule", [&](std::string& d) {
    double prev = -1.0;
    bool rising = true;
    for (const auto& step : doubling_schedule(z1, 2, 10)) {
      const double v = *phi_perc_exact(step.model, step.p, z1.coords({1}));
      rising = rising && v > prev;
      prev = v;
    }
    d = "phi_10(1) = " + fmt(prev);
    return rising && prev >= 0.85;
  }));

  out.push_back(guarded("mass-transport", [&](std::string& d) {
    const auto r = mtp_check(PercModel::tiling(z1, 3), z1.coords({1}), 20'000, seed, threads);
    d = "z " + fmt(r.z_score);
    return r.z_score <= 4.0;
  }));

  return out;
}

}  // namespace schurlab::cli
