#include "schurlab/percolation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_set>

#include "schurlab/errors.hpp"
#include "schurlab/parallel.hpp"
#include "schurlab/rng.hpp"

namespace schurlab {

PercModel::PercModel(PercKind kind, Group g, int side, double q, std::size_t cap)
    : kind_(kind), group_(std::move(g)), side_(side), q_(q), cap_(cap) {}

PercModel PercModel::tiling(Group g, int side) {
  if (g.kind() != GroupKind::ZD) throw ValidationError("shifted tilings exist only on Z^d here");
  if (side < 1) throw ValidationError("tiling side L must be >= 1");
  return PercModel(PercKind::ShiftedTiling, std::move(g), side, 1.0, 0);
}

PercModel PercModel::bernoulli(Group g, double q, std::size_t cap) {
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("Bernoulli parameter q must lie in [0, 1]");
  if (cap == 0) throw ValidationError("cluster cap must be positive");
  return PercModel(PercKind::BernoulliSite, std::move(g), 0, q, cap);
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view text, std::string_view what) {
  try {
    std::size_t used = 0;
    const std::string owned(text);
    const double v = std::stod(owned, &used);
    if (used != owned.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
}

long long parse_integer(std::string_view text, std::string_view what) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

PercModel PercModel::parse(Group g, std::string_view spec) {
  const auto parts = split(spec, ':');
  const std::string_view kind = parts.front();
  std::optional<long long> side;
  std::optional<double> q;
  std::size_t cap = kDefaultCap;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("model option '" + std::string(parts[i]) + "' is not key=value");
    }
    const auto key = parts[i].substr(0, eq);
    const auto value = parts[i].substr(eq + 1);
    if (key == "L") {
      side = parse_integer(value, "L");
    } else if (key == "q") {
      q = parse_double(value, "q");
    } else if (key == "cap") {
      const long long c = parse_integer(value, "cap");
      if (c <= 0) throw ValidationError("cluster cap must be positive");
      cap = static_cast<std::size_t>(c);
    } else {
      throw ValidationError("unknown model option '" + std::string(key) + "'");
    }
  }
  if (kind == "tiling") {
    if (!side) throw ValidationError("tiling model needs L=<side>");
    return tiling(std::move(g), static_cast<int>(*side));
  }
  if (kind == "bernoulli") {
    if (!q) throw ValidationError("bernoulli model needs q=<probability>");
    return bernoulli(std::move(g), *q, cap);
  }
  throw ValidationError("unknown percolation model '" + std::string(kind) + "'");
}

std::string PercModel::spec() const {
  if (kind_ == PercKind::ShiftedTiling) return "tiling:L=" + std::to_string(side_);
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, q_);
  return "bernoulli:q=" + std::string(buf, res.ptr) + ":cap=" + std::to_string(cap_);
}

bool bernoulli_open(const PercModel& m, std::uint64_t seed, const Element& x) {
  std::uint64_t h = mix64(seed ^ (0x5be0cd19137e2179ULL + static_cast<std::uint64_t>(x.kind())));
  h = mix64(h ^ static_cast<std::uint64_t>(x.size()));
  for (std::int32_t c : x.data()) h = mix64(h ^ static_cast<std::uint32_t>(c));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return u < m.q();
}

ClusterSample sample_cluster(const PercModel& m, std::uint64_t seed) {
  const Group& g = m.group();
  ClusterSample out;
  if (m.kind() == PercKind::ShiftedTiling) {
    const int d = g.rank();
    const int side = m.side();
    CounterRng rng(seed);
    std::vector<std::int32_t> corner(d);
    out.offset.resize(d);
    for (int i = 0; i < d; ++i) {
      out.offset[i] = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(side)));
      corner[i] = out.offset[i] == 0 ? 0 : out.offset[i] - side;
    }
    out.open = true;
    out.corner = corner;
    out.side = side;
    std::vector<std::int32_t> x = corner;
    while (true) {
      out.vertices.push_back(g.coords(x));
      int k = d - 1;
      while (k >= 0 && x[k] == corner[k] + side - 1) {
        x[k] = corner[k];
        --k;
      }
      if (k < 0) break;
      ++x[k];
    }
    return out;
  }

  const Element o = g.identity();
  if (!bernoulli_open(m, seed, o)) return out;
  out.open = true;
  std::unordered_set<Element, ElementHash> seen{o};
  std::deque<Element> queue{o};
  while (!queue.empty()) {
    Element x = std::move(queue.front());
    queue.pop_front();
    out.vertices.push_back(x);
    if (out.vertices.size() > m.cap()) {
      out.truncated = true;
      break;
    }
    for (const auto& s : g.generators()) {
      Element y = g.mul(x, s);
      if (seen.contains(y)) continue;
      seen.insert(y);
      if (bernoulli_open(m, seed, y)) queue.push_back(std::move(y));
    }
  }
  std::sort(out.vertices.begin(), out.vertices.end());
  return out;
}

double phi_cluster(const ClusterSample& sample, const Group& g, double p, const Element& s) {
  if (!(p >= 1.0 && p <= 2.0)) throw ValidationError("phi_cluster needs p in [1, 2]");
  if (sample.truncated) throw ValidationError("truncated cluster sample cannot be evaluated");
  if (sample.vertices.empty()) return 0.0;
  std::size_t hit = 0;
  if (sample.side > 0) {
    // A box meets its translate by s^{-1} in prod_i (L - |s_i|)_+ points.
    g.validate(s);
    hit = 1;
    for (std::int32_t c : s.data()) hit *= static_cast<std::size_t>(std::max(0, sample.side - std::abs(c)));
  } else {
    for (const auto& x : sample.vertices) {
      if (std::binary_search(sample.vertices.begin(), sample.vertices.end(), g.mul(x, s))) ++hit;
    }
  }
  const auto size = static_cast<double>(sample.vertices.size());
  return static_cast<double>(hit) * std::pow(size, -2.0 / p);
}

std::optional<double> phi_perc_exact(const PercModel& m, double p, const Element& s) {
  if (m.kind() != PercKind::ShiftedTiling) return std::nullopt;
  m.group().validate(s);
  const int side = m.side();
  double overlap = 1.0;
  for (std::int32_t c : s.data()) overlap *= std::max(0, side - std::abs(c));
  const double volume = std::pow(static_cast<double>(side), static_cast<double>(m.group().rank()));
  return overlap * std::pow(volume, -2.0 / p);
}

namespace {

void guard_truncation(std::size_t truncated, std::size_t n) {
  if (static_cast<double>(truncated) > kMaxTruncatedFraction * static_cast<double>(n)) {
    throw StatisticalGuardError(std::to_string(truncated) + " of " + std::to_string(n) +
                                " cluster samples hit the cap (more than 1%); estimate aborted");
  }
}

std::vector<double> kept_values(const std::vector<double>& xs, const std::vector<char>& bad) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!bad[i]) out.push_back(xs[i]);
  }
  return out;
}

}  // namespace

std::vector<Estimate> phi_perc_estimates(const PercModel& m, double p,
                                         std::span<const Element> points, std::size_t n,
                                         std::uint64_t seed, unsigned threads) {
  if (n == 0) throw ValidationError("estimate needs N >= 1 samples");
  if (!(p >= 1.0 && p <= 2.0)) throw ValidationError("estimate needs p in [1, 2]");
  const Group& g = m.group();
  for (const auto& s : points) g.validate(s);
  const std::size_t k = points.size();
  std::vector<double> values(n * k, 0.0);
  std::vector<char> truncated(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    const ClusterSample sample = sample_cluster(m, stream_seed(seed, i));
    if (sample.truncated) {
      truncated[i] = 1;
      return;
    }
    for (std::size_t j = 0; j < k; ++j) values[j * n + i] = phi_cluster(sample, g, p, points[j]);
  });
  const auto bad = static_cast<std::size_t>(std::count(truncated.begin(), truncated.end(), 1));
  guard_truncation(bad, n);

  std::vector<Estimate> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::vector<double> column(values.begin() + static_cast<std::ptrdiff_t>(j * n),
                                     values.begin() + static_cast<std::ptrdiff_t>((j + 1) * n));
    const auto kept = kept_values(column, truncated);
    const MeanStderr ms = mean_and_stderr(kept);
    out.push_back({ms.mean, ms.std_error, phi_perc_exact(m, p, points[j]), kept.size(), bad, seed});
  }
  return out;
}

Estimate phi_perc_estimate(const PercModel& m, double p, const Element& s, std::size_t n,
                           std::uint64_t seed, unsigned threads) {
  const Element points[] = {s};
  return phi_perc_estimates(m, p, points, n, seed, threads).front();
}

MtpReport mtp_check(const PercModel& m, const Element& s, std::size_t n, std::uint64_t seed,
                    unsigned threads) {
  if (n == 0) throw ValidationError("mtp check needs N >= 1 samples");
  const Group& g = m.group();
  g.validate(s);
  std::vector<double> lhs(n, 0.0);
  std::vector<double> rhs(n, 0.0);
  std::vector<char> truncated(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    const ClusterSample sample = sample_cluster(m, stream_seed(seed, i));
    if (sample.truncated) {
      truncated[i] = 1;
      return;
    }
    if (!sample.open) return;
    const auto& k = sample.vertices;
    auto in_cluster = [&](const Element& x) { return std::binary_search(k.begin(), k.end(), x); };
    // sum_x m(x, o, omega): x ranges over K(o), and K(x) = K(o) there.
    std::size_t leaving = 0;
    for (const auto& x : k) {
      if (!in_cluster(g.mul(x, s))) ++leaving;
    }
    lhs[i] = static_cast<double>(leaving) / static_cast<double>(k.size());
    // sum_y m(o, y, omega) = 1{o s not in K(o)}.
    rhs[i] = in_cluster(s) ? 0.0 : 1.0;
  });
  const auto bad = static_cast<std::size_t>(std::count(truncated.begin(), truncated.end(), 1));
  guard_truncation(bad, n);

  const auto l = kept_values(lhs, truncated);
  const auto r = kept_values(rhs, truncated);
  std::vector<double> diff(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) diff[i] = l[i] - r[i];

  MtpReport out;
  const MeanStderr ml = mean_and_stderr(l);
  const MeanStderr mr = mean_and_stderr(r);
  const MeanStderr md = mean_and_stderr(diff);
  out.lhs = {ml.mean, ml.std_error, std::nullopt, l.size(), bad, seed};
  out.rhs = {mr.mean, mr.std_error, std::nullopt, r.size(), bad, seed};
  if (m.kind() == PercKind::ShiftedTiling) {
    const double volume =
        std::pow(static_cast<double>(m.side()), static_cast<double>(g.rank()));
    double overlap = 1.0;
    for (std::int32_t c : s.data()) overlap *= std::max(0, m.side() - std::abs(c));
    out.lhs.exact = 1.0 - overlap / volume;
    out.rhs.exact = out.lhs.exact;
  }
  out.difference = md.mean;
  out.difference_std_error = md.std_error;
  if (md.std_error > 0.0) {
    out.z_score = std::abs(md.mean) / md.std_error;
  } else {
    out.z_score = md.mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return out;
}

std::vector<ScheduleStep> doubling_schedule(const Group& g, int first, int last) {
  if (g.kind() != GroupKind::ZD) throw ValidationError("the doubling schedule uses Z^d tilings");
  if (first < 2 || last < first || last > 30) {
    throw ValidationError("doubling schedule needs 2 <= first <= last <= 30");
  }
  std::vector<ScheduleStep> out;
  const double d = static_cast<double>(g.rank());
  for (int n = first; n <= last; ++n) {
    const double nn = static_cast<double>(n);
    const double p = 2.0 / (1.0 - std::log(1.0 - 1.0 / nn) / (d * nn * std::log(2.0)));
    out.push_back({PercModel::tiling(g, 1 << n), p, n});
  }
  return out;
}

ScheduleReport run_schedule(const Group& g, std::span<const ScheduleStep> schedule,
                              std::span<const Element> set, std::size_t n, std::uint64_t seed,
                              unsigned threads) {
  if (schedule.empty()) throw ValidationError("run_schedule needs a nonempty schedule");
  if (set.empty()) throw ValidationError("run_schedule needs a nonempty set F");
  std::vector<Element> fset(set.begin(), set.end());
  std::sort(fset.begin(), fset.end());
  fset.erase(std::unique(fset.begin(), fset.end()), fset.end());

  // D = F^{-1} F carries every Gram entry.
  std::vector<Element> diffs;
  for (const auto& a : fset) {
    const Element a_inv = g.inv(a);
    for (const auto& b : fset) diffs.push_back(g.mul(a_inv, b));
  }
  std::sort(diffs.begin(), diffs.end());
  diffs.erase(std::unique(diffs.begin(), diffs.end()), diffs.end());

  ScheduleReport report;
  for (std::size_t step = 0; step < schedule.size(); ++step) {
    const ScheduleStep& st = schedule[step];
    if (!(st.model.group() == g)) throw ValidationError("schedule model lives on another group");
    const auto est = phi_perc_estimates(st.model, st.p, diffs, n, stream_seed(seed, step), threads);

    ScheduleRow row;
    row.index = st.index;
    row.model = st.model.spec();
    row.p = st.p;
    row.set = fset;
    std::vector<Entry> kernel_entries;
    double scale = 0.0;
    double max_se = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
      kernel_entries.emplace_back(diffs[i], est[i].mean);
      scale = std::max(scale, std::abs(est[i].mean));
      max_se = std::max(max_se, est[i].std_error);
    }
    const Kernel k = Kernel::make(g, std::move(kernel_entries), "phi_n");
    const double absolute = 1e-9 * scale + 3.0 * max_se * static_cast<double>(fset.size());
    row.psd_tolerance = scale > 0.0 ? absolute / scale : 1e-9;
    row.psd = gram_psd_check(k, fset, row.psd_tolerance);
    for (const auto& s : fset) {
      const auto idx = static_cast<std::size_t>(
          std::lower_bound(diffs.begin(), diffs.end(), s) - diffs.begin());
      row.values.push_back(est[idx]);
      const double v = est[idx].exact.value_or(est[idx].mean);
      row.max_deviation = std::max(row.max_deviation, std::abs(v - 1.0));
      if (s == g.identity() && v > 1.0 + 1e-12) row.bounded_by_one = false;
    }
    report.rows.push_back(std::move(row));
  }

  for (std::size_t r = 1; r < report.rows.size(); ++r) {
    const auto& prev = report.rows[r - 1];
    const auto& cur = report.rows[r];
    for (std::size_t j = 0; j < cur.values.size(); ++j) {
      const double a = prev.values[j].exact.value_or(prev.values[j].mean);
      const double b = cur.values[j].exact.value_or(cur.values[j].mean);
      if (!(b > a)) report.rising = false;
    }
    if (cur.max_deviation > prev.max_deviation + 1e-12) report.strong_convergence_surrogate = false;
  }
  for (const auto& row : report.rows) {
    if (!row.bounded_by_one) report.strong_convergence_surrogate = false;
  }
  return report;
}

std::map<std::vector<std::size_t>, double> tiling_window_law(const PercModel& m,
                                                             std::span<const Element> window) {
  if (m.kind() != PercKind::ShiftedTiling) {
    throw ValidationError("exact window laws are available for tilings only");
  }
  const Group& g = m.group();
  const int d = g.rank();
  const int side = m.side();
  for (const auto& x : window) g.validate(x);
  auto box_of = [&](const Element& x, const std::vector<int>& u, std::size_t axis) {
    const int shifted = x[axis] - u[axis];
    return shifted >= 0 ? shifted / side : -((-shifted + side - 1) / side);
  };
  std::size_t offsets = 1;
  for (int i = 0; i < d; ++i) offsets *= static_cast<std::size_t>(side);
  const double weight = 1.0 / static_cast<double>(offsets);

  std::map<std::vector<std::size_t>, double> law;
  std::vector<int> u(d, 0);
  for (std::size_t count = 0; count < offsets; ++count) {
    std::vector<std::size_t> pattern(window.size());
    for (std::size_t a = 0; a < window.size(); ++a) {
      pattern[a] = a;
      for (std::size_t b = 0; b < a; ++b) {
        bool same = true;
        for (int axis = 0; axis < d && same; ++axis) {
          same = box_of(window[a], u, axis) == box_of(window[b], u, axis);
        }
        if (same) {
          pattern[a] = b;
          break;
        }
      }
    }
    law[pattern] += weight;
    for (int axis = d - 1; axis >= 0; --axis) {
      if (++u[axis] < side) break;
      u[axis] = 0;
    }
  }
  return law;
}

}  // namespace schurlab
