#pragma once

// Reference computations written independently of the library internals.
// They trade speed for obviousness and are only used to cross-check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <set>
#include <vector>

#include "schurlab/schurlab.hpp"

namespace oracle {

using schurlab::Element;
using schurlab::Entry;
using schurlab::Group;
using schurlab::SparseFunction;

/// Breadth-first ball in the right Cayley graph, using only mul and the
/// generator list.
inline std::vector<Element> bfs_ball(const Group& g, const Element& center, int r) {
  std::vector<Element> steps;
  for (const auto& s : g.generators()) {
    steps.push_back(s);
    steps.push_back(g.inv(s));
  }
  std::set<Element> seen{center};
  std::vector<Element> frontier{center};
  for (int layer = 0; layer < r; ++layer) {
    std::vector<Element> next;
    for (const auto& x : frontier) {
      for (const auto& s : steps) {
        Element y = g.mul(x, s);
        if (seen.insert(y).second) next.push_back(std::move(y));
      }
    }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

/// Graph distance by BFS from a, capped at `limit` (returns -1 past it).
inline int bfs_distance(const Group& g, const Element& a, const Element& b, int limit) {
  for (int r = 0; r <= limit; ++r) {
    const auto ball = bfs_ball(g, a, r);
    if (std::binary_search(ball.begin(), ball.end(), b)) return r;
  }
  return -1;
}

/// Phi(f)(s) as the double sum over pairs (t, u) with t s = u.
inline double phi_double_sum(const SparseFunction& f, const Element& s) {
  const Group& g = f.group();
  double sum = 0.0;
  for (const auto& [t, ft] : f.entries()) {
    const Element ts = g.mul(t, s);
    for (const auto& [u, fu] : f.entries()) {
      if (u == ts) sum += ft * fu;
    }
  }
  return sum;
}

/// sup over every center within r of the support, brute force.
inline double concentration_brute(const SparseFunction& f, double p, int r) {
  const Group& g = f.group();
  std::set<Element> centers;
  for (const auto& [x, v] : f.entries()) {
    for (auto& y : bfs_ball(g, x, r)) centers.insert(y);
  }
  double best = 0.0;
  for (const auto& c : centers) {
    const auto ball = bfs_ball(g, c, r);
    double mass = 0.0;
    for (const auto& [x, v] : f.entries()) {
      if (std::binary_search(ball.begin(), ball.end(), x)) mass += std::pow(v, p);
    }
    best = std::max(best, mass);
  }
  return best;
}

/// ||M v|| / ||v|| maximized over the unit sphere of R^3 by a spherical grid
/// followed by repeated zoomed grids around the incumbent.
inline double op_norm_sphere_grid(const std::array<std::array<double, 3>, 3>& m) {
  auto value = [&](double theta, double phi) {
    const double v[3] = {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                         std::cos(theta)};
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      double row = 0.0;
      for (int j = 0; j < 3; ++j) row += m[i][j] * v[j];
      s += row * row;
    }
    return std::sqrt(s);
  };
  const double pi = std::acos(-1.0);
  double best = 0.0, bt = 0.0, bp = 0.0;
  const int n = 200;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j < 2 * n; ++j) {
      const double t = pi * i / n;
      const double ph = pi * j / n;
      const double v = value(t, ph);
      if (v > best) best = v, bt = t, bp = ph;
    }
  }
  double width = pi / n;
  for (int level = 0; level < 40; ++level) {
    const double ct = bt, cp = bp;
    for (int i = -10; i <= 10; ++i) {
      for (int j = -10; j <= 10; ++j) {
        const double t = ct + width * i / 10.0;
        const double ph = cp + width * j / 10.0;
        const double v = value(t, ph);
        if (v > best) best = v, bt = t, bp = ph;
      }
    }
    width *= 0.5;
  }
  return best;
}

/// (L - |s|)_+ L^{-2/p} per coordinate, multiplied over coordinates.
inline double tiling_phi(int side, double p, std::span<const std::int32_t> s) {
  double v = 1.0;
  for (auto c : s) v *= std::max(0, side - std::abs(c)) * std::pow(side, -2.0 / p);
  return v;
}

/// p solving L^{d (1 - 2/p)} = 1 - 1/n, by bisection on (1, 2].
inline double doubling_exponent(int n, int dim) {
  const double side_power = std::pow(2.0, n * dim);
  const double target = 1.0 - 1.0 / n;
  double lo = 1.0, hi = 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::pow(side_power, 1.0 - 2.0 / mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Random f with values in [0.05, 1) on up to max_size points of B(e, radius).
inline SparseFunction random_function(const Group& g, schurlab::CounterRng& rng, int radius,
                                      std::size_t max_size) {
  const auto ball = bfs_ball(g, g.identity(), radius);
  const std::size_t n = 1 + rng.below(max_size);
  std::vector<Entry> entries;
  std::set<Element> used;
  for (std::size_t i = 0; i < n; ++i) {
    const Element& x = ball[rng.below(ball.size())];
    if (!used.insert(x).second) continue;
    entries.emplace_back(x, rng.uniform(0.05, 1.0));
  }
  return SparseFunction::make(g, std::move(entries));
}

inline SparseFunction scaled(const SparseFunction& f, double c) {
  std::vector<Entry> entries;
  for (const auto& [x, v] : f.entries()) entries.emplace_back(x, v * c);
  return SparseFunction::make(f.group(), std::move(entries));
}

inline double lp_norm_direct(const SparseFunction& f, double p) {
  double s = 0.0;
  for (const auto& [x, v] : f.entries()) s += std::pow(v, p);
  return std::pow(s, 1.0 / p);
}

inline SparseFunction unit_l2(const SparseFunction& f) {
  return scaled(f, 1.0 / lp_norm_direct(f, 2.0));
}

inline Element random_element(const Group& g, schurlab::CounterRng& rng, int radius) {
  const auto ball = bfs_ball(g, g.identity(), radius);
  return ball[rng.below(ball.size())];
}

}  // namespace oracle
