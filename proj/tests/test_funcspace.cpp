#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/funcspace.hpp"

using namespace schurlab;

namespace {

SparseFunction indicator3(const Group& z1) {
  const double c = 1.0 / std::sqrt(3.0);
  return SparseFunction::make(z1, {{z1.coords({-1}), c}, {z1.coords({0}), c}, {z1.coords({1}), c}});
}

}  // namespace

TEST_SUITE("funcspace") {
  TEST_CASE("norm examples") {
    const Group z1 = Group::zd(1);
    const auto f = SparseFunction::make(z1, {{z1.coords({0}), 0.5}, {z1.coords({5}), 0.5}});
    CHECK(norm_p(f, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    const auto g = indicator3(z1);
    CHECK(std::abs(norm_p(g, 2.0) - 1.0) < 1e-15);
    CHECK(std::abs(norm_p(g, 1.0) - oracle::lp_norm_direct(g, 1.0)) < 1e-14);
    CHECK(std::abs(norm_p(g, 1.0) - 1.7320508075688772) < 1e-14);
    CHECK(norm_p(f, kInfinity) == 0.5);
  }

  TEST_CASE("construction rules") {
    const Group z1 = Group::zd(1);
    CHECK_THROWS_AS(SparseFunction::make(z1, {{z1.coords({0}), 1.5}}), ValidationError);
    CHECK_THROWS_AS(SparseFunction::make(z1, {{z1.coords({0}), -0.1}}), ValidationError);
    CHECK_THROWS_AS(
        SparseFunction::make(z1, {{z1.coords({0}), 0.2}, {z1.coords({0}), 0.3}}),
        ValidationError);
    CHECK_NOTHROW(SparseFunction::make_relaxed(z1, {{z1.coords({0}), 1.5}}));
    const auto zeros = SparseFunction::make(z1, {{z1.coords({0}), 0.0}, {z1.coords({1}), 0.5}});
    CHECK(zeros.support_size() == 1);
  }

  TEST_CASE("translation examples") {
    const Group z1 = Group::zd(1);
    const auto d0 = dirac(z1, z1.identity());
    CHECK(translate_left(z1.coords({3}), d0) == dirac(z1, z1.coords({3})));
    CHECK(translate_right(d0, z1.coords({3})) == dirac(z1, z1.coords({-3})));
    const Group f2 = Group::free(2);
    CHECK(translate_left(f2.word("b"), dirac(f2, f2.word("a"))) == dirac(f2, f2.word("b a")));
    CHECK(translate_right(dirac(f2, f2.word("a")), f2.word("a")) == dirac(f2, f2.identity()));
    const auto g = indicator3(z1);
    CHECK(translate_right(g, z1.identity()) == g);
  }

  TEST_CASE("translations preserve norms") {
    CounterRng rng(21);
    for (const auto* spec : {"Z2", "F2"}) {
      const Group g = Group::parse(spec);
      for (int i = 0; i < 30; ++i) {
        const auto f = oracle::random_function(g, rng, 3, 10);
        const Element s = oracle::random_element(g, rng, 3);
        for (double p : {1.0, 1.5, 2.0}) {
          CHECK(std::abs(norm_p(translate_left(s, f), p) - norm_p(f, p)) < 1e-14);
          CHECK(std::abs(norm_p(translate_right(f, s), p) - norm_p(f, p)) < 1e-14);
        }
        for (const auto& [x, v] : f.entries()) {
          CHECK(translate_left(s, f)(g.mul(s, x)) == v);
          CHECK(translate_right(f, s)(g.mul(x, g.inv(s))) == v);
        }
      }
    }
  }

  TEST_CASE("restriction examples") {
    const Group z1 = Group::zd(1);
    const auto f = SparseFunction::make(z1, {{z1.coords({0}), 0.5}, {z1.coords({5}), 0.5}});
    CHECK(restrict_to_ball(f, z1.identity(), 2) == SparseFunction::make(z1, {{z1.coords({0}), 0.5}}));
    CHECK(restrict_to_ball(f, z1.coords({2}), 3) == f);
    CHECK(restrict_to_ball(f, z1.coords({20}), 3).empty());
    const auto rest = remove_ball(f, z1.identity(), 2);
    CHECK(rest == SparseFunction::make(z1, {{z1.coords({5}), 0.5}}));
  }

  TEST_CASE("concentration examples") {
    const Group z1 = Group::zd(1);
    const auto d0 = dirac(z1, z1.identity());
    for (int r : {0, 1, 5}) CHECK(concentration(d0, 1.5, r).value == 1.0);

    const int n = 10;
    std::vector<Element> box;
    for (int i = -n; i <= n; ++i) box.push_back(z1.coords({i}));
    const auto f = normalized_indicator(z1, box, 2.0);
    for (int r = 0; r <= 12; ++r) {
      const double expect = std::min(2 * r + 1, 2 * n + 1) / (2.0 * n + 1);
      const double q = concentration(f, 2.0, r).value;
      CHECK(std::abs(q - expect) < 1e-12);
      CHECK(std::abs(q - oracle::concentration_brute(f, 2.0, r)) < 1e-12);
    }
    CHECK(std::abs(concentration(f, 2.0, 2).value - 5.0 / 21.0) < 1e-12);

    const double p = 1.5;
    const double c = std::pow(2.0, -1.0 / p);
    const auto bumps = SparseFunction::make(z1, {{z1.coords({0}), c}, {z1.coords({9}), c}});
    const auto q = concentration(bumps, p, 2);
    CHECK(std::abs(q.value - 0.5) < 1e-12);
    CHECK(q.center == z1.coords({-2}));
  }

  TEST_CASE("concentration matches brute force and is monotone") {
    CounterRng rng(33);
    for (const auto* spec : {"Z1", "Z2", "F2"}) {
      const Group g = Group::parse(spec);
      for (int i = 0; i < 15; ++i) {
        const auto f = oracle::random_function(g, rng, 3, 8);
        const Element s = oracle::random_element(g, rng, 4);
        double prev = 0.0;
        for (int r = 0; r <= 6; ++r) {
          const double q = concentration(f, 1.5, r).value;
          if (r <= 2) CHECK(std::abs(q - oracle::concentration_brute(f, 1.5, r)) < 1e-12);
          CHECK(q >= prev - 1e-15);
          CHECK(std::abs(concentration(translate_left(s, f), 1.5, r).value - q) < 1e-12);
          prev = q;
        }
        CHECK(std::abs(prev - power_sum(f, 1.5)) < 1e-12);
      }
    }
  }

  TEST_CASE("norms decrease in p") {
    CounterRng rng(3);
    const Group z2 = Group::zd(2);
    for (int i = 0; i < 50; ++i) {
      const auto f = oracle::random_function(z2, rng, 4, 12);
      double prev = kInfinity;
      for (double p : {1.0, 1.25, 1.5, 2.0, 3.0}) {
        const double v = norm_p(f, p);
        CHECK(v <= prev + 1e-14);
        prev = v;
      }
      CHECK(norm_p(f, kInfinity) <= prev + 1e-14);
    }
  }

  TEST_CASE("unit ball and distances") {
    const Group z1 = Group::zd(1);
    const auto f = indicator3(z1);
    CHECK(in_unit_ball(f, 2.0));
    CHECK_FALSE(in_unit_ball(f, 1.0));
    CHECK(distance_p(f, f, 1.5) == 0.0);
    const auto d = dirac(z1, z1.identity());
    CHECK(std::abs(distance_p(d, dirac(z1, z1.coords({1})), 2.0) - std::sqrt(2.0)) < 1e-15);
    const auto sq = pointwise_power(f, 2.0);
    CHECK(std::abs(sq(z1.identity()) - 1.0 / 3.0) < 1e-15);
  }
}
