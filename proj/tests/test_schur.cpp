#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/schur.hpp"

using namespace schurlab;

namespace {

std::shared_ptr<const Window> interval(const Group& z1, int lo, int hi) {
  std::vector<Element> xs;
  for (int i = lo; i <= hi; ++i) xs.push_back(z1.coords({i}));
  return std::make_shared<const Window>(z1, xs);
}

Matrix random_matrix(CounterRng& rng, std::size_t n, double lo = -1.0) {
  Matrix m(n, n);
  for (auto& v : m.data()) v = rng.uniform(lo, 1.0);
  return m;
}

}  // namespace

TEST_SUITE("schur") {
  TEST_CASE("windows") {
    const Group z1 = Group::zd(1);
    CHECK_THROWS_AS(Window(z1, {z1.identity(), z1.identity()}), ValidationError);
    const Window w(z1, {z1.coords({3}), z1.coords({-1})});
    CHECK(w[0] == z1.coords({-1}));
    CHECK(w.index_of(z1.coords({3})) == 1);
    CHECK_FALSE(w.index_of(z1.coords({0})).has_value());
    CHECK_THROWS_AS(WindowOperator(Window::ball(z1, 1), Matrix(2, 2)), ValidationError);
  }

  TEST_CASE("tube masks") {
    const Group z1 = Group::zd(1);
    const auto w = interval(z1, -5, 5);
    CHECK(tube_mask(w, std::vector<Element>{z1.identity()}).matrix() == Matrix::identity(11));
    const auto tri = tube_mask(w, *z1.ball_at_identity(1));
    for (std::size_t i = 0; i < 11; ++i) {
      for (std::size_t j = 0; j < 11; ++j) {
        const bool near = (i > j ? i - j : j - i) <= 1;
        CHECK(tri(i, j) == (near ? 1.0 : 0.0));
      }
    }
    CHECK(tube_mask(w, std::vector<Element>{}).sup_norm() == 0.0);
  }

  TEST_CASE("schur products") {
    const Group z1 = Group::zd(1);
    const auto w = interval(z1, -3, 3);
    CounterRng rng(9);
    const WindowOperator t(w, random_matrix(rng, 7));
    const auto delta = Kernel::make(z1, {{z1.identity(), 1.0}});
    const auto diag = schur_product(delta, t);
    for (std::size_t i = 0; i < 7; ++i) {
      for (std::size_t j = 0; j < 7; ++j) CHECK(diag(i, j) == (i == j ? t(i, j) : 0.0));
    }
    std::vector<Entry> ones;
    for (const auto& x : *z1.ball_at_identity(1)) ones.emplace_back(x, 1.0);
    const auto band = tube_mask(w, *z1.ball_at_identity(1));
    const auto banded = schur_product(Kernel::make(z1, ones), t);
    for (std::size_t i = 0; i < 7; ++i) {
      for (std::size_t j = 0; j < 7; ++j) CHECK(banded(i, j) == band(i, j) * t(i, j));
    }
    std::vector<Element> pts{z1.coords({-1}), z1.coords({0}), z1.coords({1})};
    const auto k = phi_kernel(normalized_indicator(z1, pts, 2.0));
    const auto mi = schur_product(k, WindowOperator::identity(w));
    CHECK((mi - WindowOperator::identity(w)).sup_norm() < 1e-15);
    CHECK(schur_product(k, t).sup_norm() <= k.sup_norm() * t.sup_norm() + 1e-15);
  }

  TEST_CASE("schur products are linear") {
    const Group f2 = Group::free(2);
    const auto w = Window::ball(f2, 2);
    CounterRng rng(12);
    const auto k = phi_kernel(oracle::random_function(f2, rng, 1, 4));
    const WindowOperator a(w, random_matrix(rng, w->size()));
    const WindowOperator b(w, random_matrix(rng, w->size()));
    Matrix sum(w->size(), w->size());
    for (std::size_t i = 0; i < sum.data().size(); ++i) {
      sum.data()[i] = 2.0 * a.matrix().data()[i] + b.matrix().data()[i];
    }
    const auto lhs = schur_product(k, WindowOperator(w, sum));
    Matrix rhs(w->size(), w->size());
    const auto ka = schur_product(k, a);
    const auto kb = schur_product(k, b);
    for (std::size_t i = 0; i < rhs.data().size(); ++i) {
      rhs.data()[i] = 2.0 * ka.matrix().data()[i] + kb.matrix().data()[i];
    }
    CHECK((lhs - WindowOperator(w, rhs)).sup_norm() < 1e-14);
  }

  TEST_CASE("operator norm examples") {
    CHECK(std::abs(op_norm(Matrix::identity(5)).value - 1.0) < 1e-12);
    for (std::size_t n : {1u, 4u, 9u}) {
      CHECK(std::abs(op_norm(Matrix(n, n, 1.0)).value - static_cast<double>(n)) < 1e-10);
    }
    CHECK(op_norm(Matrix(3, 3)).value == 0.0);
  }

  TEST_CASE("operator norm against the sphere grid") {
    CounterRng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
      std::array<std::array<double, 3>, 3> a{};
      Matrix m(3, 3);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m(i, j) = a[i][j] = rng.uniform(-1.0, 1.0);
      }
      CHECK(std::abs(op_norm(m).value - oracle::op_norm_sphere_grid(a)) < 1e-6);
      CHECK(std::abs(op_norm_power(m).value - oracle::op_norm_sphere_grid(a)) < 1e-6);
    }
  }

  TEST_CASE("power iteration agrees with the dense solver") {
    CounterRng rng(8);
    for (std::size_t n : {10u, 40u, 120u}) {
      const Matrix m = random_matrix(rng, n, 0.0);
      const auto dense = op_norm(m);
      const auto power = op_norm_power(m);
      CHECK(power.converged);
      CHECK(dense.method == "svd");
      CHECK(std::abs(dense.value - power.value) <= 1e-8 * dense.value);
    }
    Matrix kernel_start(2, 2);
    kernel_start(0, 0) = 1.0;
    kernel_start(0, 1) = -1.0;
    CHECK(std::abs(op_norm_power(kernel_start).value - std::sqrt(2.0)) < 1e-9);
    const Matrix big = random_matrix(rng, 210, 0.0);
    CHECK(op_norm(big).method != "svd");
  }

  TEST_CASE("finite propagation bound") {
    const Group z1 = Group::zd(1);
    const auto e = std::vector<Element>{z1.identity()};
    const auto w = interval(z1, -10, 10);
    CHECK(fin_prop_bound(WindowOperator::identity(w), e) == 1.0);
    CHECK(op_norm(WindowOperator::identity(w)).value == doctest::Approx(1.0));
    CHECK(fin_prop_bound(WindowOperator::zero(w), e) == 0.0);
    const auto ball1 = *z1.ball_at_identity(1);
    double prev = 0.0;
    for (int r : {5, 20, 80}) {
      const auto tri = tube_mask(interval(z1, -r, r), ball1);
      const double n = op_norm(tri).value;
      CHECK(fin_prop_bound(tri, ball1) == 3.0);
      CHECK(n <= 3.0);
      CHECK(n > prev);
      prev = n;
    }
    CHECK(prev > 2.99);
    const auto tri = tube_mask(w, ball1);
    CHECK_THROWS_AS(fin_prop_bound(tri, e), ValidationError);
  }

  TEST_CASE("weighted Schur test") {
    const Group z1 = Group::zd(1);
    const auto w2 = interval(z1, 0, 1);
    const WindowOperator ones(w2, Matrix(2, 2, 1.0));
    const auto b = schur_test_bound(ones);
    CHECK(b.c1 == 2.0);
    CHECK(b.c2 == 2.0);
    CHECK(b.bound == 2.0);
    CHECK(std::abs(op_norm(ones).value - 2.0) < 1e-12);
    CHECK(schur_test_bound(WindowOperator::identity(w2)).bound == 1.0);
    CHECK_THROWS_AS(schur_test_bound(ones, std::vector<double>{1.0, 0.0}), ValidationError);

    CounterRng rng(31);
    const auto w5 = interval(z1, 0, 4);
    for (int trial = 0; trial < 30; ++trial) {
      const WindowOperator t(w5, random_matrix(rng, 5, 0.0));
      std::vector<double> rows(5, 0.0);
      for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) rows[i] += t(i, j);
      }
      const double n = op_norm(t).value;
      CHECK(schur_test_bound(t).bound >= n - 1e-9);
      CHECK(schur_test_bound(t, rows).bound >= n - 1e-9);
    }
  }

  TEST_CASE("l1 multiplier bound") {
    const Group z1 = Group::zd(1);
    const auto w = interval(z1, -4, 4);
    CounterRng rng(4);
    const WindowOperator t(w, random_matrix(rng, 9));
    CHECK(l1_multiplier_bound(dirac(z1, z1.identity()), t).ratio <= 1.0 + 1e-12);
    const auto f = SparseFunction::make(
        z1, {{z1.coords({-1}), 0.3}, {z1.coords({0}), 0.3}, {z1.coords({1}), 0.3}});
    const auto id = l1_multiplier_bound(f, WindowOperator::identity(w));
    CHECK(std::abs(id.multiplied_norm - 0.3) < 1e-12);
    CHECK(id.ratio <= id.l1_norm);
    for (int trial = 0; trial < 30; ++trial) {
      const auto g = oracle::random_function(z1, rng, 3, 6);
      const WindowOperator u(w, random_matrix(rng, 9));
      const auto r = l1_multiplier_bound(g, u);
      CHECK(r.holds);
      CHECK(r.multiplied_norm <= r.l1_norm * r.base_norm + 1e-9);
    }
  }

  TEST_CASE("positive-definite multipliers have norm k(e)") {
    const Group z1 = Group::zd(1);
    const auto w = Window::ball(z1, 6);
    std::vector<Element> pts{z1.coords({-1}), z1.coords({0}), z1.coords({1})};
    const auto k = phi_kernel(normalized_indicator(z1, pts, 2.0));
    const auto r = cp_norm_check(k, w, 20, 99);
    CHECK(r.upper_violations == 0);
    CHECK(std::abs(r.witness_ratio - 1.0) < 1e-12);
    CHECK(r.max_ratio <= 1.0 + 1e-8);

    const auto delta = Kernel::make(z1, {{z1.identity(), 1.0}});
    const auto rd = cp_norm_check(delta, w, 10, 1);
    CHECK(rd.witness_ratio == 1.0);
    CHECK(rd.kernel_at_identity == 1.0);

    const auto quarter = phi_kernel(dirac(z1, z1.identity(), 0.5));
    CHECK(cp_norm_check(quarter, w, 5, 2).witness_ratio == 0.25);

    const auto bad = Kernel::make(z1, {{z1.identity(), 1.0}, {z1.coords({1}), 2.0},
                                       {z1.coords({-1}), 2.0}});
    CHECK_THROWS_AS(cp_norm_check(bad, w, 5, 3), ValidationError);
  }

  TEST_CASE("cp checks are thread-count independent") {
    const Group f2 = Group::free(2);
    CounterRng rng(55);
    const auto k = phi_kernel(oracle::random_function(f2, rng, 1, 4));
    const auto w = Window::ball(f2, 2);
    const auto a = cp_norm_check(k, w, 12, 7, 1);
    const auto b = cp_norm_check(k, w, 12, 7, 4);
    CHECK(a.max_ratio == b.max_ratio);
    CHECK(a.upper_violations == b.upper_violations);
  }

  TEST_CASE("cutoff") {
    const Group z1 = Group::zd(1);
    CounterRng rng(6);
    const auto f = oracle::random_function(z1, rng, 3, 6);
    const auto k = phi_kernel(f);
    const auto at_e = cutoff(k, std::vector<Element>{z1.identity()});
    CHECK(at_e.support_size() == 1);
    CHECK(std::abs(at_e.at_identity() - power_sum(f, 2.0)) < 1e-12);
    CHECK(cutoff(k, k.support()) == k);
    CHECK(cutoff(k, std::vector<Element>{}).empty());
  }

  TEST_CASE("window norms grow along a ladder") {
    const Group z1 = Group::zd(1);
    CounterRng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
      const auto k = phi_kernel(oracle::random_function(z1, rng, 2, 5));
      const int radii[] = {2, 4, 8, 16};
      const auto ladder = convolution_norm_ladder(k, radii);
      CHECK(ladder.size() == 4);
      for (std::size_t i = 1; i < ladder.size(); ++i) {
        CHECK(ladder[i].norm >= ladder[i - 1].norm - 1e-12);
      }
    }
    const Group f2 = Group::free(2);
    const int radii[] = {2, 4, 8};
    const auto capped = convolution_norm_ladder(Kernel::make(f2, {{f2.identity(), 1.0}}), radii,
                                                600);
    CHECK(capped.size() == 2);
  }

  TEST_CASE("random operators respect the tube") {
    const Group z2 = Group::zd(2);
    const auto w = Window::ball(z2, 3);
    const auto tube = *z2.ball_at_identity(1);
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto t = random_operator(w, s, std::span<const Element>(tube));
      CHECK_NOTHROW(fin_prop_bound(t, tube));
      CHECK(op_norm(t).value <= fin_prop_bound(t, tube) + 1e-9);
      CHECK(op_norm(t).value <= schur_test_bound(t).bound + 1e-9);
      CHECK(random_operator(w, s).matrix() == random_operator(w, s).matrix());
    }
  }
}
