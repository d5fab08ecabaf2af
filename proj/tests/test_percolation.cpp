#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/percolation.hpp"

using namespace schurlab;

TEST_SUITE("percolation") {
  TEST_CASE("model specs") {
    const Group z1 = Group::zd(1);
    CHECK(PercModel::parse(z1, "tiling:L=4").side() == 4);
    CHECK(PercModel::parse(z1, "bernoulli:q=0.4").q() == 0.4);
    CHECK(PercModel::parse(z1, "bernoulli:q=0.4:cap=50").cap() == 50);
    CHECK(PercModel::parse(z1, "bernoulli:q=0.4").spec() == "bernoulli:q=0.4:cap=100000");
    CHECK_THROWS_AS(PercModel::parse(z1, "tiling:L=0"), ValidationError);
    CHECK_THROWS_AS(PercModel::parse(z1, "bernoulli:q=1.5"), ValidationError);
    CHECK_THROWS_AS(PercModel::parse(z1, "ising:beta=1"), ValidationError);
    CHECK_THROWS_AS(PercModel::tiling(Group::free(2), 3), ValidationError);
  }

  TEST_CASE("tiling clusters") {
    const Group z1 = Group::zd(1);
    const auto m = PercModel::tiling(z1, 4);
    std::map<int, int> positions;
    for (std::uint64_t s = 0; s < 400; ++s) {
      const auto c = sample_cluster(m, s);
      CHECK(c.open);
      CHECK(c.vertices.size() == 4);
      CHECK(std::binary_search(c.vertices.begin(), c.vertices.end(), z1.identity()));
      positions[-c.vertices.front()[0]]++;
    }
    CHECK(positions.size() == 4);
    for (const auto& [pos, count] : positions) CHECK(count > 50);
    const auto m2 = PercModel::tiling(Group::zd(2), 3);
    CHECK(sample_cluster(m2, 1).vertices.size() == 9);
  }

  TEST_CASE("tiling law is exactly invariant") {
    const Group z1 = Group::zd(1);
    const auto m = PercModel::tiling(z1, 4);
    std::vector<Element> window;
    for (int i = 0; i < 6; ++i) window.push_back(z1.coords({i}));
    const auto base = tiling_window_law(m, window);
    double total = 0.0;
    for (const auto& [pattern, prob] : base) total += prob;
    CHECK(std::abs(total - 1.0) < 1e-15);
    for (int s : {1, 2, 3, 7}) {
      std::vector<Element> moved;
      for (const auto& x : window) moved.push_back(z1.mul(z1.coords({s}), x));
      CHECK(tiling_window_law(m, moved) == base);
    }
    const Group z2 = Group::zd(2);
    const auto m2 = PercModel::tiling(z2, 2);
    const auto w2 = *z2.ball_at_identity(1);
    std::vector<Element> moved2;
    for (const auto& x : w2) moved2.push_back(z2.mul(z2.coords({1, -1}), x));
    std::sort(moved2.begin(), moved2.end());
    CHECK(tiling_window_law(m2, moved2) == tiling_window_law(m2, w2));
  }

  TEST_CASE("bernoulli clusters") {
    const Group z1 = Group::zd(1);
    CHECK_FALSE(sample_cluster(PercModel::bernoulli(z1, 0.0), 3).open);
    CHECK(sample_cluster(PercModel::bernoulli(z1, 0.0), 3).vertices.empty());
    CHECK(sample_cluster(PercModel::bernoulli(z1, 1.0, 500), 3).truncated);
    const Group f2 = Group::free(2);
    const auto m = PercModel::bernoulli(f2, 0.3);
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto c = sample_cluster(m, s);
      CHECK(c.open == bernoulli_open(m, s, f2.identity()));
      CHECK(c.open == !c.vertices.empty());
      for (const auto& x : c.vertices) {
        CHECK(bernoulli_open(m, s, x));
        bool linked = x == f2.identity();
        for (const auto& t : f2.generators()) {
          for (const auto& step : {t, f2.inv(t)}) {
            linked = linked || std::binary_search(c.vertices.begin(), c.vertices.end(),
                                                  f2.mul(x, step));
          }
        }
        CHECK(linked);
      }
    }
  }

  TEST_CASE("phi on clusters") {
    const Group z1 = Group::zd(1);
    const auto c = sample_cluster(PercModel::tiling(z1, 4), 0);
    CHECK(std::abs(phi_cluster(c, z1, 1.0, z1.identity()) - 0.25) < 1e-15);
    CHECK(std::abs(phi_cluster(c, z1, 2.0, z1.coords({1})) - 0.75) < 1e-15);
    const ClusterSample empty;
    CHECK(phi_cluster(empty, z1, 1.5, z1.identity()) == 0.0);
    CHECK_THROWS_AS(phi_cluster(c, z1, 2.5, z1.identity()), ValidationError);
    ClusterSample cut = sample_cluster(PercModel::bernoulli(z1, 1.0, 10), 1);
    CHECK_THROWS_AS(phi_cluster(cut, z1, 1.5, z1.identity()), ValidationError);
  }

  TEST_CASE("phi on clusters: bounds and monotonicity in p") {
    const Group f2 = Group::free(2);
    const auto m = PercModel::bernoulli(f2, 0.3);
    for (std::uint64_t s = 0; s < 40; ++s) {
      const auto c = sample_cluster(m, s);
      const double size = static_cast<double>(c.vertices.size());
      double prev = -1.0;
      for (double p : {1.0, 1.25, 1.5, 1.75, 2.0}) {
        const double at_e = phi_cluster(c, f2, p, f2.identity());
        const double mass = size == 0 ? 0.0 : std::pow(size, 1.0 - 2.0 / p);
        CHECK(std::abs(at_e - mass) < 1e-12);
        CHECK(at_e <= (c.open ? 1.0 : 0.0) + 1e-15);
        const double v = phi_cluster(c, f2, p, f2.word("a"));
        CHECK(v >= 0.0);
        CHECK(v <= mass + 1e-15);
        CHECK(v >= prev - 1e-15);
        prev = v;
      }
    }
  }

  TEST_CASE("tiling estimates match the closed form") {
    const Group z1 = Group::zd(1);
    const auto m = PercModel::tiling(z1, 4);
    CHECK(std::abs(*phi_perc_exact(m, 1.0, z1.identity()) - 0.25) < 1e-15);
    CHECK(std::abs(*phi_perc_exact(m, 2.0, z1.coords({2})) - 0.5) < 1e-15);
    CHECK(*phi_perc_exact(m, 2.0, z1.coords({5})) == 0.0);
    CHECK_FALSE(phi_perc_exact(PercModel::bernoulli(z1, 0.4), 2.0, z1.identity()).has_value());
    const auto e = phi_perc_estimate(m, 1.0, z1.identity(), 2000, 5);
    CHECK(std::abs(e.mean - 0.25) <= 3 * e.std_error + 1e-12);
    CHECK(e.samples == 2000);
    CHECK(e.seed == 5);
    const Group z2 = Group::zd(2);
    const auto m2 = PercModel::tiling(z2, 3);
    for (const auto& s : *z2.ball_at_identity(2)) {
      CHECK(std::abs(*phi_perc_exact(m2, 1.5, s) - oracle::tiling_phi(3, 1.5, s.data())) < 1e-15);
      const auto est = phi_perc_estimate(m2, 1.5, s, 300, 2);
      CHECK(std::abs(est.mean - *est.exact) <= 3 * est.std_error + 1e-12);
    }
  }

  TEST_CASE("estimates are replayable and thread independent") {
    const Group z1 = Group::zd(1);
    const auto m = PercModel::bernoulli(z1, 0.5);
    const std::vector<Element> pts{z1.identity(), z1.coords({1}), z1.coords({3})};
    const auto a = phi_perc_estimates(m, 1.7, pts, 3000, 42, 1);
    const auto b = phi_perc_estimates(m, 1.7, pts, 3000, 42, 4);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(a[i].mean == b[i].mean);
      CHECK(a[i].std_error == b[i].std_error);
    }
    CHECK(std::abs(a[0].mean - phi_perc_estimate(m, 1.7, z1.identity(), 3000, 42).mean) == 0.0);
  }

  TEST_CASE("truncation guard") {
    const Group z1 = Group::zd(1);
    CHECK_THROWS_AS(phi_perc_estimate(PercModel::bernoulli(z1, 0.97, 20), 1.5, z1.identity(), 200, 1),
                    StatisticalGuardError);
  }

  TEST_CASE("mass transport") {
    const Group z1 = Group::zd(1);
    const auto t = mtp_check(PercModel::tiling(z1, 3), z1.coords({1}), 5000, 4);
    REQUIRE(t.lhs.exact.has_value());
    CHECK(std::abs(*t.lhs.exact - 1.0 / 3.0) < 1e-15);
    CHECK(std::abs(*t.rhs.exact - 1.0 / 3.0) < 1e-15);
    CHECK(t.z_score <= 3.0);
    const auto id = mtp_check(PercModel::bernoulli(z1, 0.4), z1.identity(), 2000, 4);
    CHECK(id.lhs.mean == 0.0);
    CHECK(id.rhs.mean == 0.0);
    CHECK(id.z_score == 0.0);
    const Group f2 = Group::free(2);
    const auto b = mtp_check(PercModel::bernoulli(f2, 0.25), f2.word("a"), 20000, 8);
    CHECK(b.z_score <= 4.0);
  }

  TEST_CASE("doubling schedule") {
    const Group z1 = Group::zd(1);
    const auto sched = doubling_schedule(z1, 2, 10);
    REQUIRE(sched.size() == 9);
    double prev = 0.0;
    for (const auto& step : sched) {
      CHECK(step.model.side() == (1 << step.index));
      CHECK(std::abs(step.p - oracle::doubling_exponent(step.index, 1)) < 1e-12);
      const double v = *phi_perc_exact(step.model, step.p, z1.coords({1}));
      const double L = step.model.side();
      CHECK(std::abs(v - (L - 1) * std::pow(L, -2.0 / step.p)) < 1e-14);
      CHECK(v > prev);
      prev = v;
    }
    CHECK(prev >= 0.85);
    CHECK(std::abs(prev - 0.8991210937500) < 1e-9);
    CHECK_THROWS_AS(doubling_schedule(z1, 1, 4), ValidationError);
  }

  TEST_CASE("theorem54 pipeline") {
    const Group z1 = Group::zd(1);
    const auto sched = doubling_schedule(z1, 2, 6);
    const auto set = *z1.ball_at_identity(2);
    const auto rep = run_schedule(z1, sched, set, 500, 7);
    REQUIRE(rep.rows.size() == 5);
    CHECK(rep.rising);
    CHECK(rep.strong_convergence_surrogate);
    for (const auto& row : rep.rows) {
      CHECK(row.psd.psd);
      CHECK(row.bounded_by_one);
      for (std::size_t i = 0; i < row.set.size(); ++i) {
        CHECK(std::abs(row.values[i].mean - *row.values[i].exact) < 1e-12);
      }
    }
    const Group z2 = Group::zd(2);
    const auto rep2 = run_schedule(z2, doubling_schedule(z2, 2, 4), *z2.ball_at_identity(1), 200, 3);
    CHECK(rep2.rising);
    const Group f2 = Group::free(2);
    const std::vector<ScheduleStep> sub = {{PercModel::bernoulli(f2, 0.25), 1.9, 1}};
    const auto rep3 = run_schedule(f2, sub, *f2.ball_at_identity(1), 2000, 11);
    REQUIRE(rep3.rows.size() == 1);
    CHECK(rep3.rows[0].values[0].mean <= 0.5);
  }
}
