#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "peakreg/analysis.hpp"
#include "peakreg/errors.hpp"

using namespace peakreg;

namespace {

SweepSetup small_setup() {
  SweepSetup s;
  s.load_shape = RectPeak{0.5, 1.0, 15.0, 180, 20.0, std::nullopt};
  s.scenario_pool = 4;
  s.scenarios_kept = 2;
  return s;
}

}  // namespace

TEST_CASE("superlinear ratio on the published daily bills") {
  const auto c = superlinear_ratio(1345.7, 1321.9, 1254.6, 1194.5);
  CHECK(c.superlinear);
  CHECK(c.q == doctest::Approx(0.026975).epsilon(1e-4));
}

TEST_CASE("superlinear ratio properties") {
  // Savings exactly add up: not superlinear.
  const auto flat = superlinear_ratio(100.0, 90.0, 80.0, 70.0);
  CHECK(flat.q == doctest::Approx(0.0).scale(1.0));
  CHECK_FALSE(flat.superlinear);

  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int i = 0; i < 1000; ++i) {
    const double j = 1000.0 * u(rng), jp = j * (0.8 + 0.2 * u(rng)), jr = j * (0.8 + 0.2 * u(rng)),
                 jj = j * 0.7 * u(rng);
    const auto c = superlinear_ratio(j, jp, jr, jj);
    const double gap = (j - jj) - ((j - jr) + (j - jp));
    CHECK(c.q == doctest::Approx(gap / j).epsilon(1e-12));
    CHECK(c.superlinear == (gap > 0.0));
    CHECK(c.j_joint == jj);
  }
  CHECK_THROWS_AS(superlinear_ratio(0.0, 1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(superlinear_ratio(1.0, std::nan(""), 1.0, 1.0), DomainError);
}

TEST_CASE("peak duration cdf") {
  SUBCASE("two runs") {
    const TimeSeries load(4.0, {1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0});
    const auto d = peak_duration_cdf(load, 0.95);
    REQUIRE(d.durations_seconds.size() == 3);
    CHECK(d.durations_seconds[0] == 4.0);
    CHECK(d.durations_seconds[1] == 8.0);
    CHECK(d.durations_seconds[2] == 12.0);
    REQUIRE(d.cdf.size() == 3);
    CHECK(d.cdf.back().second == 1.0);
  }
  SUBCASE("constant load is one run") {
    const auto d = peak_duration_cdf(TimeSeries::constant(4.0, 10, 0.7));
    REQUIRE(d.durations_seconds.size() == 1);
    CHECK(d.durations_seconds[0] == 40.0);
  }
  SUBCASE("run-length oracle") {
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> v(200);
      for (auto& x : v) x = u(rng);
      const double level = 0.9 * *std::max_element(v.begin(), v.end());
      std::vector<double> runs;
      std::size_t i = 0;
      while (i < v.size()) {
        if (v[i] < level) {
          ++i;
          continue;
        }
        std::size_t j = i;
        while (j < v.size() && v[j] >= level) ++j;
        runs.push_back(static_cast<double>(j - i) * 2.0);
        i = j;
      }
      std::sort(runs.begin(), runs.end());
      const auto d = peak_duration_cdf(TimeSeries(2.0, v), 0.9);
      CHECK(d.durations_seconds == runs);
      double prev = 0.0;
      for (const auto& [len, p] : d.cdf) {
        const double below = static_cast<double>(std::upper_bound(runs.begin(), runs.end(), len) - runs.begin());
        CHECK(p == doctest::Approx(below / static_cast<double>(runs.size())).epsilon(1e-12));
        CHECK(p > prev);
        prev = p;
      }
    }
  }
  CHECK_THROWS_AS(peak_duration_cdf(TimeSeries::constant(4.0, 3, 1.0), 0.0), DomainError);
}

TEST_CASE("life expectancy") {
  CellParams cell;
  const auto life = life_expectancy(120.0, cell, 1.0);
  CHECK(life.years == doctest::Approx(2.0 * 10000 * 0.6 / 120.0).epsilon(1e-12));
  CHECK_FALSE(life.infinite);
  const auto idle = life_expectancy(0.0, cell, 1.0);
  CHECK(idle.infinite);
  CHECK(std::isinf(idle.years));
  CHECK(life_expectancy(60.0, cell, 1.0).years == doctest::Approx(2.0 * life.years));
  CHECK_THROWS_AS(life_expectancy(-1.0, cell, 1.0), DomainError);
  CHECK_THROWS_AS(life_expectancy(1.0, cell, 0.0), DomainError);
}

TEST_CASE("a single sweep cell equals a scripted run") {
  auto setup = small_setup();
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const auto cells = sensitivity_sweep(setup, SweepAxis::kPeakCharge, {0.4}, {20.0}, seeds, 1);
  REQUIRE(cells.size() == 1);

  CellParams cell = setup.cell;
  cell.lambda_cell_usd_per_wh = 0.4;
  setup.battery.lambda_b_usd_per_mwh = lambda_b_from_cell(cell);
  setup.tariff.lambda_peak_usd_per_kw_month = 20.0;
  std::size_t superlinear = 0;
  double q = 0.0;
  for (auto seed : seeds) {
    const auto out = compare_day(synthetic_day(setup, seed));
    superlinear += out.comparison.superlinear;
    q += out.comparison.q / 3.0;
  }
  CHECK(cells[0].runs == 3);
  CHECK(cells[0].failures == 0);
  CHECK(cells[0].superlinear == superlinear);
  CHECK(cells[0].mean_q == doctest::Approx(q).epsilon(1e-12));
}

TEST_CASE("sweep results do not depend on the worker count") {
  const auto setup = small_setup();
  const std::vector<double> lc{0.3, 0.6}, lcap{0.0, 40.0};
  const std::vector<std::uint64_t> seeds{4, 5};
  const auto one = sensitivity_sweep(setup, SweepAxis::kCapacityPayment, lc, lcap, seeds, 1);
  const auto three = sensitivity_sweep(setup, SweepAxis::kCapacityPayment, lc, lcap, seeds, 3);
  REQUIRE(one.size() == 4);
  REQUIRE(three.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(one[i].lambda_cell == three[i].lambda_cell);
    CHECK(one[i].second == three[i].second);
    CHECK(one[i].superlinear == three[i].superlinear);
    CHECK(one[i].mean_q == three[i].mean_q);
  }
  CHECK(one[1].lambda_cell == 0.3);
  CHECK(one[1].second == 40.0);
}

TEST_CASE("comparison of one synthetic day") {
  const auto day = synthetic_day(small_setup(), 7);
  CHECK(day.tariff.lambda_mis_usd_per_mwh == doctest::Approx(2.0 * day.battery.lambda_b_usd_per_mwh));
  CHECK(day.scenarios.size() == 2);
  const auto out = compare_day(day);
  // Each offline benchmark can idle, so neither costs more than the original bill.
  CHECK(out.peak_only.bill.total <= out.original.total + 1e-9);
  CHECK(out.reg_bill.total <= out.original.total + 1e-9);
  CHECK(out.comparison.j_original == out.original.total);
  CHECK(out.comparison.j_joint == out.joint.realized_bill.total);
  CHECK(out.joint.dispatch.size() == day.load.size());
}
