#include <cmath>
#include <random>

#include "doctest.h"
#include "peakreg/billing.hpp"
#include "peakreg/errors.hpp"

using namespace peakreg;

namespace {

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

Tariff flat_tariff() {
  Tariff t;
  t.peak_window_seconds = 8.0;
  return t;
}

}  // namespace

TEST_CASE("time series rejects bad construction") {
  CHECK_THROWS_AS(TimeSeries(0.0, {1.0}), DomainError);
  CHECK_THROWS_AS(TimeSeries(4.0, {}), DomainError);
  CHECK_THROWS_AS(TimeSeries(4.0, {1.0, NAN}), DomainError);
  const TimeSeries a(4.0, {1, 2});
  CHECK_THROWS_AS(require_aligned(a, TimeSeries(2.0, {1, 2}), "x"), AlignmentError);
  CHECK_THROWS_AS(difference(a, TimeSeries(4.0, {1, 2, 3})), AlignmentError);
}

TEST_CASE("smooth examples") {
  CHECK(smooth(TimeSeries(4.0, {1, 1, 1, 1}), 2).vector() == std::vector<double>{1, 1});
  const auto s = smooth(TimeSeries(4.0, {0, 0, 4, 4}), 4);
  CHECK(s.vector() == std::vector<double>{2});
  CHECK(s.step_seconds() == 16.0);
  CHECK_THROWS_AS(smooth(TimeSeries(4.0, {1, 2, 3}), 2), AlignmentError);
  CHECK_THROWS_AS(smooth(TimeSeries(4.0, {1, 2}), 0), DomainError);
}

TEST_CASE("smooth matches per-window summation") {
  std::mt19937_64 rng(11);
  const auto v = random_values(rng, 8, -2.0, 3.0);
  const auto s = smooth(TimeSeries(4.0, v), 2);
  REQUIRE(s.size() == 4);
  for (std::size_t w = 0; w < 4; ++w) CHECK(s[w] == doctest::Approx((v[2 * w] + v[2 * w + 1]) / 2.0).epsilon(1e-15));
}

TEST_CASE("smooth is linear") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_values(rng, 24, -5.0, 5.0);
    const auto y = random_values(rng, 24, -5.0, 5.0);
    const double a = 1.7, b = -0.4;
    std::vector<double> z(24);
    for (int i = 0; i < 24; ++i) z[i] = a * x[i] + b * y[i];
    const auto sx = smooth(TimeSeries(4.0, x), 6), sy = smooth(TimeSeries(4.0, y), 6);
    const auto sz = smooth(TimeSeries(4.0, z), 6);
    for (std::size_t w = 0; w < sz.size(); ++w) {
      CHECK(sz[w] == doctest::Approx(a * sx[w] + b * sy[w]).epsilon(1e-12));
    }
  }
}

TEST_CASE("energy charge examples") {
  Tariff t;
  CHECK(energy_charge(TimeSeries::constant(4.0, 10, 0.0), t) == 0.0);
  CHECK(energy_charge(TimeSeries::constant(3600.0, 24, 1.0), t) == doctest::Approx(1128.0).epsilon(1e-12));
  CHECK(energy_charge(TimeSeries(4.0, {0.5, 0.5}), t) == doctest::Approx(47.0 * 0.5 * 8.0 / 3600.0).epsilon(1e-12));
  // Export is priced symmetrically.
  CHECK(energy_charge(TimeSeries(4.0, {-0.5, -0.5}), t) == doctest::Approx(-47.0 * 0.5 * 8.0 / 3600.0));
}

TEST_CASE("energy charge is additive over concatenation") {
  std::mt19937_64 rng(13);
  Tariff t;
  const auto a = random_values(rng, 17, -1.0, 2.0);
  const auto b = random_values(rng, 9, -1.0, 2.0);
  auto ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  CHECK(energy_charge(TimeSeries(4.0, ab), t) ==
        doctest::Approx(energy_charge(TimeSeries(4.0, a), t) + energy_charge(TimeSeries(4.0, b), t)).epsilon(1e-12));
}

TEST_CASE("peak charge examples") {
  Tariff t;
  CHECK(peak_charge(TimeSeries::constant(4.0, 21600, 1.0), t, 1.0) == doctest::Approx(400.0).epsilon(1e-12));
  CHECK(peak_charge(TimeSeries::constant(4.0, 21600, 0.0), t, 1.0) == 0.0);
  std::vector<double> v(21600, 0.5);
  for (std::size_t i = 225 * 10; i < 225 * 11; ++i) v[i] = 1.2;
  CHECK(peak_charge(TimeSeries(4.0, v), t, 1.0) == doctest::Approx(480.0).epsilon(1e-12));
  // Floor at zero.
  CHECK(peak_charge(TimeSeries::constant(4.0, 225, -1.0), t, 1.0) == 0.0);
  CHECK(smoothed_peak(TimeSeries::constant(4.0, 225, -1.0), t) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(peak_charge(TimeSeries::constant(4.0, 100, 1.0), t, 1.0), AlignmentError);
}

TEST_CASE("peak charge is monotone in the load") {
  std::mt19937_64 rng(14);
  const Tariff t = flat_tariff();
  std::uniform_real_distribution<double> bump(0.0, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    auto v = random_values(rng, 20, -1.0, 2.0);
    const double before = peak_charge(TimeSeries(4.0, v), t, 1.0);
    for (auto& x : v) x += bump(rng);
    CHECK(peak_charge(TimeSeries(4.0, v), t, 1.0) >= before);
  }
}

TEST_CASE("bill assembler reproduces the published original-bill row") {
  const auto b = BillBreakdown::assemble(884.2, 461.5, 0.0, 0.0);
  CHECK(b.total == doctest::Approx(1345.7).epsilon(1e-9));
}

TEST_CASE("total bill with zero prices is zero") {
  Tariff t;
  t.lambda_elec_usd_per_mwh = t.lambda_peak_usd_per_kw_month = t.lambda_c_usd_per_mw_h = t.lambda_mis_usd_per_mwh = 0.0;
  const auto load = TimeSeries::constant(4.0, 450, 0.8);
  const auto b = total_bill(load, TimeSeries::constant(4.0, 450, 0.0), std::nullopt, t, 0.0);
  CHECK(b.total == 0.0);
}

TEST_CASE("total bill equals a component-wise oracle") {
  std::mt19937_64 rng(15);
  Tariff t;
  const std::size_t n = 450;  // two 15-minute windows
  const auto s = random_values(rng, n, 0.3, 1.5);
  const auto b = random_values(rng, n, -1.0, 1.0);
  const auto r = random_values(rng, n, -1.0, 1.0);
  const auto y = random_values(rng, n, 0.3, 1.5);
  const double h = 4.0 / 3600.0, lambda_b = 83.0, cap = 0.6;

  double energy = 0.0, wear = 0.0, mis_plain = 0.0, mis_base = 0.0, w0 = 0.0, w1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    energy += t.lambda_elec_usd_per_mwh * (s[i] - b[i]) * h;
    wear += lambda_b * std::abs(b[i]) * h;
    mis_plain += std::abs(b[i] - cap * r[i]) * h;
    mis_base += std::abs(-s[i] + b[i] + y[i] - cap * r[i]) * h;
    (i < 225 ? w0 : w1) += (s[i] - b[i]) / 225.0;
  }
  const double peak = 400.0 * (450 * 4.0 / 86400.0) * std::max({w0, w1, 0.0});
  const double capacity = t.lambda_c_usd_per_mw_h * cap * n * h;

  const TimeSeries load(4.0, s), power(4.0, b), signal(4.0, r), baseline(4.0, y);
  const auto plain = total_bill(load, power, RegulationOutcome{cap, signal, std::nullopt}, t, lambda_b);
  CHECK(plain.energy_charge == doctest::Approx(energy).epsilon(1e-12));
  CHECK(plain.peak_charge == doctest::Approx(peak).epsilon(1e-12));
  CHECK(plain.battery_cost == doctest::Approx(wear).epsilon(1e-12));
  CHECK(plain.regulation_revenue == doctest::Approx(capacity - t.lambda_mis_usd_per_mwh * mis_plain).epsilon(1e-12));
  CHECK(plain.total == doctest::Approx(energy + peak + wear - capacity + t.lambda_mis_usd_per_mwh * mis_plain).epsilon(1e-12));

  const auto reported = total_bill(load, power, RegulationOutcome{cap, signal, baseline}, t, lambda_b);
  CHECK(reported.regulation_revenue == doctest::Approx(capacity - t.lambda_mis_usd_per_mwh * mis_base).epsilon(1e-12));
  CHECK(mismatch_energy(load, power, RegulationOutcome{cap, signal, baseline}) == doctest::Approx(mis_base).epsilon(1e-12));

  CHECK_THROWS_AS(total_bill(load, TimeSeries::constant(4.0, n - 1, 0.0), std::nullopt, t, lambda_b), AlignmentError);
}

TEST_CASE("breakdown identity holds for every bill") {
  std::mt19937_64 rng(16);
  const Tariff t = flat_tariff();
  for (int trial = 0; trial < 50; ++trial) {
    const TimeSeries load(4.0, random_values(rng, 12, 0.0, 2.0));
    const TimeSeries power(4.0, random_values(rng, 12, -1.0, 1.0));
    const TimeSeries signal(4.0, random_values(rng, 12, -1.0, 1.0));
    const auto b = total_bill(load, power, RegulationOutcome{0.4, signal, std::nullopt}, t, 83.0);
    CHECK(b.total == doctest::Approx(b.energy_charge + b.peak_charge + b.battery_cost - b.regulation_revenue)
                         .epsilon(1e-9));
  }
}

TEST_CASE("bill is convex in the battery profile") {
  std::mt19937_64 rng(17);
  const Tariff t = flat_tariff();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const TimeSeries load(4.0, random_values(rng, 24, 0.2, 1.8));
  const TimeSeries signal(4.0, random_values(rng, 24, -1.0, 1.0));
  const TimeSeries baseline(4.0, random_values(rng, 24, 0.2, 1.8));
  for (int pair = 0; pair < 100; ++pair) {
    const auto b1 = random_values(rng, 24, -1.0, 1.0);
    const auto b2 = random_values(rng, 24, -1.0, 1.0);
    const double theta = unit(rng);
    std::vector<double> mix(24);
    for (int i = 0; i < 24; ++i) mix[i] = theta * b1[i] + (1.0 - theta) * b2[i];
    const RegulationOutcome reg{0.5, signal, baseline};
    auto bill = [&](const std::vector<double>& b) { return total_bill(load, TimeSeries(4.0, b), reg, t, 83.0).total; };
    CHECK(bill(mix) <= theta * bill(b1) + (1.0 - theta) * bill(b2) + 1e-9);
  }
}

TEST_CASE("tariff validation and proration") {
  Tariff t;
  CHECK(t.peak_usd_per_mw_day() == doctest::Approx(400.0));
  CHECK(t.window_steps(4.0) == 225);
  CHECK_THROWS_AS(t.window_steps(7.0), AlignmentError);
  CHECK(t.demand_days(43200.0) == doctest::Approx(0.5));
  t.billing_days = 1.0;
  CHECK(t.demand_days(43200.0) == 1.0);
  t.lambda_c_usd_per_mw_h = -1.0;
  CHECK_THROWS_AS(t.validate(), ValidationError);
}
