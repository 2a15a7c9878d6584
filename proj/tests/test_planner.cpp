#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "peakreg/benchmarks.hpp"
#include "peakreg/errors.hpp"
#include "peakreg/lp.hpp"
#include "peakreg/planner.hpp"
#include "peakreg/scenarios.hpp"

using namespace peakreg;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// 2-minute windows keep the instances small.
Tariff short_window() {
  Tariff t;
  t.peak_window_seconds = 120.0;
  return t;
}

TimeSeries bumpy_load(std::size_t n, std::uint64_t seed) {
  const auto noise = gen_trunc_gauss(n, 4.0, 0.05, -1.0, 1.0, seed);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (i >= n / 3 && i < n / 2 ? 1.0 : 0.5) + 0.1 * noise[i];
  return TimeSeries(4.0, v);
}

ScenarioSet scenario_set(std::size_t n, std::size_t length, std::uint64_t seed) {
  std::vector<TimeSeries> s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(gen_trunc_gauss(length, 4.0, 0.12, -1.0, 1.0, seed + i));
  ScenarioSet set = ScenarioSet::uniform(std::move(s));
  if (n == 3) set.weights = {0.5, 0.3, 0.2};
  return set;
}

// The same stochastic program assembled differently: signed SoC bookkeeping is
// replaced by cumulative-sum rows, mismatch by explicit inequality pairs and
// the demand charge by one row per window against a free-standing peak
// variable.
double monolithic_objective(const TimeSeries& forecast, const ScenarioSet& set, const Tariff& t,
                            const BatterySpec& spec, double soc_ini) {
  using namespace lp;
  const std::size_t n = forecast.size();
  const double h = forecast.step_hours();
  const std::size_t w = t.window_steps(forecast.step_seconds());
  LinearProgram p;
  double constant = 0.0;
  for (std::size_t i = 0; i < n; ++i) constant += t.lambda_elec_usd_per_mwh * forecast[i] * h;
  p.add_objective_offset(constant);
  const int peak = p.add_variable(0.0, kInf, t.peak_usd_per_mw_day() * forecast.duration_seconds() / 86400.0);
  const int cap = p.add_variable(0.0, spec.p_max_mw, -t.lambda_c_usd_per_mw_h * forecast.duration_seconds() / 3600.0);
  std::vector<std::vector<Term>> window_terms(n / w);
  std::vector<double> window_load(n / w, 0.0);
  for (std::size_t i = 0; i < n; ++i) window_load[i / w] += forecast[i] / static_cast<double>(w);
  for (std::size_t k = 0; k < set.size(); ++k) {
    const double om = set.weights[k];
    std::vector<Term> level;
    for (std::size_t i = 0; i < n; ++i) {
      const int dc = p.add_variable(0.0, spec.p_max_mw, om * (spec.lambda_b_usd_per_mwh - t.lambda_elec_usd_per_mwh) * h);
      const int ch = p.add_variable(0.0, spec.p_max_mw, om * (spec.lambda_b_usd_per_mwh + t.lambda_elec_usd_per_mwh) * h);
      const int mis = p.add_variable(0.0, kInf, om * t.lambda_mis_usd_per_mwh * h);
      level.push_back({ch, spec.eta_c * h / spec.energy_mwh});
      level.push_back({dc, -h / (spec.eta_d * spec.energy_mwh)});
      p.add_row(level, Relation::kGreaterEqual, spec.soc_min - soc_ini);
      p.add_row(level, Relation::kLessEqual, spec.soc_max - soc_ini);
      const double r = set.scenarios[k][i];
      p.add_row({{mis, 1.0}, {dc, -1.0}, {ch, 1.0}, {cap, r}}, Relation::kGreaterEqual, 0.0);
      p.add_row({{mis, 1.0}, {dc, 1.0}, {ch, -1.0}, {cap, -r}}, Relation::kGreaterEqual, 0.0);
      window_terms[i / w].push_back({dc, om / static_cast<double>(w)});
      window_terms[i / w].push_back({ch, -om / static_cast<double>(w)});
    }
  }
  for (std::size_t j = 0; j < window_terms.size(); ++j) {
    auto terms = window_terms[j];
    terms.push_back({peak, 1.0});
    p.add_row(terms, Relation::kGreaterEqual, window_load[j]);
  }
  const auto sol = solve(p);
  REQUIRE(sol.status == Status::kOptimal);
  return sol.objective_value;
}

}  // namespace

TEST_CASE("an idle signal turns the plan into peak shaving with mismatch priced as wear") {
  // The reported baseline is the forecast, so with r = 0 every MW the battery
  // moves is mismatch: the plan is peak shaving at lambda_b + lambda_mis.
  Tariff t = short_window();
  t.lambda_c_usd_per_mw_h = 0.0;
  BatterySpec spec;
  const auto load = bumpy_load(180, 4);
  const ScenarioSet idle = ScenarioSet::uniform({TimeSeries::constant(4.0, 180, 0.0)});
  DayAheadPlanner planner(load, idle, t, spec, 0.5);
  const auto& plan = planner.solve();
  BatterySpec priced = spec;
  priced.lambda_b_usd_per_mwh += t.lambda_mis_usd_per_mwh;
  const auto peak = solve_peak_shaving(load, t, priced, 0.5);
  CHECK(plan.capacity_mw == doctest::Approx(0.0));
  CHECK(rel(plan.planned_objective, peak.lp_objective) <= 1e-6);
  const auto net = difference(load, plan.scenario_dispatch[0]);
  CHECK(plan.threshold_mw == doctest::Approx(std::max(0.0, smoothed_peak(net, t))).epsilon(1e-9));
}

TEST_CASE("without capacity payment or mismatch price the plan is peak shaving") {
  Tariff t = short_window();
  t.lambda_c_usd_per_mw_h = 0.0;
  t.lambda_mis_usd_per_mwh = 0.0;
  BatterySpec spec;
  for (std::uint64_t seed : {4u, 5u}) {
    const auto load = bumpy_load(180, seed);
    const auto plan = solve_day_ahead(load, ScenarioSet::uniform({TimeSeries::constant(4.0, 180, 0.0)}), t, spec, 0.5);
    const auto peak = solve_peak_shaving(load, t, spec, 0.5);
    CHECK(plan.capacity_mw == doctest::Approx(0.0));
    CHECK(rel(plan.planned_objective, peak.lp_objective) <= 1e-6);
    CHECK(rel(plan.planned_objective, peak.bill.total) <= 1e-6);
    CHECK(plan.threshold_mw == doctest::Approx(std::max(0.0, smoothed_peak(difference(load, peak.dispatch), t))).epsilon(1e-6));
  }
}

TEST_CASE("no battery reproduces the original forecast bill") {
  Tariff t = short_window();
  BatterySpec spec;
  spec.p_max_mw = 0.0;
  const auto load = bumpy_load(180, 5);
  const auto plan = solve_day_ahead(load, scenario_set(3, 180, 50), t, spec, 0.5);
  const auto original = total_bill(load, TimeSeries::constant(4.0, 180, 0.0), std::nullopt, t, 83.0);
  CHECK(plan.capacity_mw == 0.0);
  CHECK(plan.threshold_mw == doctest::Approx(smoothed_peak(load, t)).epsilon(1e-12));
  CHECK(plan.planned_objective == doctest::Approx(original.total).epsilon(1e-12));
}

TEST_CASE("zero battery on a flat load sets the threshold to the load") {
  Tariff t = short_window();
  BatterySpec spec;
  spec.p_max_mw = 0.0;
  const auto plan = solve_day_ahead(TimeSeries::constant(4.0, 60, 1.0), scenario_set(2, 60, 9), t, spec, 0.5);
  CHECK(plan.threshold_mw == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("three-scenario plan matches an independently assembled program") {
  Tariff t = short_window();
  BatterySpec spec;
  for (std::uint64_t seed : {11u, 12u}) {
    const auto load = bumpy_load(180, seed);
    const auto set = scenario_set(3, 180, seed * 10);
    DayAheadPlanner planner(load, set, t, spec, 0.5);
    const auto& plan = planner.solve();
    CHECK(rel(plan.planned_objective, monolithic_objective(load, set, t, spec, 0.5)) <= 1e-6);
    // Threshold read back from the dispatch equals the epigraph value.
    CHECK(std::abs(planner.extract_threshold() - planner.epigraph_value()) <= 1e-9);
    CHECK(plan.threshold_mw >= 0.0);
    CHECK(plan.capacity_mw >= 0.0);
    REQUIRE(plan.scenario_dispatch.size() == 3);
    for (const auto& b : plan.scenario_dispatch) {
      BatteryState s{0.5};
      for (std::size_t i = 0; i < b.size(); ++i) {
        CHECK(std::abs(b[i]) <= spec.p_max_mw + 1e-9);
        s = step_signed(s, std::clamp(b[i], -spec.p_max_mw, spec.p_max_mw), 4.0, spec);
        CHECK(s.soc >= spec.soc_min - 1e-9);
        CHECK(s.soc <= spec.soc_max + 1e-9);
        s.soc = std::clamp(s.soc, spec.soc_min, spec.soc_max);
      }
    }
  }
}

TEST_CASE("joint plan is no worse than its single-application restrictions") {
  Tariff t = short_window();
  BatterySpec spec;
  const auto load = bumpy_load(120, 21);
  const auto set = scenario_set(2, 120, 70);
  const double joint = solve_day_ahead(load, set, t, spec, 0.5).planned_objective;
  PlannerOptions no_reg;
  no_reg.fixed_capacity_mw = 0.0;
  const double peak_only = DayAheadPlanner(load, set, t, spec, 0.5, no_reg).solve().planned_objective;
  CHECK(joint <= peak_only + 1e-9);
  for (double c : {0.25, 0.5, 1.0}) {
    PlannerOptions fixed;
    fixed.fixed_capacity_mw = c;
    CHECK(joint <= DayAheadPlanner(load, set, t, spec, 0.5, fixed).solve().planned_objective + 1e-9);
  }
}

TEST_CASE("downsampling gives a bounded approximation gap") {
  Tariff t = short_window();
  BatterySpec spec;
  std::vector<double> v(180);
  std::vector<double> r(180);
  for (std::size_t i = 0; i < 180; ++i) {
    v[i] = 0.7 + 0.3 * std::sin(2.0 * M_PI * static_cast<double>(i) / 180.0);
    r[i] = 0.5 * std::sin(2.0 * M_PI * static_cast<double>(i) / 45.0);
  }
  const TimeSeries load(4.0, v);
  const auto set = ScenarioSet::uniform({TimeSeries(4.0, r)});
  const double fine = solve_day_ahead(load, set, t, spec, 0.5, 1).planned_objective;
  const double coarse = solve_day_ahead(load, set, t, spec, 0.5, 2).planned_objective;
  MESSAGE("downsample 1 vs 2 objective gap: " << std::abs(fine - coarse) / std::abs(fine));
  CHECK(std::abs(fine - coarse) <= 0.02 * std::abs(fine));
}

TEST_CASE("planner state and input errors") {
  Tariff t = short_window();
  BatterySpec spec;
  const auto load = bumpy_load(60, 2);
  DayAheadPlanner planner(load, scenario_set(2, 60, 3), t, spec, 0.5);
  CHECK_FALSE(planner.solved());
  CHECK_THROWS_AS(planner.plan(), StateError);
  CHECK_THROWS_AS(planner.extract_threshold(), StateError);
  CHECK_THROWS_AS(planner.epigraph_value(), StateError);
  planner.solve();
  CHECK(planner.solved());
  CHECK_THROWS_AS(DayAheadPlanner(load, scenario_set(2, 61, 3), t, spec, 0.5), AlignmentError);
  // 30 s blocks do not divide the 2-minute window into whole steps of 4 s.
  PlannerOptions odd;
  odd.downsample = 7;
  CHECK_THROWS(DayAheadPlanner(load, scenario_set(2, 60, 3), t, spec, 0.5, odd));
  CHECK_THROWS_AS(DayAheadPlanner(load, scenario_set(2, 60, 3), t, spec, 0.9), DomainError);
}
