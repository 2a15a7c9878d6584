#include "peakreg/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include "peakreg/errors.hpp"

namespace peakreg {

DailyComparison superlinear_ratio(double j, double j_peak_only, double j_reg_only, double j_joint) {
  for (double v : {j, j_peak_only, j_reg_only, j_joint}) {
    if (!std::isfinite(v)) throw DomainError("bill values must be finite");
  }
  if (j == 0.0) throw DomainError("original bill is zero; the saving ratio is undefined");
  const double joint_saving = j - j_joint;
  const double separate_savings = (j - j_reg_only) + (j - j_peak_only);
  DailyComparison out{j, j_peak_only, j_reg_only, j_joint, joint_saving > separate_savings,
                      (joint_saving - separate_savings) / j};
  return out;
}

DayOutcome compare_day(const DayInputs& in) {
  require_aligned(in.load, in.signal, "compare_day");
  const TimeSeries idle = TimeSeries::constant(in.load.step_seconds(), in.load.size(), 0.0);
  const BillBreakdown original =
      total_bill(in.load, idle, std::nullopt, in.tariff, in.battery.lambda_b_usd_per_mwh);
  PeakShaveResult peak_only = solve_peak_shaving(in.load, in.tariff, in.battery, in.soc_ini);
  RegulationResult reg_only = solve_regulation(in.signal, in.tariff, in.battery, in.soc_ini);
  const BillBreakdown reg_bill = bill_with_regulation(in.load, reg_only, in.tariff, in.battery);
  PlannerOptions options;
  options.downsample = in.downsample;
  DayAheadPlanner planner(in.forecast.value_or(in.load), in.scenarios, in.tariff, in.battery,
                          in.soc_ini, options);
  DayAheadPlan plan = planner.solve();
  SimulationTrace joint = simulate_day(in.load, in.signal, plan, in.battery, in.tariff, in.soc_ini, in.forecast);
  const DailyComparison comparison =
      superlinear_ratio(original.total, peak_only.bill.total, reg_bill.total, joint.realized_bill.total);
  DayOutcome out{comparison, original,         std::move(peak_only), std::move(reg_only),
                 reg_bill,   std::move(plan), std::move(joint)};
  return out;
}

PeakDurations peak_duration_cdf(const TimeSeries& load, double threshold_fraction) {
  if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0)) {
    throw DomainError("threshold fraction must lie in (0, 1]");
  }
  const auto v = load.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  PeakDurations out;
  if (*lo == *hi) {
    out.durations_seconds.push_back(load.duration_seconds());
  } else {
    const double level = threshold_fraction * *hi;
    std::size_t run = 0;
    for (std::size_t t = 0; t <= v.size(); ++t) {
      if (t < v.size() && v[t] >= level) {
        ++run;
      } else if (run > 0) {
        out.durations_seconds.push_back(static_cast<double>(run) * load.step_seconds());
        run = 0;
      }
    }
    std::sort(out.durations_seconds.begin(), out.durations_seconds.end());
  }
  const double n = static_cast<double>(out.durations_seconds.size());
  for (std::size_t i = 0; i < out.durations_seconds.size(); ++i) {
    // Collapse equal durations onto their last (highest) CDF level.
    if (i + 1 < out.durations_seconds.size() && out.durations_seconds[i + 1] == out.durations_seconds[i]) continue;
    out.cdf.emplace_back(out.durations_seconds[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

LifeExpectancy life_expectancy(double annual_throughput_mwh, const CellParams& cell,
                               double energy_capacity_mwh) {
  if (annual_throughput_mwh < 0.0 || !(energy_capacity_mwh > 0.0) || cell.cycles <= 0 ||
      !(cell.dod_window > 0.0)) {
    throw DomainError("life expectancy needs positive cell parameters and capacity");
  }
  if (annual_throughput_mwh == 0.0) return {std::numeric_limits<double>::infinity(), true};
  const double budget = 2.0 * cell.cycles * cell.dod_window * energy_capacity_mwh;
  return {budget / annual_throughput_mwh, false};
}

DayInputs synthetic_day(const SweepSetup& setup, std::uint64_t seed) {
  const auto& shape = setup.load_shape;
  TimeSeries load = gen_rect_peak(shape);
  TimeSeries signal = gen_trunc_gauss(shape.length, shape.step_seconds, setup.sigma2, -1.0, 1.0, seed);
  if (setup.scenarios_kept == 0 || setup.scenarios_kept > setup.scenario_pool) {
    throw DomainError("scenarios_kept must lie in [1, scenario_pool]");
  }
  std::vector<TimeSeries> pool;
  for (std::size_t k = 0; k < setup.scenario_pool; ++k) {
    pool.push_back(gen_trunc_gauss(shape.length, shape.step_seconds, setup.sigma2, -1.0, 1.0,
                                   seed * 1000003ULL + k + 1));
  }
  const ScenarioSet full = ScenarioSet::uniform(std::move(pool));
  ScenarioSet scenarios = forward_reduce(full, setup.scenarios_kept).apply(full);
  DayInputs day{std::move(load), std::move(signal), std::move(scenarios), std::nullopt,
                setup.tariff, setup.battery, setup.soc_ini, setup.downsample};
  if (setup.mis_to_degradation) {
    day.tariff.lambda_mis_usd_per_mwh = *setup.mis_to_degradation * day.battery.lambda_b_usd_per_mwh;
  }
  return day;
}

namespace {

std::size_t worker_count(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PEAKREG_WORKERS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<std::size_t>(n);
  }
  return 1;
}

}  // namespace

std::vector<SweepCell> sensitivity_sweep(const SweepSetup& setup, SweepAxis axis,
                                         const std::vector<double>& lambda_cells,
                                         const std::vector<double>& seconds,
                                         const std::vector<std::uint64_t>& seeds,
                                         std::size_t workers) {
  std::vector<SweepCell> cells;
  for (double lc : lambda_cells) {
    for (double second : seconds) cells.push_back({lc, second});
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      SweepCell& cell = cells[c];
      SweepSetup local = setup;
      CellParams params = setup.cell;
      params.lambda_cell_usd_per_wh = cell.lambda_cell;
      local.battery.lambda_b_usd_per_mwh = lambda_b_from_cell(params);
      if (axis == SweepAxis::kPeakCharge) {
        local.tariff.lambda_peak_usd_per_kw_month = cell.second;
      } else {
        local.tariff.lambda_c_usd_per_mw_h = cell.second;
      }
      double q_sum = 0.0;
      for (std::uint64_t seed : seeds) {
        ++cell.runs;
        try {
          const auto outcome = compare_day(synthetic_day(local, seed));
          if (outcome.comparison.superlinear) ++cell.superlinear;
          q_sum += outcome.comparison.q;
        } catch (const SolverError&) {
          ++cell.failures;
        }
      }
      const std::size_t ok = cell.runs - cell.failures;
      if (ok > 0) {
        cell.probability = static_cast<double>(cell.superlinear) / static_cast<double>(ok);
        cell.mean_q = q_sum / static_cast<double>(ok);
      }
    }
  };
  const std::size_t n = std::min(worker_count(workers), std::max<std::size_t>(cells.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return cells;
}

}  // namespace peakreg
