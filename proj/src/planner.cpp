#include "peakreg/planner.hpp"

#include <algorithm>
#include <string>

#include "dispatch_lp.hpp"
#include "peakreg/errors.hpp"

namespace peakreg {

namespace {

TimeSeries block_average(const TimeSeries& series, std::size_t factor) {
  return factor == 1 ? series : smooth(series, factor);
}

ScenarioSet block_average(const ScenarioSet& set, std::size_t factor) {
  ScenarioSet out{{}, set.weights};
  for (const auto& s : set.scenarios) out.scenarios.push_back(block_average(s, factor));
  return out;
}

}  // namespace

DayAheadPlanner::DayAheadPlanner(TimeSeries forecast, ScenarioSet scenarios, Tariff tariff,
                                 BatterySpec spec, double soc_ini, PlannerOptions options)
    : forecast_(std::move(forecast)),
      scenarios_(std::move(scenarios)),
      tariff_(std::move(tariff)),
      spec_(spec),
      soc_ini_(soc_ini),
      options_(options) {
  tariff_.validate();
  spec_.validate();
  scenarios_.validate();
  detail::require_soc(soc_ini_, spec_);
  for (const auto& s : scenarios_.scenarios) require_aligned(forecast_, s, "day-ahead planner");
  if (options_.downsample == 0) throw DomainError("downsample factor must be at least 1");
  if (options_.fixed_capacity_mw && *options_.fixed_capacity_mw < 0.0) {
    throw DomainError("capacity must be non-negative");
  }
  // Validate the window against the original step before averaging.
  tariff_.window_steps(forecast_.step_seconds());
  forecast_ = block_average(forecast_, options_.downsample);
  scenarios_ = block_average(scenarios_, options_.downsample);
  window_steps_ = tariff_.window_steps(forecast_.step_seconds());
  build();
}

void DayAheadPlanner::build() {
  const std::size_t steps = forecast_.size();
  const double hours = forecast_.step_hours();
  const double horizon_hours = forecast_.duration_seconds() / 3600.0;
  const TimeSeries smoothed = smooth(forecast_, window_steps_);

  double c_lo = 0.0;
  double c_hi = spec_.p_max_mw;
  if (options_.fixed_capacity_mw) c_lo = c_hi = *options_.fixed_capacity_mw;
  capacity_var_ = program_.add_variable(c_lo, c_hi, -tariff_.lambda_c_usd_per_mw_h * horizon_hours, "C");
  program_.add_objective_offset(energy_charge(forecast_, tariff_));

  std::vector<lp::AffineExpr> windows(smoothed.size());
  for (std::size_t w = 0; w < windows.size(); ++w) windows[w].constant = smoothed[w];
  const double share = 1.0 / static_cast<double>(window_steps_);

  for (std::size_t i = 0; i < scenarios_.size(); ++i) {
    const double omega = scenarios_.weights[i];
    const auto battery = detail::add_battery(program_, steps, forecast_.step_seconds(), spec_, soc_ini_, omega);
    detail::add_mismatch(program_, battery, capacity_var_, scenarios_.scenarios[i],
                         omega * tariff_.lambda_mis_usd_per_mwh);
    const double energy_price = omega * tariff_.lambda_elec_usd_per_mwh * hours;
    for (std::size_t t = 0; t < steps; ++t) {
      program_.add_cost(battery.discharge[t], -energy_price);
      program_.add_cost(battery.charge[t], energy_price);
      auto& window = windows[t / window_steps_];
      window.terms.push_back({battery.discharge[t], -omega * share});
      window.terms.push_back({battery.charge[t], omega * share});
    }
    charge_.push_back(battery.charge);
    discharge_.push_back(battery.discharge);
  }
  const double days = tariff_.demand_days(forecast_.duration_seconds());
  epigraph_var_ = lp::epigraph_max(program_, windows, tariff_.peak_usd_per_mw_day() * days, 0.0);
}

const DayAheadPlan& DayAheadPlanner::solve() {
  const auto sol = lp::solve(program_);
  if (sol.status != lp::Status::kOptimal) {
    throw SolverError(std::string("day-ahead program is ") + lp::to_string(sol.status));
  }
  solution_ = sol.values;
  DayAheadPlan plan;
  plan.capacity_mw = std::max(0.0, solution_[capacity_var_]);
  plan.planned_objective = sol.objective_value;
  plan.downsample = options_.downsample;
  plan.iterations = sol.iterations;
  for (std::size_t i = 0; i < scenarios_.size(); ++i) {
    std::vector<double> b(forecast_.size());
    for (std::size_t t = 0; t < b.size(); ++t) {
      b[t] = solution_[discharge_[i][t]] - solution_[charge_[i][t]];
    }
    plan.scenario_dispatch.emplace_back(forecast_.step_seconds(), std::move(b));
  }
  plan_ = std::move(plan);
  plan_->threshold_mw = extract_threshold();
  return *plan_;
}

const DayAheadPlan& DayAheadPlanner::plan() const {
  if (!plan_) throw StateError("day-ahead plan queried before solve()");
  return *plan_;
}

double DayAheadPlanner::extract_threshold() const {
  const auto& p = plan();
  std::vector<double> expected(forecast_.vector());
  for (std::size_t i = 0; i < scenarios_.size(); ++i) {
    for (std::size_t t = 0; t < expected.size(); ++t) {
      expected[t] -= scenarios_.weights[i] * p.scenario_dispatch[i][t];
    }
  }
  const TimeSeries smoothed = smooth(TimeSeries(forecast_.step_seconds(), std::move(expected)), window_steps_);
  return std::max(0.0, *std::max_element(smoothed.values().begin(), smoothed.values().end()));
}

double DayAheadPlanner::epigraph_value() const {
  plan();
  return solution_[epigraph_var_];
}

DayAheadPlan solve_day_ahead(const TimeSeries& forecast, const ScenarioSet& scenarios,
                             const Tariff& tariff, const BatterySpec& spec, double soc_ini,
                             std::size_t downsample) {
  PlannerOptions options;
  options.downsample = downsample;
  DayAheadPlanner planner(forecast, scenarios, tariff, spec, soc_ini, options);
  return planner.solve();
}

}  // namespace peakreg
