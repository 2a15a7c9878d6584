#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "peakreg/battery.hpp"
#include "peakreg/billing.hpp"
#include "peakreg/lp.hpp"
#include "peakreg/scenarios.hpp"

namespace peakreg {

/// First-stage decisions of the day-ahead problem.
struct DayAheadPlan {
  double capacity_mw = 0.0;   ///< C*
  double threshold_mw = 0.0;  ///< U*, in smoothed-window units
  /// Planned b_i(t) per scenario at planning resolution.
  std::vector<TimeSeries> scenario_dispatch;
  double planned_objective = 0.0;  ///< J^joint, $
  std::size_t downsample = 1;
  long iterations = 0;
};

struct PlannerOptions {
  std::size_t downsample = 1;
  /// Pins C instead of optimizing it.
  std::optional<double> fixed_capacity_mw;
};

/// Two-stage stochastic LP: C is shared by every scenario, dispatch is
/// per-scenario recourse. The reported baseline is the load forecast, so the
/// mismatch in scenario i is |b_i(t) - C r_i(t)|. The demand charge applies to
/// the weighted expected smoothed net load.
class DayAheadPlanner {
 public:
  DayAheadPlanner(TimeSeries forecast, ScenarioSet scenarios, Tariff tariff, BatterySpec spec,
                  double soc_ini, PlannerOptions options = {});

  const DayAheadPlan& solve();
  bool solved() const { return plan_.has_value(); }

  /// StateError before solve().
  const DayAheadPlan& plan() const;

  /// U* recomputed from the planned dispatch: the largest window of the
  /// weighted expected smoothed net load, floored at zero. StateError before
  /// solve().
  double extract_threshold() const;

  /// Value of the epigraph variable at the optimum. StateError before solve().
  double epigraph_value() const;

  /// Forecast and scenarios after block averaging.
  const TimeSeries& planning_forecast() const { return forecast_; }
  const ScenarioSet& planning_scenarios() const { return scenarios_; }

  /// The assembled program (built by the constructor).
  const lp::LinearProgram& program() const { return program_; }

 private:
  void build();

  TimeSeries forecast_;
  ScenarioSet scenarios_;
  Tariff tariff_;
  BatterySpec spec_;
  double soc_ini_;
  PlannerOptions options_;
  std::size_t window_steps_ = 1;
  lp::LinearProgram program_;
  int capacity_var_ = -1;
  int epigraph_var_ = -1;
  std::vector<std::vector<int>> charge_;
  std::vector<std::vector<int>> discharge_;
  std::vector<double> solution_;
  std::optional<DayAheadPlan> plan_;
};

DayAheadPlan solve_day_ahead(const TimeSeries& forecast, const ScenarioSet& scenarios,
                             const Tariff& tariff, const BatterySpec& spec, double soc_ini,
                             std::size_t downsample = 1);

}  // namespace peakreg
