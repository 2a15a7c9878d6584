#pragma once

#include <optional>

#include "peakreg/battery.hpp"
#include "peakreg/billing.hpp"

namespace peakreg {

/// Offline peak-shaving optimum with perfect knowledge of the load.
struct PeakShaveResult {
  TimeSeries dispatch;  ///< b*(t), discharge positive, MW
  BillBreakdown bill;   ///< J^p recomputed on the dispatch
  double lp_objective = 0.0;
  double max_simultaneous_mw = 0.0;
  long iterations = 0;
};

struct RegulationResult {
  double capacity_mw = 0.0;  ///< C*
  TimeSeries dispatch;       ///< b^r(t)
  TimeSeries signal;
  double revenue = 0.0;      ///< R*: capacity payment - mismatch penalty - degradation
  double max_simultaneous_mw = 0.0;
  long iterations = 0;
};

struct RegulationOptions {
  /// Solve for a given capacity instead of optimizing it.
  std::optional<double> fixed_capacity_mw;
  /// When lambda_mis <= lambda_b the battery idles (b = 0 is optimal for any
  /// C); pin the dispatch to zero instead of leaving ties to the solver.
  bool idle_when_unprofitable = true;
};

PeakShaveResult solve_peak_shaving(const TimeSeries& load, const Tariff& tariff,
                                   const BatterySpec& spec, double soc_ini);

/// Maximizes lambda_c C T - lambda_mis sum|b - C r| - lambda_b sum|b| over
/// 0 <= C <= p_max and a battery-feasible dispatch.
RegulationResult solve_regulation(const TimeSeries& signal, const Tariff& tariff,
                                  const BatterySpec& spec, double soc_ini,
                                  const RegulationOptions& options = {});

/// J^r: energy and peak charge on s - b^r with the regulation outcome netted.
BillBreakdown bill_with_regulation(const TimeSeries& load, const RegulationResult& reg,
                                   const Tariff& tariff, const BatterySpec& spec);

/// 1 - sum|b - C r| / (C sum|r|); 1 when C or the signal is zero.
double performance_score(const RegulationResult& reg);

}  // namespace peakreg
