#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "peakreg/battery.hpp"
#include "peakreg/benchmarks.hpp"
#include "peakreg/billing.hpp"
#include "peakreg/controller.hpp"
#include "peakreg/planner.hpp"
#include "peakreg/scenarios.hpp"

namespace peakreg {

/// One day's bills under the four operating modes.
struct DailyComparison {
  double j_original = 0.0;
  double j_peak_only = 0.0;
  double j_reg_only = 0.0;
  double j_joint = 0.0;
  /// Joint saving beats the sum of the single-application savings.
  bool superlinear = false;
  /// [(J - J^joint) - ((J - J^r) + (J - J^p))] / J
  double q = 0.0;
};

/// DomainError when j is zero or any input is not finite.
DailyComparison superlinear_ratio(double j, double j_peak_only, double j_reg_only, double j_joint);

struct DayInputs {
  TimeSeries load;
  TimeSeries signal;          ///< realized r(t)
  ScenarioSet scenarios;      ///< day-ahead regulation scenarios
  std::optional<TimeSeries> forecast;  ///< load forecast; realized load when unset
  Tariff tariff;
  BatterySpec battery;
  double soc_ini = 0.5;
  std::size_t downsample = 1;
};

struct DayOutcome {
  DailyComparison comparison;
  BillBreakdown original;
  PeakShaveResult peak_only;
  RegulationResult reg_only;
  BillBreakdown reg_bill;
  DayAheadPlan plan;
  SimulationTrace joint;
};

/// Offline benchmarks against the planned online controller.
DayOutcome compare_day(const DayInputs& inputs);

struct PeakDurations {
  std::vector<double> durations_seconds;  ///< ascending
  /// Empirical CDF: (duration, fraction of runs no longer than it).
  std::vector<std::pair<double, double>> cdf;
};

/// Lengths of maximal runs with load >= fraction * max(load). A constant load
/// is one run spanning the series.
PeakDurations peak_duration_cdf(const TimeSeries& load, double threshold_fraction = 0.95);

struct LifeExpectancy {
  double years = 0.0;
  bool infinite = false;
};

/// Lifetime throughput budget 2 N (SoC window) E divided by annual throughput.
LifeExpectancy life_expectancy(double annual_throughput_mwh, const CellParams& cell,
                               double energy_capacity_mwh);

/// Synthetic day family for the sensitivity sweeps.
struct SweepSetup {
  RectPeak load_shape;
  double sigma2 = 0.12;
  std::size_t scenario_pool = 10;  ///< generated per seed before reduction
  std::size_t scenarios_kept = 3;
  Tariff tariff;
  BatterySpec battery;
  CellParams cell;
  double soc_ini = 0.5;
  std::size_t downsample = 1;
  /// lambda_mis is reset to this multiple of lambda_b in every cell.
  std::optional<double> mis_to_degradation = 2.0;
};

enum class SweepAxis { kPeakCharge, kCapacityPayment };

struct SweepCell {
  double lambda_cell = 0.0;
  double second = 0.0;  ///< lambda_peak ($/kW-month) or lambda_c ($/MW-h)
  std::size_t runs = 0;
  std::size_t superlinear = 0;
  std::size_t failures = 0;
  double probability = 0.0;  ///< superlinear / successful runs
  double mean_q = 0.0;
};

/// Rectangle-peak load, truncated-Gaussian realized signal and a reduced
/// set of generated scenarios, all derived from `seed`.
DayInputs synthetic_day(const SweepSetup& setup, std::uint64_t seed);

/// Runs every (lambda_cell, second) cell for every seed, with lambda_b
/// derived from the cell price in each cell. Cells are evaluated
/// by `workers` threads (0 reads PEAKREG_WORKERS, default 1); the result
/// order is the grid order regardless of scheduling.
std::vector<SweepCell> sensitivity_sweep(const SweepSetup& setup, SweepAxis axis,
                                         const std::vector<double>& lambda_cells,
                                         const std::vector<double>& seconds,
                                         const std::vector<std::uint64_t>& seeds,
                                         std::size_t workers = 0);

}  // namespace peakreg
