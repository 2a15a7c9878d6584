#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "peakreg/battery.hpp"
#include "peakreg/billing.hpp"
#include "peakreg/planner.hpp"

namespace peakreg {

/// Closed-form regulation response for capacity C: track C r(t) as far as
/// the power rating and stored energy allow. Returns 0 when
/// lambda_mis <= lambda_b, where idling is optimal.
double regulation_policy(double r, double capacity_mw, BatteryState state, const BatterySpec& spec,
                         double step_seconds, const Tariff& tariff);

/// Running average of net consumption inside the current peak window.
struct PeakWindow {
  std::size_t steps_done = 0;
  double net_sum = 0.0;

  /// Average over completed steps; meaningless while steps_done == 0.
  double average() const { return net_sum / static_cast<double>(steps_done); }
};

struct JointStep {
  double dispatch_mw = 0.0;
  double requested_mw = 0.0;  ///< before clipping
  PeakWindow window;
  BatteryState battery;
};

/// One step of the threshold controller. `window_steps` is the peak window in
/// samples; the window resets when it fills.
JointStep joint_step(double r, double load_mw, PeakWindow window, double capacity_mw,
                     double threshold_mw, BatteryState battery, const BatterySpec& spec,
                     const Tariff& tariff, double step_seconds, std::size_t window_steps);

class JointController {
 public:
  JointController(double capacity_mw, double threshold_mw, BatterySpec spec, Tariff tariff,
                  double step_seconds, BatteryState initial);

  /// Dispatch for this step given the regulation signal and measured load.
  double step(double r, double load_mw);

  BatteryState battery() const { return battery_; }
  const PeakWindow& window() const { return window_; }

 private:
  double capacity_mw_;
  double threshold_mw_;
  BatterySpec spec_;
  Tariff tariff_;
  double step_seconds_;
  std::size_t window_steps_;
  BatteryState battery_;
  PeakWindow window_;
};

struct SimulationTrace {
  TimeSeries dispatch;
  std::vector<double> soc_path;  ///< SoC after each step
  BillBreakdown realized_bill;
  double mismatch_energy_mwh = 0.0;
};

/// Runs the controller over a day. The reported baseline is `forecast`, or
/// the realized load when none is given.
SimulationTrace simulate_day(const TimeSeries& load, const TimeSeries& signal, const DayAheadPlan& plan,
                             const BatterySpec& spec, const Tariff& tariff, double soc_ini,
                             const std::optional<TimeSeries>& forecast = std::nullopt);

}  // namespace peakreg
