#include "peakreg/controller.hpp"

#include <string>

#include "peakreg/errors.hpp"

namespace peakreg {

double regulation_policy(double r, double capacity_mw, BatteryState state, const BatterySpec& spec,
                         double step_seconds, const Tariff& tariff) {
  if (tariff.lambda_mis_usd_per_mwh <= spec.lambda_b_usd_per_mwh) return 0.0;
  return feasible_power(state, capacity_mw * r, step_seconds, spec);
}

JointStep joint_step(double r, double load_mw, PeakWindow window, double capacity_mw,
                     double threshold_mw, BatteryState battery, const BatterySpec& spec,
                     const Tariff& tariff, double step_seconds, std::size_t window_steps) {
  if (window.steps_done >= window_steps) window = PeakWindow{};
  const bool tracks = tariff.lambda_mis_usd_per_mwh > spec.lambda_b_usd_per_mwh;
  JointStep out;
  out.requested_mw = tracks ? capacity_mw * r : 0.0;
  // The first step of a window has no average yet and takes the lower branch.
  if (window.steps_done > 0 && window.average() > threshold_mw) {
    out.requested_mw += window.average() - threshold_mw;
  }
  out.dispatch_mw = feasible_power(battery, out.requested_mw, step_seconds, spec);
  out.battery = step_signed(battery, out.dispatch_mw, step_seconds, spec);
  window.net_sum += load_mw - out.dispatch_mw;
  ++window.steps_done;
  out.window = window;
  return out;
}

JointController::JointController(double capacity_mw, double threshold_mw, BatterySpec spec,
                                 Tariff tariff, double step_seconds, BatteryState initial)
    : capacity_mw_(capacity_mw),
      threshold_mw_(threshold_mw),
      spec_(spec),
      tariff_(std::move(tariff)),
      step_seconds_(step_seconds),
      window_steps_(tariff_.window_steps(step_seconds)),
      battery_(initial) {
  spec_.validate();
  if (capacity_mw < 0.0) throw DomainError("capacity must be non-negative");
  if (initial.soc < spec_.soc_min || initial.soc > spec_.soc_max) {
    throw DomainError("initial SoC lies outside the SoC window");
  }
}

double JointController::step(double r, double load_mw) {
  const auto next = joint_step(r, load_mw, window_, capacity_mw_, threshold_mw_, battery_, spec_,
                               tariff_, step_seconds_, window_steps_);
  window_ = next.window;
  battery_ = next.battery;
  return next.dispatch_mw;
}

SimulationTrace simulate_day(const TimeSeries& load, const TimeSeries& signal, const DayAheadPlan& plan,
                             const BatterySpec& spec, const Tariff& tariff, double soc_ini,
                             const std::optional<TimeSeries>& forecast) {
  require_aligned(load, signal, "simulate_day");
  if (forecast) require_aligned(load, *forecast, "simulate_day");
  JointController controller(plan.capacity_mw, plan.threshold_mw, spec, tariff, load.step_seconds(),
                             BatteryState{soc_ini});
  std::vector<double> dispatch(load.size());
  std::vector<double> soc(load.size());
  for (std::size_t t = 0; t < load.size(); ++t) {
    dispatch[t] = controller.step(signal[t], load[t]);
    soc[t] = controller.battery().soc;
  }
  TimeSeries b(load.step_seconds(), std::move(dispatch));
  const RegulationOutcome outcome{plan.capacity_mw, signal, forecast.value_or(load)};
  SimulationTrace trace{b, std::move(soc),
                        total_bill(load, b, outcome, tariff, spec.lambda_b_usd_per_mwh),
                        mismatch_energy(load, b, outcome)};
  return trace;
}

}  // namespace peakreg
