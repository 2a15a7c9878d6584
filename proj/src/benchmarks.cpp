#include "peakreg/benchmarks.hpp"

#include <cmath>

#include "dispatch_lp.hpp"
#include "peakreg/errors.hpp"
#include "peakreg/lp.hpp"

namespace peakreg {

namespace {

void require_solved(const lp::Solution& sol, const char* what) {
  if (sol.status != lp::Status::kOptimal) {
    throw SolverError(std::string(what) + ": program is " + lp::to_string(sol.status));
  }
}

}  // namespace

PeakShaveResult solve_peak_shaving(const TimeSeries& load, const Tariff& tariff,
                                   const BatterySpec& spec, double soc_ini) {
  tariff.validate();
  spec.validate();
  detail::require_soc(soc_ini, spec);
  const std::size_t window = tariff.window_steps(load.step_seconds());
  const TimeSeries smoothed = smooth(load, window);
  const double hours = load.step_hours();
  const double days = tariff.demand_days(load.duration_seconds());

  lp::LinearProgram program;
  const auto battery = detail::add_battery(program, load.size(), load.step_seconds(), spec, soc_ini, 1.0);
  // Energy charge on s - b_dc + b_ch.
  const double energy_price = tariff.lambda_elec_usd_per_mwh * hours;
  program.add_objective_offset(energy_charge(load, tariff));
  for (std::size_t t = 0; t < load.size(); ++t) {
    program.add_cost(battery.discharge[t], -energy_price);
    program.add_cost(battery.charge[t], energy_price);
  }
  // Demand charge on the largest smoothed net load, floored at zero.
  std::vector<lp::AffineExpr> windows(smoothed.size());
  const double share = 1.0 / static_cast<double>(window);
  for (std::size_t w = 0; w < smoothed.size(); ++w) {
    windows[w].constant = smoothed[w];
    for (std::size_t k = 0; k < window; ++k) {
      const std::size_t t = w * window + k;
      windows[w].terms.push_back({battery.discharge[t], -share});
      windows[w].terms.push_back({battery.charge[t], share});
    }
  }
  lp::epigraph_max(program, windows, tariff.peak_usd_per_mw_day() * days, 0.0);

  const auto sol = lp::solve(program);
  require_solved(sol, "peak shaving");
  TimeSeries dispatch(load.step_seconds(), battery.signed_power(sol.values));
  PeakShaveResult result{dispatch,
                         total_bill(load, dispatch, std::nullopt, tariff, spec.lambda_b_usd_per_mwh),
                         sol.objective_value, battery.max_simultaneous(sol.values), sol.iterations};
  return result;
}

RegulationResult solve_regulation(const TimeSeries& signal, const Tariff& tariff,
                                  const BatterySpec& spec, double soc_ini,
                                  const RegulationOptions& options) {
  tariff.validate();
  spec.validate();
  detail::require_soc(soc_ini, spec);
  for (std::size_t t = 0; t < signal.size(); ++t) {
    if (signal[t] < -1.0 || signal[t] > 1.0) {
      throw DomainError("regulation signal leaves [-1, 1] at index " + std::to_string(t));
    }
  }
  const double horizon_hours = signal.duration_seconds() / 3600.0;

  lp::LinearProgram program;
  double c_lo = 0.0;
  double c_hi = spec.p_max_mw;
  if (options.fixed_capacity_mw) {
    if (*options.fixed_capacity_mw < 0.0) throw DomainError("capacity must be non-negative");
    c_lo = c_hi = *options.fixed_capacity_mw;
  }
  const int capacity = program.add_variable(c_lo, c_hi, -tariff.lambda_c_usd_per_mw_h * horizon_hours);
  const auto battery = detail::add_battery(program, signal.size(), signal.step_seconds(), spec, soc_ini, 1.0);
  if (options.idle_when_unprofitable && tariff.lambda_mis_usd_per_mwh <= spec.lambda_b_usd_per_mwh) {
    for (std::size_t t = 0; t < signal.size(); ++t) {
      program.set_bounds(battery.charge[t], 0.0, 0.0);
      program.set_bounds(battery.discharge[t], 0.0, 0.0);
    }
  }
  detail::add_mismatch(program, battery, capacity, signal, tariff.lambda_mis_usd_per_mwh);

  const auto sol = lp::solve(program);
  require_solved(sol, "frequency regulation");
  RegulationResult result{sol.values[capacity],
                          TimeSeries(signal.step_seconds(), battery.signed_power(sol.values)),
                          signal,
                          -sol.objective_value,
                          battery.max_simultaneous(sol.values),
                          sol.iterations};
  return result;
}

BillBreakdown bill_with_regulation(const TimeSeries& load, const RegulationResult& reg,
                                   const Tariff& tariff, const BatterySpec& spec) {
  require_aligned(load, reg.dispatch, "bill_with_regulation");
  return total_bill(load, reg.dispatch, RegulationOutcome{reg.capacity_mw, reg.signal, std::nullopt},
                    tariff, spec.lambda_b_usd_per_mwh);
}

double performance_score(const RegulationResult& reg) {
  double tracked = 0.0;
  double mismatch = 0.0;
  for (std::size_t t = 0; t < reg.signal.size(); ++t) {
    tracked += std::abs(reg.capacity_mw * reg.signal[t]);
    mismatch += std::abs(reg.dispatch[t] - reg.capacity_mw * reg.signal[t]);
  }
  return tracked > 0.0 ? 1.0 - mismatch / tracked : 1.0;
}

}  // namespace peakreg
