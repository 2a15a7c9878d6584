#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace peakreg {

/// Uniformly sampled real-valued sequence. Power series are in MW.
class TimeSeries {
 public:
  TimeSeries(double step_seconds, std::vector<double> values);

  /// Series of `length` copies of `value`.
  static TimeSeries constant(double step_seconds, std::size_t length, double value);

  double step_seconds() const { return step_seconds_; }
  double step_hours() const { return step_seconds_ / 3600.0; }
  std::size_t size() const { return values_.size(); }
  double duration_seconds() const { return step_seconds_ * static_cast<double>(values_.size()); }

  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Sum of values times the step in hours (MWh for a power series).
  double integral_hours() const;

  bool aligned_with(const TimeSeries& other) const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  double step_seconds_;
  std::vector<double> values_;
};

/// Throws AlignmentError unless both series share step and length.
void require_aligned(const TimeSeries& a, const TimeSeries& b, const char* what);

/// Pointwise a - b.
TimeSeries difference(const TimeSeries& a, const TimeSeries& b);

/// Commercial tariff. Keys carry their units.
struct Tariff {
  double lambda_elec_usd_per_mwh = 47.0;
  double lambda_peak_usd_per_kw_month = 12.0;
  double lambda_c_usd_per_mw_h = 50.0;
  double lambda_mis_usd_per_mwh = 166.0;
  double peak_window_seconds = 900.0;
  double days_per_month = 30.0;
  /// Days of demand charge billed against a horizon. Unset means the horizon
  /// duration in days.
  std::optional<double> billing_days;

  void validate() const;

  /// Demand charge per MW of smoothed peak for one day.
  double peak_usd_per_mw_day() const {
    return lambda_peak_usd_per_kw_month * 1000.0 / days_per_month;
  }

  /// Smoothing window length in steps of `step_seconds`; AlignmentError when
  /// the window is not an integer multiple of the step.
  std::size_t window_steps(double step_seconds) const;

  /// Days of demand charge for a horizon of the given length.
  double demand_days(double horizon_seconds) const;

  friend bool operator==(const Tariff&, const Tariff&) = default;
};

/// Components of a bill, in dollars.
struct BillBreakdown {
  double energy_charge = 0.0;
  double peak_charge = 0.0;
  double battery_cost = 0.0;
  double regulation_revenue = 0.0;
  double total = 0.0;

  /// Builds a breakdown whose total is energy + peak + battery - revenue.
  static BillBreakdown assemble(double energy, double peak, double battery, double revenue);
};

/// Regulation service delivered alongside a dispatch.
struct RegulationOutcome {
  double capacity_mw = 0.0;
  TimeSeries signal;
  /// Reported baseline y(t). When set, the mismatch is
  /// |-s(t) + b(t) + y(t) - C r(t)|; otherwise |b(t) - C r(t)|.
  std::optional<TimeSeries> baseline;
};

/// Mean over non-overlapping windows of `window_steps` samples.
TimeSeries smooth(const TimeSeries& series, std::size_t window_steps);

double energy_charge(const TimeSeries& load, const Tariff& tariff);

/// Demand charge on the largest smoothed window, floored at zero.
double peak_charge(const TimeSeries& load, const Tariff& tariff, double horizon_days);

/// Largest smoothed window value of `load` (not floored).
double smoothed_peak(const TimeSeries& load, const Tariff& tariff);

/// Mismatch energy in MWh: sum of |deviation| * t_s/3600.
double mismatch_energy(const TimeSeries& load, const TimeSeries& battery_power,
                       const RegulationOutcome& regulation);

/// Capacity payment minus mismatch penalty.
double regulation_revenue(const TimeSeries& load, const TimeSeries& battery_power,
                          const RegulationOutcome& regulation, const Tariff& tariff);

/// Full bill on the net load s(t) - b(t). Battery cost is
/// lambda_b * sum |b| * t_s/3600.
BillBreakdown total_bill(const TimeSeries& load, const TimeSeries& battery_power,
                         const std::optional<RegulationOutcome>& regulation, const Tariff& tariff,
                         double lambda_b_usd_per_mwh);

}  // namespace peakreg
