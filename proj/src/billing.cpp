#include "peakreg/billing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "peakreg/errors.hpp"

namespace peakreg {

TimeSeries::TimeSeries(double step_seconds, std::vector<double> values)
    : step_seconds_(step_seconds), values_(std::move(values)) {
  if (!(step_seconds_ > 0.0) || !std::isfinite(step_seconds_)) {
    throw DomainError("time series step must be positive, got " + std::to_string(step_seconds_));
  }
  if (values_.empty()) {
    throw DomainError("time series must hold at least one value");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DomainError("time series value at index " + std::to_string(i) + " is not finite");
    }
  }
}

TimeSeries TimeSeries::constant(double step_seconds, std::size_t length, double value) {
  return TimeSeries(step_seconds, std::vector<double>(length, value));
}

double TimeSeries::integral_hours() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum * step_hours();
}

bool TimeSeries::aligned_with(const TimeSeries& other) const {
  return step_seconds_ == other.step_seconds_ && values_.size() == other.values_.size();
}

void require_aligned(const TimeSeries& a, const TimeSeries& b, const char* what) {
  if (!a.aligned_with(b)) {
    throw AlignmentError(std::string(what) + ": series differ in step (" +
                         std::to_string(a.step_seconds()) + " vs " +
                         std::to_string(b.step_seconds()) + ") or length (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

TimeSeries difference(const TimeSeries& a, const TimeSeries& b) {
  require_aligned(a, b, "difference");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return TimeSeries(a.step_seconds(), std::move(out));
}

void Tariff::validate() const {
  auto nonneg = [](double v, const char* key) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string("tariff.") + key + " must be a finite value >= 0");
    }
  };
  nonneg(lambda_elec_usd_per_mwh, "lambda_elec_usd_per_mwh");
  nonneg(lambda_peak_usd_per_kw_month, "lambda_peak_usd_per_kw_month");
  nonneg(lambda_c_usd_per_mw_h, "lambda_c_usd_per_mw_h");
  nonneg(lambda_mis_usd_per_mwh, "lambda_mis_usd_per_mwh");
  if (!(peak_window_seconds > 0.0)) {
    throw ValidationError("tariff.peak_window_seconds must be > 0");
  }
  if (!(days_per_month > 0.0)) {
    throw ValidationError("tariff.days_per_month must be > 0");
  }
  if (billing_days && !(*billing_days > 0.0)) {
    throw ValidationError("tariff.billing_days must be > 0");
  }
}

std::size_t Tariff::window_steps(double step_seconds) const {
  const double ratio = peak_window_seconds / step_seconds;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw AlignmentError("peak window of " + std::to_string(peak_window_seconds) +
                         " s is not an integer multiple of the " + std::to_string(step_seconds) +
                         " s step");
  }
  return static_cast<std::size_t>(rounded);
}

double Tariff::demand_days(double horizon_seconds) const {
  return billing_days ? *billing_days : horizon_seconds / 86400.0;
}

BillBreakdown BillBreakdown::assemble(double energy, double peak, double battery, double revenue) {
  return BillBreakdown{energy, peak, battery, revenue, energy + peak + battery - revenue};
}

TimeSeries smooth(const TimeSeries& series, std::size_t window_steps) {
  if (window_steps == 0) throw DomainError("smoothing window must be at least one step");
  if (series.size() % window_steps != 0) {
    throw AlignmentError("smoothing window of " + std::to_string(window_steps) +
                         " steps does not divide series length " + std::to_string(series.size()));
  }
  const std::size_t windows = series.size() / window_steps;
  std::vector<double> out(windows);
  const auto v = series.values();
  for (std::size_t w = 0; w < windows; ++w) {
    double sum = 0.0;
    for (std::size_t k = 0; k < window_steps; ++k) sum += v[w * window_steps + k];
    out[w] = sum / static_cast<double>(window_steps);
  }
  return TimeSeries(series.step_seconds() * static_cast<double>(window_steps), std::move(out));
}

double energy_charge(const TimeSeries& load, const Tariff& tariff) {
  return tariff.lambda_elec_usd_per_mwh * load.integral_hours();
}

double smoothed_peak(const TimeSeries& load, const Tariff& tariff) {
  const auto smoothed = smooth(load, tariff.window_steps(load.step_seconds()));
  return *std::max_element(smoothed.values().begin(), smoothed.values().end());
}

double peak_charge(const TimeSeries& load, const Tariff& tariff, double horizon_days) {
  if (!(horizon_days > 0.0)) throw DomainError("peak charge horizon must be positive");
  const double peak = std::max(0.0, smoothed_peak(load, tariff));
  return tariff.peak_usd_per_mw_day() * horizon_days * peak;
}

double mismatch_energy(const TimeSeries& load, const TimeSeries& battery_power,
                       const RegulationOutcome& regulation) {
  require_aligned(load, battery_power, "mismatch");
  require_aligned(load, regulation.signal, "mismatch");
  if (regulation.baseline) require_aligned(load, *regulation.baseline, "mismatch");
  double sum = 0.0;
  for (std::size_t t = 0; t < load.size(); ++t) {
    double deviation = battery_power[t] - regulation.capacity_mw * regulation.signal[t];
    if (regulation.baseline) deviation += (*regulation.baseline)[t] - load[t];
    sum += std::abs(deviation);
  }
  return sum * load.step_hours();
}

double regulation_revenue(const TimeSeries& load, const TimeSeries& battery_power,
                          const RegulationOutcome& regulation, const Tariff& tariff) {
  const double hours = load.duration_seconds() / 3600.0;
  return tariff.lambda_c_usd_per_mw_h * regulation.capacity_mw * hours -
         tariff.lambda_mis_usd_per_mwh * mismatch_energy(load, battery_power, regulation);
}

BillBreakdown total_bill(const TimeSeries& load, const TimeSeries& battery_power,
                         const std::optional<RegulationOutcome>& regulation, const Tariff& tariff,
                         double lambda_b_usd_per_mwh) {
  require_aligned(load, battery_power, "total_bill");
  const TimeSeries net = difference(load, battery_power);
  const double energy = energy_charge(net, tariff);
  const double peak = peak_charge(net, tariff, tariff.demand_days(load.duration_seconds()));
  double throughput = 0.0;
  for (double b : battery_power.values()) throughput += std::abs(b);
  const double battery = lambda_b_usd_per_mwh * throughput * battery_power.step_hours();
  const double revenue =
      regulation ? regulation_revenue(load, battery_power, *regulation, tariff) : 0.0;
  return BillBreakdown::assemble(energy, peak, battery, revenue);
}

}  // namespace peakreg
