#include "peakreg/battery.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "peakreg/errors.hpp"

namespace peakreg {

namespace {

// Rounding slack when comparing a stepped SoC against its bounds.
constexpr double kSocSlack = 1e-9;

}  // namespace

void BatterySpec::validate() const {
  if (!(p_max_mw >= 0.0) || !std::isfinite(p_max_mw)) {
    throw ValidationError("battery.p_max_mw must be a finite value >= 0");
  }
  if (!(energy_mwh > 0.0) || !std::isfinite(energy_mwh)) {
    throw ValidationError("battery.energy_mwh must be > 0");
  }
  if (!(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0)) {
    throw ValidationError("battery SoC bounds must satisfy 0 <= soc_min < soc_max <= 1");
  }
  if (!(eta_c > 0.0 && eta_c <= 1.0)) throw ValidationError("battery.eta_c must lie in (0, 1]");
  if (!(eta_d > 0.0 && eta_d <= 1.0)) throw ValidationError("battery.eta_d must lie in (0, 1]");
  if (!(lambda_b_usd_per_mwh >= 0.0) || !std::isfinite(lambda_b_usd_per_mwh)) {
    throw ValidationError("battery.lambda_b_usd_per_mwh must be a finite value >= 0");
  }
}

double lambda_b_from_cell(const CellParams& cell) {
  const double denom = 2.0 * static_cast<double>(cell.cycles) * cell.dod_window;
  if (!(denom > 0.0)) {
    throw DomainError("cell cycles and DoD window must be positive");
  }
  if (cell.lambda_cell_usd_per_wh < 0.0) {
    throw DomainError("cell price must be non-negative");
  }
  return cell.lambda_cell_usd_per_wh * 1e6 / denom;
}

double degradation_cost(double b_mw, double step_seconds, const BatterySpec& spec) {
  if (std::abs(b_mw) > spec.p_max_mw * (1.0 + 1e-12)) {
    throw LimitError("battery power " + std::to_string(b_mw) + " MW exceeds rating " +
                     std::to_string(spec.p_max_mw) + " MW");
  }
  return spec.lambda_b_usd_per_mwh * std::abs(b_mw) * step_seconds / 3600.0;
}

BatteryState step(BatteryState state, double b_ch_mw, double b_dc_mw, double step_seconds,
                  const BatterySpec& spec) {
  const double limit = spec.p_max_mw * (1.0 + 1e-12);
  if (b_ch_mw < 0.0 || b_dc_mw < 0.0 || b_ch_mw > limit || b_dc_mw > limit) {
    throw LimitError("charge/discharge powers must lie in [0, p_max]");
  }
  if (b_ch_mw > 0.0 && b_dc_mw > 0.0) {
    throw LimitError("simultaneous charge and discharge is not allowed");
  }
  const double delta =
      (b_ch_mw * spec.eta_c - b_dc_mw / spec.eta_d) * (step_seconds / 3600.0) / spec.energy_mwh;
  double soc = state.soc + delta;
  if (soc < spec.soc_min - kSocSlack || soc > spec.soc_max + kSocSlack) {
    throw SocViolation("state of charge " + std::to_string(soc) + " leaves [" +
                       std::to_string(spec.soc_min) + ", " + std::to_string(spec.soc_max) + "]");
  }
  soc = std::clamp(soc, spec.soc_min, spec.soc_max);
  return BatteryState{soc};
}

BatteryState step_signed(BatteryState state, double b_mw, double step_seconds,
                         const BatterySpec& spec) {
  return b_mw >= 0.0 ? step(state, 0.0, b_mw, step_seconds, spec)
                     : step(state, -b_mw, 0.0, step_seconds, spec);
}

double feasible_power(BatteryState state, double requested_mw, double step_seconds,
                      const BatterySpec& spec) {
  const double per_hour = 3600.0 / step_seconds;
  if (requested_mw >= 0.0) {
    const double energy_limit =
        std::max(0.0, spec.eta_d * (state.soc - spec.soc_min) * spec.energy_mwh * per_hour);
    return std::min({requested_mw, spec.p_max_mw, energy_limit});
  }
  const double energy_limit =
      std::min(0.0, (state.soc - spec.soc_max) * spec.energy_mwh * per_hour / spec.eta_c);
  return std::max({requested_mw, -spec.p_max_mw, energy_limit});
}

}  // namespace peakreg
