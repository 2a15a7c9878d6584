#pragma once

namespace peakreg {

/// Grid-service portion of a battery. Power in MW, energy in MWh.
struct BatterySpec {
  double p_max_mw = 1.0;
  double energy_mwh = 0.05;
  double soc_min = 0.2;
  double soc_max = 0.8;
  double eta_c = 0.95;
  double eta_d = 0.95;
  double lambda_b_usd_per_mwh = 83.0;

  /// A zero power rating is accepted and models an absent battery.
  void validate() const;

  friend bool operator==(const BatterySpec&, const BatterySpec&) = default;
};

struct BatteryState {
  double soc = 0.5;
};

/// Cell economics feeding the linearized degradation price.
struct CellParams {
  double lambda_cell_usd_per_wh = 0.5;
  int cycles = 10000;
  double dod_window = 0.6;
};

/// lambda_cell * 1e6 / (2 N (SoC_max - SoC_min)), in $/MWh.
double lambda_b_from_cell(const CellParams& cell);

/// Degradation cost of holding `b_mw` for one step.
double degradation_cost(double b_mw, double step_seconds, const BatterySpec& spec);

/// Advances the state of charge by one step. Exactly one of b_ch, b_dc may be
/// nonzero. Throws SocViolation when the result leaves the SoC bounds.
BatteryState step(BatteryState state, double b_ch_mw, double b_dc_mw, double step_seconds,
                  const BatterySpec& spec);

/// Signed variant of step: positive discharges, negative charges.
BatteryState step_signed(BatteryState state, double b_mw, double step_seconds,
                         const BatterySpec& spec);

/// Clips a signed request (discharge positive) to the power rating and to the
/// energy available in the current step.
double feasible_power(BatteryState state, double requested_mw, double step_seconds,
                      const BatterySpec& spec);

}  // namespace peakreg
