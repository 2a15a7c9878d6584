#include "dispatch_lp.hpp"

#include <algorithm>
#include <string>

#include "peakreg/errors.hpp"

namespace peakreg::detail {

std::vector<double> DispatchVars::signed_power(const std::vector<double>& x) const {
  std::vector<double> out(charge.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = x[discharge[t]] - x[charge[t]];
  return out;
}

double DispatchVars::max_simultaneous(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t t = 0; t < charge.size(); ++t) {
    worst = std::max(worst, std::min(x[charge[t]], x[discharge[t]]));
  }
  return worst;
}

void require_soc(double soc_ini, const BatterySpec& spec) {
  if (soc_ini < spec.soc_min || soc_ini > spec.soc_max) {
    throw DomainError("initial SoC " + std::to_string(soc_ini) + " lies outside the SoC window");
  }
}

DispatchVars add_battery(lp::LinearProgram& program, std::size_t steps, double step_seconds,
                         const BatterySpec& spec, double soc_ini, double weight) {
  DispatchVars vars;
  vars.charge.reserve(steps);
  vars.discharge.reserve(steps);
  vars.soc.reserve(steps);
  const double hours = step_seconds / 3600.0;
  const double charge_gain = spec.eta_c * hours / spec.energy_mwh;
  const double discharge_loss = hours / (spec.eta_d * spec.energy_mwh);
  const double wear = weight * spec.lambda_b_usd_per_mwh * hours;
  for (std::size_t t = 0; t < steps; ++t) {
    const int ch = program.add_variable(0.0, spec.p_max_mw, wear);
    const int dc = program.add_variable(0.0, spec.p_max_mw, wear);
    const int soc = program.add_variable(spec.soc_min, spec.soc_max, 0.0);
    std::vector<lp::Term> terms{{soc, 1.0}, {ch, -charge_gain}, {dc, discharge_loss}};
    double rhs = soc_ini;
    if (t > 0) {
      terms.push_back({vars.soc.back(), -1.0});
      rhs = 0.0;
    }
    program.add_row(std::move(terms), lp::Relation::kEqual, rhs);
    vars.charge.push_back(ch);
    vars.discharge.push_back(dc);
    vars.soc.push_back(soc);
  }
  return vars;
}

std::vector<int> add_mismatch(lp::LinearProgram& program, const DispatchVars& battery, int capacity,
                              const TimeSeries& signal, double weight_usd_per_mwh) {
  std::vector<int> aux;
  aux.reserve(signal.size());
  const double weight = weight_usd_per_mwh * signal.step_hours();
  for (std::size_t t = 0; t < signal.size(); ++t) {
    lp::AffineExpr deviation{{{battery.discharge[t], 1.0}, {battery.charge[t], -1.0}}, 0.0};
    if (signal[t] != 0.0) deviation.terms.push_back({capacity, -signal[t]});
    aux.push_back(lp::abs_split(program, deviation, weight));
  }
  return aux;
}

}  // namespace peakreg::detail
