#pragma once

// LP building blocks shared by the benchmark and planning problems.

#include <cstddef>
#include <vector>

#include "peakreg/battery.hpp"
#include "peakreg/billing.hpp"
#include "peakreg/lp.hpp"

namespace peakreg::detail {

/// Column indices of one battery trajectory inside a program.
struct DispatchVars {
  std::vector<int> charge;
  std::vector<int> discharge;
  std::vector<int> soc;

  /// Signed dispatch b = b_dc - b_ch read from a solution.
  std::vector<double> signed_power(const std::vector<double>& x) const;
  double max_simultaneous(const std::vector<double>& x) const;
};

/// Adds b_ch, b_dc in [0, p_max] and SoC in [soc_min, soc_max] for every
/// step, linked by the SoC recursion starting from soc_ini. Degradation is
/// priced as weight * lambda_b * (b_ch + b_dc) * t_s/3600, which equals
/// lambda_b |b| whenever charge and discharge do not overlap.
DispatchVars add_battery(lp::LinearProgram& program, std::size_t steps, double step_seconds,
                         const BatterySpec& spec, double soc_ini, double weight);

/// Adds weight * mismatch with |b(t) - C r(t)| per step via abs_split.
std::vector<int> add_mismatch(lp::LinearProgram& program, const DispatchVars& battery, int capacity,
                              const TimeSeries& signal, double weight_usd_per_mwh);

void require_soc(double soc_ini, const BatterySpec& spec);

}  // namespace peakreg::detail
