#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "peakreg/billing.hpp"

namespace peakreg {

/// Weighted regulation-signal realizations sharing one time grid.
struct ScenarioSet {
  std::vector<TimeSeries> scenarios;
  std::vector<double> weights;

  /// Equal weights 1/n.
  static ScenarioSet uniform(std::vector<TimeSeries> scenarios);

  /// Nonempty, aligned, values in [-1, 1], weights >= 0 summing to 1.
  void validate() const;

  std::size_t size() const { return scenarios.size(); }
  std::size_t length() const { return scenarios.front().size(); }
  double step_seconds() const { return scenarios.front().step_seconds(); }
};

struct ReductionResult {
  std::vector<std::size_t> kept_indices;  ///< in selection order
  std::vector<double> new_weights;        ///< parallel to kept_indices
  double kantorovich_distance = 0.0;

  /// The reduced set drawn from `source`.
  ScenarioSet apply(const ScenarioSet& source) const;
};

/// sqrt(sum (a - b)^2 * t_s/3600).
double scenario_distance(const TimeSeries& a, const TimeSeries& b);

/// Greedy forward selection of k scenarios. Each dropped scenario hands its
/// probability to the nearest kept one; ties go to the lowest index.
ReductionResult forward_reduce(const ScenarioSet& set, std::size_t k);

/// Splits a long history into consecutive days of `steps_per_day` samples
/// with uniform weights. A trailing partial day is an AlignmentError.
ScenarioSet split_days(const TimeSeries& history, std::size_t steps_per_day);

/// Zero-mean Gaussian draws with variance sigma2, truncated to [lo, hi] by
/// rejection.
TimeSeries gen_trunc_gauss(std::size_t length, double step_seconds, double sigma2, double lo,
                           double hi, std::uint64_t seed);

struct RectPeak {
  double base_mw = 0.5;
  double peak_mw = 1.0;
  double peak_minutes = 15.0;
  std::size_t length = 21600;
  double step_seconds = 4.0;
  /// First peak sample; defaults to a peak centered in the horizon.
  std::optional<std::size_t> peak_start;
};

/// Base load with one contiguous rectangle at peak_mw.
TimeSeries gen_rect_peak(const RectPeak& shape);

}  // namespace peakreg
