#include "peakreg/scenarios.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "peakreg/errors.hpp"

namespace peakreg {

ScenarioSet ScenarioSet::uniform(std::vector<TimeSeries> scenarios) {
  if (scenarios.empty()) throw DomainError("scenario set is empty");
  const double w = 1.0 / static_cast<double>(scenarios.size());
  ScenarioSet set{std::move(scenarios), {}};
  set.weights.assign(set.scenarios.size(), w);
  return set;
}

void ScenarioSet::validate() const {
  if (scenarios.empty()) throw ValidationError("scenario set is empty");
  if (weights.size() != scenarios.size()) {
    throw ValidationError("scenario set has " + std::to_string(scenarios.size()) +
                          " scenarios but " + std::to_string(weights.size()) + " weights");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    require_aligned(scenarios.front(), scenarios[i], "scenario set");
    if (!(weights[i] >= 0.0)) throw ValidationError("scenario " + std::to_string(i) + " has a negative weight");
    total += weights[i];
    for (double r : scenarios[i].values()) {
      if (r < -1.0 || r > 1.0) {
        throw ValidationError("scenario " + std::to_string(i) + " leaves [-1, 1]");
      }
    }
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("scenario weights sum to " + std::to_string(total));
  }
}

ScenarioSet ReductionResult::apply(const ScenarioSet& source) const {
  ScenarioSet out;
  for (std::size_t i : kept_indices) out.scenarios.push_back(source.scenarios.at(i));
  out.weights = new_weights;
  return out;
}

double scenario_distance(const TimeSeries& a, const TimeSeries& b) {
  require_aligned(a, b, "scenario distance");
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double d = a[t] - b[t];
    sum += d * d;
  }
  return std::sqrt(sum * a.step_hours());
}

ReductionResult forward_reduce(const ScenarioSet& set, std::size_t k) {
  set.validate();
  const std::size_t n = set.size();
  if (k < 1 || k > n) {
    throw DomainError("cannot keep " + std::to_string(k) + " of " + std::to_string(n) + " scenarios");
  }
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i * n + j] = dist[j * n + i] = scenario_distance(set.scenarios[i], set.scenarios[j]);
    }
  }

  // nearest[i]: distance from scenario i to the closest kept one.
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<bool> kept(n, false);
  ReductionResult result;
  for (std::size_t round = 0; round < k; ++round) {
    std::size_t best = n;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      if (kept[c]) continue;
      double value = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (kept[i] || i == c) continue;
        value += set.weights[i] * std::min(nearest[i], dist[i * n + c]);
      }
      if (value < best_value) {
        best_value = value;
        best = c;
      }
    }
    kept[best] = true;
    result.kept_indices.push_back(best);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], dist[i * n + best]);
    result.kantorovich_distance = best_value;
  }

  result.new_weights.assign(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t owner = 0;
    double closest = std::numeric_limits<double>::infinity();
    // Scan candidates by index so ties resolve to the lowest one.
    for (std::size_t slot = 0; slot < k; ++slot) {
      const std::size_t j = result.kept_indices[slot];
      const double d = i == j ? -1.0 : dist[i * n + j];
      if (d < closest || (d == closest && j < result.kept_indices[owner])) {
        closest = d;
        owner = slot;
      }
    }
    result.new_weights[owner] += set.weights[i];
  }
  return result;
}

ScenarioSet split_days(const TimeSeries& history, std::size_t steps_per_day) {
  if (steps_per_day == 0) throw DomainError("a day needs at least one step");
  if (history.size() % steps_per_day != 0) {
    throw AlignmentError("history of " + std::to_string(history.size()) +
                         " steps is not a whole number of " + std::to_string(steps_per_day) +
                         "-step days");
  }
  std::vector<TimeSeries> days;
  const auto v = history.values();
  for (std::size_t start = 0; start < v.size(); start += steps_per_day) {
    days.emplace_back(history.step_seconds(),
                      std::vector<double>(v.begin() + start, v.begin() + start + steps_per_day));
  }
  return ScenarioSet::uniform(std::move(days));
}

TimeSeries gen_trunc_gauss(std::size_t length, double step_seconds, double sigma2, double lo,
                           double hi, std::uint64_t seed) {
  if (!(lo < hi)) throw DomainError("truncation range is empty");
  if (!(sigma2 > 0.0)) throw DomainError("variance must be positive");
  if (length == 0) throw DomainError("signal length must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(sigma2));
  std::vector<double> out(length);
  for (double& v : out) {
    do {
      v = normal(rng);
    } while (v < lo || v > hi);
  }
  return TimeSeries(step_seconds, std::move(out));
}

TimeSeries gen_rect_peak(const RectPeak& shape) {
  if (shape.peak_minutes < 0.0) throw DomainError("peak duration must be non-negative");
  const double steps = shape.peak_minutes * 60.0 / shape.step_seconds;
  const auto width = static_cast<std::size_t>(std::llround(steps));
  if (std::abs(steps - static_cast<double>(width)) > 1e-9) {
    throw AlignmentError("peak duration is not a whole number of steps");
  }
  if (width > shape.length) throw DomainError("peak does not fit inside the horizon");
  const std::size_t start = shape.peak_start.value_or((shape.length - width) / 2);
  if (start + width > shape.length) throw DomainError("peak interval overflows the horizon");
  std::vector<double> out(shape.length, shape.base_mw);
  for (std::size_t t = start; t < start + width; ++t) out[t] = shape.peak_mw;
  return TimeSeries(shape.step_seconds, std::move(out));
}

}  // namespace peakreg
