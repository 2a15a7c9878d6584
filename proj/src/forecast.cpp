#include "peakreg/forecast.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "peakreg/errors.hpp"

namespace peakreg {

namespace {

constexpr std::size_t kMonthCol = 3;
constexpr std::size_t kHourTmpCol = 14;
constexpr std::size_t kMonthTmpCol = 37;
constexpr std::size_t kDayHourCol = 48;
constexpr std::size_t kTailCol = 215;
constexpr std::int64_t kHour = 3600;

void check_row(const FeatureRow& r, std::size_t index) {
  const auto where = " in feature row " + std::to_string(index);
  if (r.month < 1 || r.month > 12) throw ValidationError("month out of range" + where);
  if (r.hour < 0 || r.hour > 23) throw ValidationError("hour out of range" + where);
  if (r.day_of_week < 0 || r.day_of_week > 6) throw ValidationError("day_of_week out of range" + where);
  if ((r.is_weekend != 0 && r.is_weekend != 1) || (r.is_holiday != 0 && r.is_holiday != 1)) {
    throw ValidationError("binary flag out of range" + where);
  }
  for (double v : {r.trend, r.tmp, r.load_prev_day, r.similar_days_avg}) {
    if (!std::isfinite(v)) throw ValidationError("non-finite numeric feature" + where);
  }
}

}  // namespace

std::vector<std::string> design_columns() {
  std::vector<std::string> names{"intercept", "trend", "tmp"};
  for (int m = 2; m <= 12; ++m) names.push_back("month" + std::to_string(m));
  for (int h = 1; h <= 23; ++h) names.push_back("hour" + std::to_string(h) + "_x_tmp");
  for (int m = 2; m <= 12; ++m) names.push_back("month" + std::to_string(m) + "_x_tmp");
  for (int d = 0; d < 7; ++d) {
    for (int h = 0; h < 24; ++h) {
      if (d == 0 && h == 0) continue;
      names.push_back("day" + std::to_string(d) + "_hour" + std::to_string(h));
    }
  }
  for (const char* tail : {"load_prev_day", "is_weekend", "is_holiday", "similar_days_avg"}) {
    names.emplace_back(tail);
  }
  return names;
}

Eigen::MatrixXd design_matrix(std::span<const FeatureRow> rows) {
  if (rows.empty()) throw ValidationError("design matrix needs at least one row");
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), kDesignWidth);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    check_row(r, i);
    const auto row = static_cast<Eigen::Index>(i);
    x(row, 0) = 1.0;
    x(row, 1) = r.trend;
    x(row, 2) = r.tmp;
    if (r.month > 1) {
      x(row, kMonthCol + r.month - 2) = 1.0;
      x(row, kMonthTmpCol + r.month - 2) = r.tmp;
    }
    if (r.hour > 0) x(row, kHourTmpCol + r.hour - 1) = r.tmp;
    const int cell = r.day_of_week * 24 + r.hour;
    if (cell > 0) x(row, kDayHourCol + cell - 1) = 1.0;
    x(row, kTailCol) = r.load_prev_day;
    x(row, kTailCol + 1) = r.is_weekend;
    x(row, kTailCol + 2) = r.is_holiday;
    x(row, kTailCol + 3) = r.similar_days_avg;
  }
  return x;
}

MlrModel fit(std::span<const FeatureRow> rows, std::span<const double> targets) {
  if (rows.size() != targets.size()) {
    throw ValidationError("fit: " + std::to_string(rows.size()) + " rows but " +
                          std::to_string(targets.size()) + " targets");
  }
  const Eigen::MatrixXd x = design_matrix(rows);
  const Eigen::Map<const Eigen::VectorXd> y(targets.data(), static_cast<Eigen::Index>(targets.size()));
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
  MlrModel model;
  model.coefficients = cod.solve(y);
  model.rank = static_cast<std::size_t>(cod.rank());
  model.rank_deficient = model.rank < kDesignWidth;
  return model;
}

std::vector<double> predict(const MlrModel& model, std::span<const FeatureRow> rows) {
  if (model.coefficients.size() != static_cast<Eigen::Index>(kDesignWidth)) {
    throw ValidationError("model has " + std::to_string(model.coefficients.size()) +
                          " coefficients, expected " + std::to_string(kDesignWidth));
  }
  const Eigen::VectorXd yhat = design_matrix(rows) * model.coefficients;
  return {yhat.data(), yhat.data() + yhat.size()};
}

double mape(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size() || actual.empty()) {
    throw AlignmentError("mape needs two nonempty sequences of equal length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) throw DomainError("mape: actual value is zero at index " + std::to_string(i));
    sum += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
  }
  return sum / static_cast<double>(actual.size());
}

CrossValidation kfold_cv(std::span<const FeatureRow> rows, std::span<const double> targets, std::size_t k) {
  const std::size_t n = rows.size();
  if (targets.size() != n) throw AlignmentError("kfold_cv: rows and targets differ in length");
  if (k < 2 || k > n) {
    throw DomainError("kfold_cv: k = " + std::to_string(k) + " is outside [2, " + std::to_string(n) + "]");
  }
  CrossValidation cv;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t lo = f * n / k;
    const std::size_t hi = (f + 1) * n / k;
    std::vector<FeatureRow> train_rows;
    std::vector<double> train_y;
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= lo && i < hi) continue;
      train_rows.push_back(rows[i]);
      train_y.push_back(targets[i]);
    }
    const MlrModel model = fit(train_rows, train_y);
    const auto held_rows = rows.subspan(lo, hi - lo);
    cv.fold_mape.push_back(mape(targets.subspan(lo, hi - lo), predict(model, held_rows)));
  }
  double sum = 0.0;
  for (double m : cv.fold_mape) sum += m;
  cv.mean = sum / static_cast<double>(k);
  return cv;
}

Calendar calendar_of(std::int64_t unix_seconds) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{unix_seconds}};
  const auto day = floor<days>(tp);
  const year_month_day ymd{day};
  const auto hour = duration_cast<hours>(tp - day).count();
  return Calendar{static_cast<int>(static_cast<unsigned>(ymd.month())), static_cast<int>(hour),
                  static_cast<int>(weekday{day}.c_encoding())};
}

namespace {

void check_hourly(std::span<const HourlySample> samples, const char* what) {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].timestamp - samples[i - 1].timestamp != kHour) {
      throw ValidationError(std::string(what) + ": samples " + std::to_string(i - 1) + " and " +
                            std::to_string(i) + " are not one hour apart");
    }
  }
}

FeatureRow make_row(const HourlySample& s, double trend, double prev_day, double similar) {
  const Calendar cal = calendar_of(s.timestamp);
  FeatureRow row;
  row.trend = trend;
  row.tmp = s.tmp_c;
  row.month = cal.month;
  row.hour = cal.hour;
  row.day_of_week = cal.day_of_week;
  row.load_prev_day = prev_day;
  row.is_weekend = cal.day_of_week == 0 || cal.day_of_week == 6;
  row.is_holiday = s.is_holiday;
  row.similar_days_avg = similar;
  return row;
}

// Load at absolute hour index `i` looking back into `history` (index 0 is
// the first sample).
double similar_average(std::span<const HourlySample> history, std::size_t i, std::size_t weeks) {
  double sum = 0.0;
  for (std::size_t w = 1; w <= weeks; ++w) sum += history[i - w * 168].mw;
  return sum / static_cast<double>(weeks);
}

}  // namespace

TrainingSet build_training_set(std::span<const HourlySample> history, std::size_t similar_days) {
  if (similar_days == 0) throw DomainError("similar_days must be at least 1");
  check_hourly(history, "training history");
  const std::size_t lookback = similar_days * 168;
  if (history.size() <= lookback) {
    throw ValidationError("training history needs more than " + std::to_string(lookback) + " hourly samples");
  }
  TrainingSet set;
  for (std::size_t i = lookback; i < history.size(); ++i) {
    set.rows.push_back(make_row(history[i], static_cast<double>(i), history[i - 24].mw,
                                similar_average(history, i, similar_days)));
    set.targets.push_back(history[i].mw);
  }
  return set;
}

std::vector<FeatureRow> next_day_features(std::span<const HourlySample> history,
                                          std::span<const HourlySample> next_day,
                                          std::size_t similar_days) {
  if (similar_days == 0) throw DomainError("similar_days must be at least 1");
  check_hourly(history, "training history");
  check_hourly(next_day, "next-day inputs");
  if (next_day.size() != 24) throw ValidationError("next-day inputs must hold 24 hourly rows");
  if (history.size() < similar_days * 168) {
    throw ValidationError("history is shorter than the similar-day look-back");
  }
  if (next_day.front().timestamp != history.back().timestamp + kHour) {
    throw ValidationError("next-day inputs do not follow the history");
  }
  std::vector<FeatureRow> rows;
  const std::size_t base = history.size();
  for (std::size_t h = 0; h < 24; ++h) {
    const std::size_t i = base + h;
    rows.push_back(make_row(next_day[h], static_cast<double>(i), history[i - 24].mw,
                            similar_average(history, i, similar_days)));
  }
  return rows;
}

}  // namespace peakreg
