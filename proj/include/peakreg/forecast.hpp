#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace peakreg {

/// Regressors for one hourly load sample.
struct FeatureRow {
  double trend = 0.0;          ///< hours since the first history sample
  double tmp = 0.0;            ///< temperature forecast, deg C
  int month = 1;               ///< 1..12
  int hour = 0;                ///< 0..23
  int day_of_week = 0;         ///< 0 = Sunday .. 6 = Saturday
  double load_prev_day = 0.0;  ///< MW at the same hour one day earlier
  int is_weekend = 0;
  int is_holiday = 0;
  double similar_days_avg = 0.0;  ///< MW, mean of recent same-weekday hours
};

/// Column layout of the design matrix. Categorical levels are one-hot with
/// the first level dropped.
///   0        intercept
///   1        trend
///   2        tmp
///   3..13    month 2..12
///   14..36   hour 1..23 x tmp
///   37..47   month 2..12 x tmp
///   48..214  (day, hour) for every pair except (0, 0), day-major
///   215      load_prev_day
///   216      is_weekend
///   217      is_holiday
///   218      similar_days_avg
inline constexpr std::size_t kDesignWidth = 219;

/// Human-readable column names in design order.
std::vector<std::string> design_columns();

/// ValidationError on out-of-range categoricals or non-finite numerics.
Eigen::MatrixXd design_matrix(std::span<const FeatureRow> rows);

struct MlrModel {
  Eigen::VectorXd coefficients;
  std::size_t rank = 0;
  /// The design did not have full column rank; the fit is the minimum-norm
  /// least-squares solution.
  bool rank_deficient = false;
};

MlrModel fit(std::span<const FeatureRow> rows, std::span<const double> targets);
std::vector<double> predict(const MlrModel& model, std::span<const FeatureRow> rows);

/// Mean of |actual - predicted| / |actual|. DomainError names the index of a
/// zero actual value.
double mape(std::span<const double> actual, std::span<const double> predicted);

struct CrossValidation {
  std::vector<double> fold_mape;
  double mean = 0.0;
};

/// Contiguous time-ordered folds; fold f holds samples [f n / k, (f+1) n / k).
CrossValidation kfold_cv(std::span<const FeatureRow> rows, std::span<const double> targets,
                         std::size_t k = 10);

/// One hourly observation of the training file.
struct HourlySample {
  std::int64_t timestamp = 0;  ///< Unix seconds, UTC
  double mw = 0.0;
  double tmp_c = 0.0;
  bool is_holiday = false;
};

/// Calendar fields of a Unix timestamp (UTC).
struct Calendar {
  int month = 1;
  int hour = 0;
  int day_of_week = 0;
};
Calendar calendar_of(std::int64_t unix_seconds);

struct TrainingSet {
  std::vector<FeatureRow> rows;
  std::vector<double> targets;
};

/// Features for every sample with a full look-back of `similar_days` weeks.
/// Samples must be hourly and contiguous (ValidationError otherwise).
TrainingSet build_training_set(std::span<const HourlySample> history, std::size_t similar_days = 3);

/// Next-day rows for 24 hours following the history. `next_day` supplies the
/// timestamps, temperature forecasts and holiday flags; its mw is ignored.
std::vector<FeatureRow> next_day_features(std::span<const HourlySample> history,
                                          std::span<const HourlySample> next_day,
                                          std::size_t similar_days = 3);

}  // namespace peakreg
