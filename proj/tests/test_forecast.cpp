#include <cmath>
#include <random>

#include "doctest.h"
#include "peakreg/errors.hpp"
#include "peakreg/forecast.hpp"

using namespace peakreg;

namespace {

std::vector<FeatureRow> random_rows(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> tmp(-5.0, 35.0);
  std::uniform_real_distribution<double> mw(20.0, 80.0);
  std::uniform_int_distribution<int> month(1, 12), hour(0, 23), day(0, 6), flag(0, 1);
  std::vector<FeatureRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = rows[i];
    r.trend = static_cast<double>(i);
    r.tmp = tmp(rng);
    r.month = month(rng);
    r.hour = hour(rng);
    r.day_of_week = day(rng);
    r.load_prev_day = mw(rng);
    r.is_weekend = r.day_of_week == 0 || r.day_of_week == 6;
    r.is_holiday = flag(rng) && flag(rng) && flag(rng);
    r.similar_days_avg = mw(rng);
  }
  return rows;
}

// Design columns written out one by one from the documented layout.
std::vector<double> reference_row(const FeatureRow& r) {
  std::vector<double> x(219, 0.0);
  x[0] = 1.0;
  x[1] = r.trend;
  x[2] = r.tmp;
  if (r.month > 1) x[3 + (r.month - 2)] = 1.0;
  if (r.hour > 0) x[14 + (r.hour - 1)] = r.tmp;
  if (r.month > 1) x[37 + (r.month - 2)] = r.tmp;
  const int pair = r.day_of_week * 24 + r.hour;
  if (pair > 0) x[48 + (pair - 1)] = 1.0;
  x[215] = r.load_prev_day;
  x[216] = r.is_weekend;
  x[217] = r.is_holiday;
  x[218] = r.similar_days_avg;
  return x;
}

}  // namespace

TEST_CASE("design matrix matches the documented column layout") {
  std::mt19937_64 rng(51);
  const auto rows = random_rows(rng, 300);
  const auto x = design_matrix(rows);
  REQUIRE(x.cols() == static_cast<Eigen::Index>(kDesignWidth));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto ref = reference_row(rows[i]);
    for (std::size_t c = 0; c < kDesignWidth; ++c) CHECK(x(i, c) == ref[c]);
  }
  const auto names = design_columns();
  CHECK(names.size() == kDesignWidth);
  CHECK(names.front() == "intercept");
}

TEST_CASE("design matrix locality and zero numerics") {
  FeatureRow a;
  auto x = design_matrix(std::span<const FeatureRow>(&a, 1));
  CHECK(x(0, 0) == 1.0);
  CHECK(x.row(0).tail(kDesignWidth - 1).cwiseAbs().sum() == 0.0);

  a.tmp = 12.0;
  a.hour = 5;
  FeatureRow b = a;
  b.month = 7;
  const std::vector<FeatureRow> pair{a, b};
  x = design_matrix(pair);
  for (std::size_t c = 0; c < kDesignWidth; ++c) {
    const bool month_linked = (c >= 3 && c <= 13) || (c >= 37 && c <= 47);
    if (!month_linked) CHECK(x(0, c) == x(1, c));
  }
  CHECK(x(1, 3 + 5) == 1.0);
  CHECK(x(1, 37 + 5) == 12.0);

  FeatureRow bad;
  bad.month = 13;
  CHECK_THROWS_AS(design_matrix(std::span<const FeatureRow>(&bad, 1)), ValidationError);
  bad.month = 1;
  bad.hour = 24;
  CHECK_THROWS_AS(design_matrix(std::span<const FeatureRow>(&bad, 1)), ValidationError);
  CHECK_THROWS_AS(design_matrix(std::span<const FeatureRow>()), ValidationError);
}

TEST_CASE("noise-free targets recover the generating coefficients") {
  std::mt19937_64 rng(52);
  const auto rows = random_rows(rng, 3000);
  const auto x = design_matrix(rows);
  // Recoverable only up to the design's null space; draw beta inside the row space.
  Eigen::VectorXd beta(kDesignWidth);
  std::normal_distribution<double> n(0.0, 1.0);
  for (Eigen::Index i = 0; i < beta.size(); ++i) beta[i] = n(rng);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
  const Eigen::VectorXd target_beta = cod.solve(x * beta);
  const Eigen::VectorXd y = x * target_beta;
  const auto model = fit(rows, std::vector<double>(y.data(), y.data() + y.size()));
  const double err = (model.coefficients - target_beta).norm() / target_beta.norm();
  MESSAGE("design rank " << model.rank << ", coefficient recovery error " << err);
  CHECK(err <= 1e-8);
}

TEST_CASE("fit matches the normal equations and leaves orthogonal residuals") {
  std::mt19937_64 rng(53);
  // Restrict categoricals so the design has full column rank in a few columns.
  std::vector<FeatureRow> rows = random_rows(rng, 400);
  std::normal_distribution<double> noise(0.0, 2.0);
  std::vector<double> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) y[i] = 40.0 + 0.3 * rows[i].tmp + 0.5 * rows[i].load_prev_day + noise(rng);
  const auto model = fit(rows, y);
  const auto x = design_matrix(rows);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  const Eigen::VectorXd residual = yv - x * model.coefficients;
  CHECK((x.transpose() * residual).cwiseAbs().maxCoeff() <= 1e-8 * x.norm() * yv.norm());

  // Normal equations on a hand-picked full-rank subset of columns.
  const std::vector<int> cols{0, 1, 2, 215, 216, 217, 218};
  Eigen::MatrixXd xs(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) xs.col(static_cast<Eigen::Index>(c)) = x.col(cols[c]);
  const Eigen::VectorXd normal = (xs.transpose() * xs).ldlt().solve(xs.transpose() * yv);
  std::vector<FeatureRow> reduced = rows;
  for (auto& r : reduced) {
    // Collapse every categorical onto its dropped level.
    r.month = 1;
    r.hour = 0;
    r.day_of_week = 0;
  }
  const auto small = fit(reduced, y);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    CHECK(small.coefficients[cols[c]] == doctest::Approx(normal[static_cast<Eigen::Index>(c)]).epsilon(1e-6));
  }
  CHECK(small.rank_deficient);
}

TEST_CASE("constant targets give an intercept-only fit") {
  std::mt19937_64 rng(54);
  const auto rows = random_rows(rng, 500);
  const auto model = fit(rows, std::vector<double>(rows.size(), 42.0));
  const auto pred = predict(model, rows);
  for (double p : pred) CHECK(p == doctest::Approx(42.0).epsilon(1e-9));
}

TEST_CASE("duplicated information does not change fitted values") {
  std::mt19937_64 rng(55);
  auto rows = random_rows(rng, 500);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) y[i] = 10.0 + rows[i].tmp + noise(rng);
  // is_weekend is a function of day_of_week, so its column duplicates one-hot information.
  const auto with = predict(fit(rows, y), rows);
  for (auto& r : rows) r.is_weekend = 0;
  const auto without = predict(fit(rows, y), rows);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(with[i] == doctest::Approx(without[i]).epsilon(1e-8));
}

TEST_CASE("mape") {
  const std::vector<double> a{1.0, 1.0}, p{1.1, 0.9};
  CHECK(mape(a, a) == 0.0);
  CHECK(mape(a, p) == doctest::Approx(0.1).epsilon(1e-12));
  const std::vector<double> z{1.0, 0.0};
  try {
    mape(z, p);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }
}

TEST_CASE("cross validation") {
  std::mt19937_64 rng(56);
  auto rows = random_rows(rng, 600);
  // Cycle the calendar so every training split sees every level.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].month = 1;
    rows[i].hour = static_cast<int>(i % 24);
    rows[i].day_of_week = static_cast<int>((i / 24) % 7);
  }
  std::vector<double> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) y[i] = 30.0 + 0.4 * rows[i].tmp + 0.2 * rows[i].load_prev_day;
  const auto cv = kfold_cv(rows, y, 10);
  CHECK(cv.fold_mape.size() == 10);
  CHECK(cv.mean <= 1e-6);
  CHECK_THROWS_AS(kfold_cv(rows, y, 601), DomainError);
  CHECK_THROWS_AS(kfold_cv(rows, y, 1), DomainError);

  // Leave-one-out on a tiny set against direct refits.
  std::vector<FeatureRow> tiny(rows.begin(), rows.begin() + 12);
  std::vector<double> ty(12);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < 12; ++i) ty[i] = 50.0 + tiny[i].tmp + noise(rng);
  const auto loo = kfold_cv(tiny, ty, 12);
  double direct = 0.0;
  for (std::size_t i = 0; i < 12; ++i) {
    std::vector<FeatureRow> tr;
    std::vector<double> tt;
    for (std::size_t j = 0; j < 12; ++j) {
      if (j == i) continue;
      tr.push_back(tiny[j]);
      tt.push_back(ty[j]);
    }
    const auto pred = predict(fit(tr, tt), std::span<const FeatureRow>(&tiny[i], 1));
    const double m = std::abs(ty[i] - pred[0]) / std::abs(ty[i]);
    CHECK(loo.fold_mape[i] == doctest::Approx(m).epsilon(1e-9));
    direct += m / 12.0;
  }
  CHECK(loo.mean == doctest::Approx(direct).epsilon(1e-12));
  // The mean does not depend on fold order.
  std::vector<double> reversed(loo.fold_mape.rbegin(), loo.fold_mape.rend());
  double rmean = 0.0;
  for (double m : reversed) rmean += m / 12.0;
  CHECK(rmean == doctest::Approx(loo.mean).epsilon(1e-12));
}

TEST_CASE("calendar and training features") {
  // 2023-01-01 00:00 UTC was a Sunday.
  const std::int64_t t0 = 1672531200;
  auto c = calendar_of(t0);
  CHECK(c.month == 1);
  CHECK(c.hour == 0);
  CHECK(c.day_of_week == 0);
  c = calendar_of(t0 + 24 * 3600 * 31 + 13 * 3600);
  CHECK(c.month == 2);
  CHECK(c.hour == 13);
  CHECK(c.day_of_week == 3);

  std::vector<HourlySample> history;
  for (int i = 0; i < 24 * 30; ++i) {
    history.push_back({t0 + i * 3600LL, 10.0 + static_cast<double>(i % 24) + 0.001 * i, 5.0, false});
  }
  const auto set = build_training_set(history, 3);
  REQUIRE(set.rows.size() == history.size() - 3 * 168);
  const auto& first = set.rows.front();
  const std::size_t idx = 3 * 168;
  CHECK(set.targets.front() == history[idx].mw);
  CHECK(first.trend == doctest::Approx(static_cast<double>(idx)));
  CHECK(first.load_prev_day == history[idx - 24].mw);
  CHECK(first.similar_days_avg ==
        doctest::Approx((history[idx - 168].mw + history[idx - 336].mw + history[idx - 504].mw) / 3.0));
  CHECK(first.is_weekend == (first.day_of_week == 0 || first.day_of_week == 6));

  std::vector<HourlySample> next;
  for (int i = 0; i < 24; ++i) next.push_back({history.back().timestamp + (i + 1) * 3600LL, 0.0, 6.0, i == 3});
  const auto rows = next_day_features(history, next, 3);
  REQUIRE(rows.size() == 24);
  CHECK(rows[0].load_prev_day == history[history.size() - 24].mw);
  CHECK(rows[3].is_holiday == 1);

  auto gap = history;
  gap[100].timestamp += 60;
  CHECK_THROWS_AS(build_training_set(gap, 3), ValidationError);
  next[0].timestamp += 3600;
  CHECK_THROWS_AS(next_day_features(history, next, 3), ValidationError);
}
