#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "peakreg/battery.hpp"
#include "peakreg/billing.hpp"

namespace peakreg::cli {

struct HorizonConfig {
  double step_seconds = 4.0;
  std::size_t steps = 21600;
  double peak_window_seconds = 900.0;
  std::size_t downsample = 15;
};

struct ExperimentConfig {
  std::vector<std::uint64_t> seeds;  ///< defaults to 1..20
  std::size_t scenario_pool = 20;
  std::size_t scenarios_kept = 10;
  double sigma2 = 0.12;
  double base_mw = 0.5;
  double peak_mw = 1.0;
  double peak_minutes = 15.0;
  std::optional<std::size_t> peak_start_step;  ///< centered when unset
  std::vector<double> lambda_cell_grid_usd_per_wh{0.25, 0.5, 0.75};
  std::vector<double> lambda_peak_grid_usd_per_kw_month{6.0, 12.0, 18.0};
  std::vector<double> lambda_c_grid_usd_per_mw_h{25.0, 50.0, 75.0};
  std::optional<double> mis_to_degradation = 2.0;
  double peak_duration_fraction = 0.95;
  std::size_t forecast_folds = 10;
  std::size_t similar_days = 3;

  ExperimentConfig();
};

/// File bindings. Empty means unbound; subcommands that need a binding fail
/// with a ValidationError naming the key.
struct PathsConfig {
  std::string output_dir = "out";
  std::string load_csv;
  std::string signal_csv;
  std::string forecast_csv;
  std::string scenario_dir;
  std::string plan_file;
  std::string training_csv;
  std::string next_day_csv;
};

struct RunConfig {
  Tariff tariff;
  BatterySpec battery;
  double soc_ini = 0.5;
  CellParams cell;
  HorizonConfig horizon;
  ExperimentConfig experiment;
  PathsConfig paths;

  /// Every key, in a fixed order.
  nlohmann::ordered_json to_json() const;

  /// Strict: every key must be present and no unknown key is accepted.
  /// ValidationError messages name the key path (e.g. "tariff.lambda_c_usd_per_mw_h").
  static RunConfig from_json(const nlohmann::json& j);

  static RunConfig load(const std::filesystem::path& file);

  void validate() const;

  /// Tariff with the horizon's peak window applied.
  Tariff effective_tariff() const;

  /// Sets one dotted key from a command-line value. The value is read as
  /// JSON when it parses, otherwise as a string.
  RunConfig& override_value(std::string_view key_path, std::string_view value);

  /// Applies several assignments and validates the result once.
  RunConfig& override_values(const std::vector<std::pair<std::string, std::string>>& assignments);
};

std::string serialize(const RunConfig& config);

/// Relative difference between the configured lambda_b and the cell-price
/// formula, when it exceeds 1%; empty otherwise.
std::optional<std::string> lambda_b_warning(const RunConfig& config);

}  // namespace peakreg::cli
