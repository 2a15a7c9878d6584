#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "peakreg/billing.hpp"
#include "peakreg/forecast.hpp"
#include "peakreg/scenarios.hpp"

namespace peakreg::cli {

namespace fs = std::filesystem;

/// Unix seconds from either an integer or an ISO-8601 UTC timestamp
/// (YYYY-MM-DDTHH:MM:SS with optional trailing Z).
std::int64_t parse_timestamp(std::string_view text);

/// Shortest text that reads back to the same double.
std::string format_number(double value);

struct SeriesFile {
  TimeSeries series;
  std::int64_t start = 0;  ///< timestamp of the first row
};

/// Reads `timestamp,<value_column>`. Rows must be strictly uniformly spaced;
/// errors name the 1-based line.
SeriesFile read_series_csv(const fs::path& file, std::string_view value_column);

std::string series_csv(const TimeSeries& series, std::int64_t start, std::string_view value_column);

/// Reads `timestamp,mw,tmp_c,is_holiday`.
std::vector<HourlySample> read_training_csv(const fs::path& file);

/// Writes to a sibling temporary file and renames it over `file`.
void write_atomic(const fs::path& file, std::string_view content);

std::string read_file(const fs::path& file);

std::string sha256_hex(std::string_view bytes);

/// Scenario directory: scenario_<i>.csv with header timestamp,r plus
/// weights.csv with header scenario,weight.
ScenarioSet read_scenario_dir(const fs::path& dir);

/// Returns the names of the written files inside `dir`.
std::vector<std::string> write_scenario_dir(const fs::path& dir, const ScenarioSet& set, std::int64_t start);

/// Reproducibility record kept next to the artifacts of an output directory.
class Manifest {
 public:
  explicit Manifest(fs::path dir);

  void set_config(const std::string& serialized_config);
  void set_seeds(const std::vector<std::uint64_t>& seeds);
  /// Records `relative` (inside the directory) with the checksum of its
  /// current content.
  void add_artifact(const std::string& relative);
  void save() const;

  const std::map<std::string, std::string>& artifacts() const { return artifacts_; }

  static constexpr const char* kFileName = "manifest.json";

 private:
  fs::path dir_;
  std::string config_sha256_;
  std::string config_;
  std::vector<std::uint64_t> seeds_;
  std::map<std::string, std::string> artifacts_;
};

}  // namespace peakreg::cli
