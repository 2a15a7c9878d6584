#include "io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "peakreg/errors.hpp"

namespace peakreg::cli {

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& field : out) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
  }
  return out;
}

double parse_number(const std::string& text, const std::string& where) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ValidationError(where + ": '" + text + "' is not a finite number");
  }
  return value;
}

std::string where(const fs::path& file, std::size_t line) {
  return file.string() + " line " + std::to_string(line);
}

// Yields non-empty lines with their 1-based numbers after checking the header.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_table(
    const fs::path& file, const std::vector<std::string>& header) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open " + file.string());
  std::string line;
  std::size_t number = 0;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line == "\r") continue;
    auto fields = split(line, ',');
    if (!saw_header) {
      if (fields != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw ValidationError(where(file, number) + ": expected header '" + expected + "'");
      }
      saw_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw ValidationError(where(file, number) + ": expected " + std::to_string(header.size()) + " fields");
    }
    rows.emplace_back(number, std::move(fields));
  }
  if (!saw_header) throw ValidationError(file.string() + " is empty");
  if (rows.empty()) throw ValidationError(file.string() + " has no data rows");
  return rows;
}

}  // namespace

std::int64_t parse_timestamp(std::string_view text) {
  std::int64_t seconds = 0;
  const auto* end = text.data() + text.size();
  if (const auto [ptr, ec] = std::from_chars(text.data(), end, seconds); ec == std::errc{} && ptr == end) {
    return seconds;
  }
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char tail = 0;
  const std::string copy(text);
  const int got = std::sscanf(copy.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &s, &tail);
  if (got < 6 || (got == 7 && (tail != 'Z' || copy.back() != 'Z' || copy.size() != 20)) ||
      (got == 6 && copy.size() != 19)) {
    throw ValidationError("'" + copy + "' is neither integer seconds nor an ISO-8601 UTC timestamp");
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) throw ValidationError("'" + copy + "' is not a valid date-time");
  return sys_days{ymd}.time_since_epoch().count() * 86400LL + h * 3600LL + mi * 60LL + s;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

SeriesFile read_series_csv(const fs::path& file, std::string_view value_column) {
  const auto rows = read_table(file, {"timestamp", std::string(value_column)});
  std::vector<std::int64_t> stamps;
  std::vector<double> values;
  for (const auto& [line, fields] : rows) {
    try {
      stamps.push_back(parse_timestamp(fields[0]));
    } catch (const ValidationError& e) {
      throw ValidationError(where(file, line) + ": " + e.what());
    }
    values.push_back(parse_number(fields[1], where(file, line)));
  }
  std::int64_t step = 0;
  if (stamps.size() > 1) {
    step = stamps[1] - stamps[0];
    if (step <= 0) throw ValidationError(where(file, rows[1].first) + ": timestamps must increase");
    for (std::size_t i = 2; i < stamps.size(); ++i) {
      if (stamps[i] - stamps[i - 1] != step) {
        throw ValidationError(where(file, rows[i].first) + ": spacing differs from " + std::to_string(step) + " s");
      }
    }
  } else {
    throw ValidationError(file.string() + ": a series needs at least two rows to fix its step");
  }
  return SeriesFile{TimeSeries(static_cast<double>(step), std::move(values)), stamps.front()};
}

std::string series_csv(const TimeSeries& series, std::int64_t start, std::string_view value_column) {
  const auto step = static_cast<std::int64_t>(std::llround(series.step_seconds()));
  if (std::abs(series.step_seconds() - static_cast<double>(step)) > 1e-9) {
    throw ValidationError("series step is not a whole number of seconds");
  }
  std::string out = "timestamp,";
  out += value_column;
  out += '\n';
  for (std::size_t t = 0; t < series.size(); ++t) {
    out += std::to_string(start + static_cast<std::int64_t>(t) * step);
    out += ',';
    out += format_number(series[t]);
    out += '\n';
  }
  return out;
}

std::vector<HourlySample> read_training_csv(const fs::path& file) {
  const auto rows = read_table(file, {"timestamp", "mw", "tmp_c", "is_holiday"});
  std::vector<HourlySample> out;
  for (const auto& [line, fields] : rows) {
    HourlySample s;
    try {
      s.timestamp = parse_timestamp(fields[0]);
    } catch (const ValidationError& e) {
      throw ValidationError(where(file, line) + ": " + e.what());
    }
    s.mw = parse_number(fields[1], where(file, line));
    s.tmp_c = parse_number(fields[2], where(file, line));
    if (fields[3] != "0" && fields[3] != "1") throw ValidationError(where(file, line) + ": is_holiday must be 0 or 1");
    s.is_holiday = fields[3] == "1";
    out.push_back(s);
  }
  return out;
}

void write_atomic(const fs::path& file, std::string_view content) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  fs::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ValidationError("short write to " + tmp.string());
  }
  fs::rename(tmp, file);
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

ScenarioSet read_scenario_dir(const fs::path& dir) {
  const fs::path weights_file = dir / "weights.csv";
  const auto rows = read_table(weights_file, {"scenario", "weight"});
  ScenarioSet set;
  for (const auto& [line, fields] : rows) {
    const fs::path file = dir / ("scenario_" + fields[0] + ".csv");
    set.scenarios.push_back(read_series_csv(file, "r").series);
    set.weights.push_back(parse_number(fields[1], where(weights_file, line)));
  }
  set.validate();
  return set;
}

std::vector<std::string> write_scenario_dir(const fs::path& dir, const ScenarioSet& set, std::int64_t start) {
  std::vector<std::string> written;
  std::string weights = "scenario,weight\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::string name = "scenario_" + std::to_string(i) + ".csv";
    write_atomic(dir / name, series_csv(set.scenarios[i], start, "r"));
    written.push_back(name);
    weights += std::to_string(i) + "," + format_number(set.weights[i]) + "\n";
  }
  write_atomic(dir / "weights.csv", weights);
  written.emplace_back("weights.csv");
  return written;
}

Manifest::Manifest(fs::path dir) : dir_(std::move(dir)) {
  const fs::path file = dir_ / kFileName;
  if (!fs::exists(file)) return;
  const auto j = nlohmann::json::parse(read_file(file));
  config_sha256_ = j.value("config_sha256", "");
  config_ = j.value("config", "");
  seeds_ = j.value("seeds", std::vector<std::uint64_t>{});
  for (const auto& item : j.at("artifacts").items()) artifacts_[item.key()] = item.value().get<std::string>();
}

void Manifest::set_config(const std::string& serialized_config) {
  config_ = serialized_config;
  config_sha256_ = sha256_hex(serialized_config);
}

void Manifest::set_seeds(const std::vector<std::uint64_t>& seeds) { seeds_ = seeds; }

void Manifest::add_artifact(const std::string& relative) {
  artifacts_[relative] = sha256_hex(read_file(dir_ / relative));
}

void Manifest::save() const {
  nlohmann::ordered_json j;
  j["config_sha256"] = config_sha256_;
  j["config"] = config_;
  j["seeds"] = seeds_;
  nlohmann::ordered_json artifacts = nlohmann::ordered_json::object();
  for (const auto& [path, sum] : artifacts_) artifacts[path] = sum;
  j["artifacts"] = artifacts;
  write_atomic(dir_ / kFileName, j.dump(2) + "\n");
}

}  // namespace peakreg::cli
