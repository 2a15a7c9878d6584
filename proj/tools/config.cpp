#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "peakreg/errors.hpp"

namespace peakreg::cli {

using nlohmann::json;
using nlohmann::ordered_json;

ExperimentConfig::ExperimentConfig() {
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
}

namespace {

// Walks one JSON object, recording the keys consumed so that leftovers can
// be reported as unknown.
class Block {
 public:
  Block(const json& parent, const std::string& key, const std::string& prefix)
      : path_(prefix.empty() ? key : prefix + "." + key) {
    if (!parent.contains(key)) throw ValidationError("missing config key: " + path_);
    node_ = &parent.at(key);
    if (!node_->is_object()) throw ValidationError("config key " + path_ + " must be an object");
  }

  template <class T>
  T get(const std::string& key) {
    const json& v = field(key);
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ValidationError("config key " + path_ + "." + key + " has the wrong type");
    }
  }

  template <class T>
  std::optional<T> get_optional(const std::string& key) {
    const json& v = field(key);
    if (v.is_null()) return std::nullopt;
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ValidationError("config key " + path_ + "." + key + " has the wrong type");
    }
  }

  double number(const std::string& key) {
    const json& v = field(key);
    if (!v.is_number()) throw ValidationError("config key " + path_ + "." + key + " must be a number");
    return v.get<double>();
  }

  std::size_t count(const std::string& key) {
    const json& v = field(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ValidationError("config key " + path_ + "." + key + " must be a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  void finish() const {
    for (const auto& item : node_->items()) {
      if (!seen_.count(item.key())) throw ValidationError("unknown config key: " + path_ + "." + item.key());
    }
  }

  const json& node() const { return *node_; }
  const std::string& path() const { return path_; }

 private:
  const json& field(const std::string& key) {
    if (!node_->contains(key)) throw ValidationError("missing config key: " + path_ + "." + key);
    seen_.insert(key);
    return node_->at(key);
  }

  std::string path_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ValidationError("config key " + key + " " + what);
}

}  // namespace

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["tariff"] = {
      {"lambda_elec_usd_per_mwh", tariff.lambda_elec_usd_per_mwh},
      {"lambda_peak_usd_per_kw_month", tariff.lambda_peak_usd_per_kw_month},
      {"lambda_c_usd_per_mw_h", tariff.lambda_c_usd_per_mw_h},
      {"lambda_mis_usd_per_mwh", tariff.lambda_mis_usd_per_mwh},
      {"days_per_month", tariff.days_per_month},
      {"billing_days", tariff.billing_days ? ordered_json(*tariff.billing_days) : ordered_json(nullptr)},
  };
  j["battery"] = {
      {"p_max_mw", battery.p_max_mw},
      {"energy_mwh", battery.energy_mwh},
      {"soc_min", battery.soc_min},
      {"soc_max", battery.soc_max},
      {"soc_ini", soc_ini},
      {"eta_c", battery.eta_c},
      {"eta_d", battery.eta_d},
      {"lambda_b_usd_per_mwh", battery.lambda_b_usd_per_mwh},
  };
  j["cell"] = {
      {"lambda_cell_usd_per_wh", cell.lambda_cell_usd_per_wh},
      {"cycles", cell.cycles},
      {"dod_window", cell.dod_window},
  };
  j["horizon"] = {
      {"step_seconds", horizon.step_seconds},
      {"steps", horizon.steps},
      {"peak_window_seconds", horizon.peak_window_seconds},
      {"downsample", horizon.downsample},
  };
  const auto& e = experiment;
  j["experiment"] = {
      {"seeds", e.seeds},
      {"scenario_pool", e.scenario_pool},
      {"scenarios_kept", e.scenarios_kept},
      {"sigma2", e.sigma2},
      {"base_mw", e.base_mw},
      {"peak_mw", e.peak_mw},
      {"peak_minutes", e.peak_minutes},
      {"peak_start_step", e.peak_start_step ? ordered_json(*e.peak_start_step) : ordered_json(nullptr)},
      {"lambda_cell_grid_usd_per_wh", e.lambda_cell_grid_usd_per_wh},
      {"lambda_peak_grid_usd_per_kw_month", e.lambda_peak_grid_usd_per_kw_month},
      {"lambda_c_grid_usd_per_mw_h", e.lambda_c_grid_usd_per_mw_h},
      {"mis_to_degradation", e.mis_to_degradation ? ordered_json(*e.mis_to_degradation) : ordered_json(nullptr)},
      {"peak_duration_fraction", e.peak_duration_fraction},
      {"forecast_folds", e.forecast_folds},
      {"similar_days", e.similar_days},
  };
  j["paths"] = {
      {"output_dir", paths.output_dir},
      {"load_csv", paths.load_csv},
      {"signal_csv", paths.signal_csv},
      {"forecast_csv", paths.forecast_csv},
      {"scenario_dir", paths.scenario_dir},
      {"plan_file", paths.plan_file},
      {"training_csv", paths.training_csv},
      {"next_day_csv", paths.next_day_csv},
  };
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config root must be an object");
  RunConfig c;
  {
    Block b(j, "tariff", "");
    c.tariff.lambda_elec_usd_per_mwh = b.number("lambda_elec_usd_per_mwh");
    c.tariff.lambda_peak_usd_per_kw_month = b.number("lambda_peak_usd_per_kw_month");
    c.tariff.lambda_c_usd_per_mw_h = b.number("lambda_c_usd_per_mw_h");
    c.tariff.lambda_mis_usd_per_mwh = b.number("lambda_mis_usd_per_mwh");
    c.tariff.days_per_month = b.number("days_per_month");
    c.tariff.billing_days = b.get_optional<double>("billing_days");
    b.finish();
  }
  {
    Block b(j, "battery", "");
    c.battery.p_max_mw = b.number("p_max_mw");
    c.battery.energy_mwh = b.number("energy_mwh");
    c.battery.soc_min = b.number("soc_min");
    c.battery.soc_max = b.number("soc_max");
    c.soc_ini = b.number("soc_ini");
    c.battery.eta_c = b.number("eta_c");
    c.battery.eta_d = b.number("eta_d");
    c.battery.lambda_b_usd_per_mwh = b.number("lambda_b_usd_per_mwh");
    b.finish();
  }
  {
    Block b(j, "cell", "");
    c.cell.lambda_cell_usd_per_wh = b.number("lambda_cell_usd_per_wh");
    c.cell.cycles = static_cast<int>(b.count("cycles"));
    c.cell.dod_window = b.number("dod_window");
    b.finish();
  }
  {
    Block b(j, "horizon", "");
    c.horizon.step_seconds = b.number("step_seconds");
    c.horizon.steps = b.count("steps");
    c.horizon.peak_window_seconds = b.number("peak_window_seconds");
    c.horizon.downsample = b.count("downsample");
    b.finish();
  }
  {
    Block b(j, "experiment", "");
    auto& e = c.experiment;
    e.seeds = b.get<std::vector<std::uint64_t>>("seeds");
    e.scenario_pool = b.count("scenario_pool");
    e.scenarios_kept = b.count("scenarios_kept");
    e.sigma2 = b.number("sigma2");
    e.base_mw = b.number("base_mw");
    e.peak_mw = b.number("peak_mw");
    e.peak_minutes = b.number("peak_minutes");
    e.peak_start_step = b.get_optional<std::size_t>("peak_start_step");
    e.lambda_cell_grid_usd_per_wh = b.get<std::vector<double>>("lambda_cell_grid_usd_per_wh");
    e.lambda_peak_grid_usd_per_kw_month = b.get<std::vector<double>>("lambda_peak_grid_usd_per_kw_month");
    e.lambda_c_grid_usd_per_mw_h = b.get<std::vector<double>>("lambda_c_grid_usd_per_mw_h");
    e.mis_to_degradation = b.get_optional<double>("mis_to_degradation");
    e.peak_duration_fraction = b.number("peak_duration_fraction");
    e.forecast_folds = b.count("forecast_folds");
    e.similar_days = b.count("similar_days");
    b.finish();
  }
  {
    Block b(j, "paths", "");
    auto& p = c.paths;
    p.output_dir = b.get<std::string>("output_dir");
    p.load_csv = b.get<std::string>("load_csv");
    p.signal_csv = b.get<std::string>("signal_csv");
    p.forecast_csv = b.get<std::string>("forecast_csv");
    p.scenario_dir = b.get<std::string>("scenario_dir");
    p.plan_file = b.get<std::string>("plan_file");
    p.training_csv = b.get<std::string>("training_csv");
    p.next_day_csv = b.get<std::string>("next_day_csv");
    b.finish();
  }
  for (const auto& item : j.items()) {
    static const std::set<std::string> blocks{"tariff", "battery", "cell", "horizon", "experiment", "paths"};
    if (!blocks.count(item.key())) throw ValidationError("unknown config key: " + item.key());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open config file " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config file " + file.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

void RunConfig::validate() const {
  const auto& t = tariff;
  for (auto [key, v] : {std::pair{"tariff.lambda_elec_usd_per_mwh", t.lambda_elec_usd_per_mwh},
                        {"tariff.lambda_peak_usd_per_kw_month", t.lambda_peak_usd_per_kw_month},
                        {"tariff.lambda_c_usd_per_mw_h", t.lambda_c_usd_per_mw_h},
                        {"tariff.lambda_mis_usd_per_mwh", t.lambda_mis_usd_per_mwh}}) {
    require(std::isfinite(v) && v >= 0.0, key, "must be a non-negative number");
  }
  require(t.days_per_month > 0.0, "tariff.days_per_month", "must be positive");
  require(!t.billing_days || *t.billing_days > 0.0, "tariff.billing_days", "must be positive or null");
  const auto& b = battery;
  require(b.p_max_mw >= 0.0, "battery.p_max_mw", "must be non-negative");
  require(b.energy_mwh > 0.0, "battery.energy_mwh", "must be positive");
  require(b.soc_min >= 0.0 && b.soc_min < b.soc_max && b.soc_max <= 1.0, "battery.soc_min",
          "and battery.soc_max must satisfy 0 <= soc_min < soc_max <= 1");
  require(soc_ini >= b.soc_min && soc_ini <= b.soc_max, "battery.soc_ini", "must lie in [soc_min, soc_max]");
  require(b.eta_c > 0.0 && b.eta_c <= 1.0, "battery.eta_c", "must lie in (0, 1]");
  require(b.eta_d > 0.0 && b.eta_d <= 1.0, "battery.eta_d", "must lie in (0, 1]");
  require(b.lambda_b_usd_per_mwh >= 0.0, "battery.lambda_b_usd_per_mwh", "must be non-negative");
  require(cell.lambda_cell_usd_per_wh >= 0.0, "cell.lambda_cell_usd_per_wh", "must be non-negative");
  require(cell.cycles > 0, "cell.cycles", "must be positive");
  require(cell.dod_window > 0.0 && cell.dod_window <= 1.0, "cell.dod_window", "must lie in (0, 1]");
  require(horizon.step_seconds > 0.0, "horizon.step_seconds", "must be positive");
  require(horizon.steps > 0, "horizon.steps", "must be positive");
  require(horizon.peak_window_seconds > 0.0, "horizon.peak_window_seconds", "must be positive");
  require(horizon.downsample > 0, "horizon.downsample", "must be positive");
  try {
    const std::size_t w = effective_tariff().window_steps(horizon.step_seconds);
    require(horizon.steps % w == 0, "horizon.steps", "must be a whole number of peak windows");
    require(w % horizon.downsample == 0, "horizon.downsample", "must divide the peak window");
  } catch (const AlignmentError&) {
    throw ValidationError("config key horizon.peak_window_seconds is not a multiple of horizon.step_seconds");
  }
  const auto& e = experiment;
  require(!e.seeds.empty(), "experiment.seeds", "must list at least one seed");
  require(e.scenarios_kept >= 1 && e.scenarios_kept <= e.scenario_pool, "experiment.scenarios_kept",
          "must lie in [1, experiment.scenario_pool]");
  require(e.sigma2 > 0.0, "experiment.sigma2", "must be positive");
  require(e.peak_minutes >= 0.0, "experiment.peak_minutes", "must be non-negative");
  require(!e.mis_to_degradation || *e.mis_to_degradation >= 0.0, "experiment.mis_to_degradation",
          "must be non-negative or null");
  require(e.peak_duration_fraction > 0.0 && e.peak_duration_fraction <= 1.0,
          "experiment.peak_duration_fraction", "must lie in (0, 1]");
  require(e.forecast_folds >= 2, "experiment.forecast_folds", "must be at least 2");
  require(e.similar_days >= 1, "experiment.similar_days", "must be at least 1");
}

Tariff RunConfig::effective_tariff() const {
  Tariff t = tariff;
  t.peak_window_seconds = horizon.peak_window_seconds;
  return t;
}

namespace {

void set_key(ordered_json& j, std::string_view key_path, std::string_view value) {
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = std::string(value);
  }
  std::string pointer = "/" + std::string(key_path);
  for (auto& ch : pointer) {
    if (ch == '.') ch = '/';
  }
  const json::json_pointer ptr(pointer);
  if (!j.contains(ptr)) throw ValidationError("unknown config key: " + std::string(key_path));
  // Strings stay strings even when they look like numbers.
  if (j.at(ptr).is_string() && !parsed.is_string()) parsed = std::string(value);
  j[ptr] = parsed;
}

}  // namespace

RunConfig& RunConfig::override_value(std::string_view key_path, std::string_view value) {
  return override_values({{std::string(key_path), std::string(value)}});
}

RunConfig& RunConfig::override_values(const std::vector<std::pair<std::string, std::string>>& assignments) {
  ordered_json j = to_json();
  for (const auto& [key, value] : assignments) set_key(j, key, value);
  *this = from_json(json(j));
  return *this;
}

std::string serialize(const RunConfig& config) { return config.to_json().dump(2) + "\n"; }

std::optional<std::string> lambda_b_warning(const RunConfig& config) {
  const double formula = lambda_b_from_cell(config.cell);
  const double configured = config.battery.lambda_b_usd_per_mwh;
  const double gap = formula == 0.0 ? (configured == 0.0 ? 0.0 : 1.0) : std::abs(configured - formula) / formula;
  if (gap <= 0.01) return std::nullopt;
  std::ostringstream msg;
  msg << "warning: battery.lambda_b_usd_per_mwh = " << configured
      << " differs from the cell-price formula value " << formula << " $/MWh by "
      << gap * 100.0 << "%";
  return msg.str();
}

}  // namespace peakreg::cli
