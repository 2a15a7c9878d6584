#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "io.hpp"
#include "json.hpp"
#include "peakreg/analysis.hpp"
#include "peakreg/benchmarks.hpp"
#include "peakreg/controller.hpp"
#include "peakreg/errors.hpp"
#include "peakreg/forecast.hpp"
#include "peakreg/planner.hpp"
#include "peakreg/scenarios.hpp"

namespace peakreg::cli {

namespace {

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::vector<std::string>& tokens, const std::string& flag,
                           const std::vector<std::string>& allowed) {
  KeyValues out;
  for (const auto& token : tokens) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ValidationError(flag + ": expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError(flag + ": unknown key '" + key + "'");
    }
    out[key] = token.substr(eq + 1);
  }
  return out;
}

double number_or(const KeyValues& kv, const std::string& key, double fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("'" + key + "=" + it->second + "' is not a number");
  }
}

std::string bill_header() { return "mode,energy_charge,peak_charge,battery_cost,regulation_revenue,total\n"; }

std::string bill_row(const std::string& mode, const BillBreakdown& b) {
  return mode + "," + format_number(b.energy_charge) + "," + format_number(b.peak_charge) + "," +
         format_number(b.battery_cost) + "," + format_number(b.regulation_revenue) + "," +
         format_number(b.total) + "\n";
}

// Shared state of one invocation.
struct Session {
  RunConfig config;
  fs::path out_dir;
  std::ostream& out;
  std::ostream& err;
  std::optional<Manifest> manifest;

  Manifest& record() {
    if (!manifest) {
      manifest.emplace(out_dir);
      manifest->set_config(serialize(config));
      manifest->set_seeds(config.experiment.seeds);
    }
    return *manifest;
  }

  void write(const std::string& name, const std::string& content) {
    write_atomic(out_dir / name, content);
    record().add_artifact(name);
  }

  // An explicit binding must exist; an empty one falls back to the artifact
  // of the same role in the output directory.
  fs::path input(const std::string& binding, const std::string& key, const std::string& fallback) const {
    const fs::path path = binding.empty() ? out_dir / fallback : fs::path(binding);
    if (!fs::exists(path)) {
      throw ValidationError("config key paths." + key + ": " + path.string() + " does not exist");
    }
    return path;
  }

  Tariff tariff() const { return config.effective_tariff(); }

  SweepSetup sweep_setup() const {
    const auto& e = config.experiment;
    SweepSetup s;
    s.load_shape = RectPeak{e.base_mw, e.peak_mw, e.peak_minutes, config.horizon.steps,
                            config.horizon.step_seconds, e.peak_start_step};
    s.sigma2 = e.sigma2;
    s.scenario_pool = e.scenario_pool;
    s.scenarios_kept = e.scenarios_kept;
    s.tariff = tariff();
    s.battery = config.battery;
    s.cell = config.cell;
    s.soc_ini = config.soc_ini;
    s.downsample = config.horizon.downsample;
    s.mis_to_degradation = e.mis_to_degradation;
    return s;
  }
};

struct GenArgs {
  std::vector<std::string> rect, gauss, scenarios;
  std::int64_t start = 0;
};

void cmd_gen(Session& s, const GenArgs& a) {
  const bool all = a.rect.empty() && a.gauss.empty() && a.scenarios.empty();
  const auto& e = s.config.experiment;
  const auto& h = s.config.horizon;
  if (all || !a.rect.empty()) {
    const auto kv = parse_key_values(a.rect, "--rect", {"base", "peak", "minutes", "start"});
    RectPeak shape{number_or(kv, "base", e.base_mw), number_or(kv, "peak", e.peak_mw),
                   number_or(kv, "minutes", e.peak_minutes), h.steps, h.step_seconds, e.peak_start_step};
    if (kv.count("start")) shape.peak_start = static_cast<std::size_t>(number_or(kv, "start", 0.0));
    s.write("load.csv", series_csv(gen_rect_peak(shape), a.start, "mw"));
  }
  if (all || !a.gauss.empty()) {
    const auto kv = parse_key_values(a.gauss, "--gauss", {"seed", "sigma2", "lo", "hi"});
    const auto seed = static_cast<std::uint64_t>(number_or(kv, "seed", static_cast<double>(e.seeds.front())));
    const auto signal = gen_trunc_gauss(h.steps, h.step_seconds, number_or(kv, "sigma2", e.sigma2),
                                        number_or(kv, "lo", -1.0), number_or(kv, "hi", 1.0), seed);
    s.write("signal.csv", series_csv(signal, a.start, "r"));
  }
  if (all || !a.scenarios.empty()) {
    const auto kv = parse_key_values(a.scenarios, "--scenarios", {"count", "seed", "sigma2"});
    const auto count = static_cast<std::size_t>(number_or(kv, "count", static_cast<double>(e.scenario_pool)));
    const auto seed = static_cast<std::uint64_t>(number_or(kv, "seed", static_cast<double>(e.seeds.front())));
    if (count == 0) throw ValidationError("--scenarios: count must be positive");
    std::vector<TimeSeries> pool;
    for (std::size_t k = 0; k < count; ++k) {
      pool.push_back(gen_trunc_gauss(h.steps, h.step_seconds, number_or(kv, "sigma2", e.sigma2), -1.0, 1.0,
                                     seed * 1000003ULL + k + 1));
    }
    for (const auto& name : write_scenario_dir(s.out_dir / "scenarios", ScenarioSet::uniform(std::move(pool)), a.start)) {
      s.record().add_artifact("scenarios/" + name);
    }
  }
}

void cmd_forecast(Session& s) {
  const auto history = read_training_csv(s.input(s.config.paths.training_csv, "training_csv", "training.csv"));
  const auto next = read_training_csv(s.input(s.config.paths.next_day_csv, "next_day_csv", "next_day.csv"));
  const auto& e = s.config.experiment;
  const TrainingSet train = build_training_set(history, e.similar_days);
  const MlrModel model = fit(train.rows, train.targets);
  if (model.rank_deficient) {
    s.err << "warning: design matrix has rank " << model.rank << " of " << kDesignWidth
          << "; using the minimum-norm fit\n";
  }
  const auto cv = kfold_cv(train.rows, train.targets, std::min(e.forecast_folds, train.rows.size()));
  const auto prediction = predict(model, next_day_features(history, next, e.similar_days));

  std::string hourly = "timestamp,mw\n";
  for (std::size_t hr = 0; hr < prediction.size(); ++hr) {
    hourly += std::to_string(next[hr].timestamp) + "," + format_number(prediction[hr]) + "\n";
  }
  s.write("forecast_hourly.csv", hourly);
  // Piecewise-constant expansion onto the simulation step.
  const double per_hour = 3600.0 / s.config.horizon.step_seconds;
  const auto reps = static_cast<std::size_t>(std::llround(per_hour));
  if (std::abs(per_hour - static_cast<double>(reps)) > 1e-9) {
    throw ValidationError("config key horizon.step_seconds must divide one hour for forecasting");
  }
  std::vector<double> expanded;
  for (double v : prediction) expanded.insert(expanded.end(), reps, v);
  s.write("forecast.csv", series_csv(TimeSeries(s.config.horizon.step_seconds, expanded), next.front().timestamp, "mw"));

  std::string cv_csv = "fold,mape\n";
  for (std::size_t f = 0; f < cv.fold_mape.size(); ++f) cv_csv += std::to_string(f) + "," + format_number(cv.fold_mape[f]) + "\n";
  cv_csv += "mean," + format_number(cv.mean) + "\n";
  s.write("forecast_cv.csv", cv_csv);
  std::string coef = "column,coefficient\n";
  const auto names = design_columns();
  for (std::size_t c = 0; c < names.size(); ++c) coef += names[c] + "," + format_number(model.coefficients[static_cast<Eigen::Index>(c)]) + "\n";
  s.write("forecast_model.csv", coef);
  s.out << "forecast: cross-validated MAPE " << cv.mean * 100.0 << "%\n";
}

void cmd_reduce(Session& s, std::optional<std::size_t> k) {
  const auto set = read_scenario_dir(s.input(s.config.paths.scenario_dir, "scenario_dir", "scenarios"));
  const auto result = forward_reduce(set, k.value_or(s.config.experiment.scenarios_kept));
  const auto reduced = result.apply(set);
  SeriesFile first = read_series_csv(
      s.input(s.config.paths.scenario_dir, "scenario_dir", "scenarios") / "scenario_0.csv", "r");
  for (const auto& name : write_scenario_dir(s.out_dir / "reduced", reduced, first.start)) {
    s.record().add_artifact("reduced/" + name);
  }
  std::string table = "kept_index,weight\n";
  for (std::size_t i = 0; i < result.kept_indices.size(); ++i) {
    table += std::to_string(result.kept_indices[i]) + "," + format_number(result.new_weights[i]) + "\n";
  }
  table += "kantorovich_distance," + format_number(result.kantorovich_distance) + "\n";
  s.write("reduction.csv", table);
}

// Forecast for planning: explicit forecast, else the generated load.
SeriesFile planning_forecast(Session& s) {
  if (!s.config.paths.forecast_csv.empty()) {
    return read_series_csv(s.input(s.config.paths.forecast_csv, "forecast_csv", ""), "mw");
  }
  return read_series_csv(s.input(s.config.paths.load_csv, "load_csv", "load.csv"), "mw");
}

fs::path scenario_input(Session& s) {
  if (!s.config.paths.scenario_dir.empty()) return s.input(s.config.paths.scenario_dir, "scenario_dir", "");
  if (fs::exists(s.out_dir / "reduced")) return s.out_dir / "reduced";
  return s.input("", "scenario_dir", "scenarios");
}

void cmd_plan(Session& s) {
  const auto forecast = planning_forecast(s);
  const auto scenarios = read_scenario_dir(scenario_input(s));
  PlannerOptions options;
  options.downsample = s.config.horizon.downsample;
  DayAheadPlanner planner(forecast.series, scenarios, s.tariff(), s.config.battery, s.config.soc_ini, options);
  const auto& plan = planner.solve();
  nlohmann::ordered_json j;
  j["capacity_mw"] = plan.capacity_mw;
  j["threshold_mw"] = plan.threshold_mw;
  j["planned_objective_usd"] = plan.planned_objective;
  j["downsample"] = plan.downsample;
  j["scenarios"] = plan.scenario_dispatch.size();
  j["simplex_iterations"] = plan.iterations;
  s.write("plan.json", j.dump(2) + "\n");
  s.out << "plan: C* = " << plan.capacity_mw << " MW, U* = " << plan.threshold_mw << " MW, J = "
        << plan.planned_objective << " $\n";
}

DayAheadPlan read_plan(const fs::path& file) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(file.string() + " is not a valid plan file: " + e.what());
  }
  DayAheadPlan plan;
  for (const char* key : {"capacity_mw", "threshold_mw", "planned_objective_usd", "downsample"}) {
    if (!j.contains(key)) throw ValidationError(file.string() + ": missing plan key " + key);
  }
  plan.capacity_mw = j.at("capacity_mw").get<double>();
  plan.threshold_mw = j.at("threshold_mw").get<double>();
  plan.planned_objective = j.at("planned_objective_usd").get<double>();
  plan.downsample = j.at("downsample").get<std::size_t>();
  return plan;
}

void cmd_simulate(Session& s) {
  const auto plan = read_plan(s.input(s.config.paths.plan_file, "plan_file", "plan.json"));
  const auto load = read_series_csv(s.input(s.config.paths.load_csv, "load_csv", "load.csv"), "mw");
  const auto signal = read_series_csv(s.input(s.config.paths.signal_csv, "signal_csv", "signal.csv"), "r");
  std::optional<TimeSeries> forecast;
  if (!s.config.paths.forecast_csv.empty()) {
    forecast = read_series_csv(s.input(s.config.paths.forecast_csv, "forecast_csv", ""), "mw").series;
  }
  const auto trace = simulate_day(load.series, signal.series, plan, s.config.battery, s.tariff(),
                                  s.config.soc_ini, forecast);
  std::string csv = "t,s,r,b,soc\n";
  const auto step = static_cast<std::int64_t>(std::llround(load.series.step_seconds()));
  for (std::size_t t = 0; t < load.series.size(); ++t) {
    csv += std::to_string(load.start + static_cast<std::int64_t>(t) * step) + "," +
           format_number(load.series[t]) + "," + format_number(signal.series[t]) + "," +
           format_number(trace.dispatch[t]) + "," + format_number(trace.soc_path[t]) + "\n";
  }
  s.write("trace.csv", csv);
  s.write("bill.csv", bill_header() + bill_row("joint", trace.realized_bill));
  s.out << "simulate: realized bill " << trace.realized_bill.total << " $, mismatch "
        << trace.mismatch_energy_mwh << " MWh\n";
}

void cmd_benchmark(Session& s) {
  const auto load = read_series_csv(s.input(s.config.paths.load_csv, "load_csv", "load.csv"), "mw");
  const auto signal = read_series_csv(s.input(s.config.paths.signal_csv, "signal_csv", "signal.csv"), "r");
  const Tariff tariff = s.tariff();
  const auto& spec = s.config.battery;
  const auto idle = TimeSeries::constant(load.series.step_seconds(), load.series.size(), 0.0);
  const auto original = total_bill(load.series, idle, std::nullopt, tariff, spec.lambda_b_usd_per_mwh);
  const auto peak = solve_peak_shaving(load.series, tariff, spec, s.config.soc_ini);
  const auto reg = solve_regulation(signal.series, tariff, spec, s.config.soc_ini);
  const auto reg_bill = bill_with_regulation(load.series, reg, tariff, spec);
  s.write("benchmark_bills.csv", bill_header() + bill_row("original", original) +
                                     bill_row("peak_only", peak.bill) + bill_row("regulation_only", reg_bill));
  s.write("peak_dispatch.csv", series_csv(peak.dispatch, load.start, "b"));
  s.write("regulation_dispatch.csv", series_csv(reg.dispatch, load.start, "b"));
  s.write("regulation.csv", "capacity_mw,revenue_usd,performance_score\n" + format_number(reg.capacity_mw) +
                                "," + format_number(reg.revenue) + "," + format_number(performance_score(reg)) + "\n");
  s.out << "benchmark: J = " << original.total << ", J^p = " << peak.bill.total << ", J^r = " << reg_bill.total
        << " $\n";
}

std::string comparison_csv(const DailyComparison& c) {
  return "j_original,j_peak_only,j_reg_only,j_joint,superlinear,q\n" + format_number(c.j_original) + "," +
         format_number(c.j_peak_only) + "," + format_number(c.j_reg_only) + "," + format_number(c.j_joint) + "," +
         (c.superlinear ? "1" : "0") + "," + format_number(c.q) + "\n";
}

void cmd_analyze(Session& s, const std::vector<double>& bills) {
  if (!bills.empty()) {
    const auto c = superlinear_ratio(bills[0], bills[1], bills[2], bills[3]);
    s.write("comparison.csv", comparison_csv(c));
    s.out << "analyze: q = " << c.q * 100.0 << "%, superlinear = " << (c.superlinear ? "yes" : "no") << "\n";
    return;
  }
  const auto load = read_series_csv(s.input(s.config.paths.load_csv, "load_csv", "load.csv"), "mw");
  const auto signal = read_series_csv(s.input(s.config.paths.signal_csv, "signal_csv", "signal.csv"), "r");
  DayInputs day{load.series, signal.series, read_scenario_dir(scenario_input(s)), std::nullopt,
                s.tariff(), s.config.battery, s.config.soc_ini, s.config.horizon.downsample};
  if (!s.config.paths.forecast_csv.empty()) {
    day.forecast = read_series_csv(s.input(s.config.paths.forecast_csv, "forecast_csv", ""), "mw").series;
  }
  const auto outcome = compare_day(day);
  s.write("comparison.csv", comparison_csv(outcome.comparison));
  s.write("bills.csv", bill_header() + bill_row("original", outcome.original) +
                           bill_row("peak_only", outcome.peak_only.bill) +
                           bill_row("regulation_only", outcome.reg_bill) +
                           bill_row("joint", outcome.joint.realized_bill));

  const auto durations = peak_duration_cdf(load.series, s.config.experiment.peak_duration_fraction);
  std::string cdf = "duration_seconds,cdf\n";
  for (const auto& [d, p] : durations.cdf) cdf += format_number(d) + "," + format_number(p) + "\n";
  s.write("peak_durations.csv", cdf);

  // Throughput of the joint dispatch scaled from the horizon to a year.
  double throughput = 0.0;
  for (double b : outcome.joint.dispatch.values()) throughput += std::abs(b);
  throughput *= outcome.joint.dispatch.step_hours();
  const double annual = throughput * 365.0 * 86400.0 / load.series.duration_seconds();
  const auto life = life_expectancy(annual, s.config.cell, s.config.battery.energy_mwh);
  s.write("life.csv", "annual_throughput_mwh,life_years,infinite\n" + format_number(annual) + "," +
                          (life.infinite ? std::string("inf") : format_number(life.years)) + "," +
                          (life.infinite ? "1" : "0") + "\n");
  s.out << "analyze: q = " << outcome.comparison.q * 100.0
        << "%, superlinear = " << (outcome.comparison.superlinear ? "yes" : "no") << "\n";
}

void cmd_sweep(Session& s, const std::string& axis) {
  const auto setup = s.sweep_setup();
  const auto& e = s.config.experiment;
  auto emit = [&](SweepAxis which, const std::vector<double>& grid, const std::string& name,
                  const std::string& column) {
    const auto cells = sensitivity_sweep(setup, which, e.lambda_cell_grid_usd_per_wh, grid, e.seeds);
    std::string csv = "lambda_cell_usd_per_wh," + column + ",runs,superlinear,failures,probability,mean_q\n";
    for (const auto& c : cells) {
      csv += format_number(c.lambda_cell) + "," + format_number(c.second) + "," + std::to_string(c.runs) + "," +
             std::to_string(c.superlinear) + "," + std::to_string(c.failures) + "," +
             format_number(c.probability) + "," + format_number(c.mean_q) + "\n";
    }
    s.write(name, csv);
  };
  if (axis == "peak" || axis == "both") {
    emit(SweepAxis::kPeakCharge, e.lambda_peak_grid_usd_per_kw_month, "sweep_peak.csv",
         "lambda_peak_usd_per_kw_month");
  }
  if (axis == "capacity" || axis == "both") {
    emit(SweepAxis::kCapacityPayment, e.lambda_c_grid_usd_per_mw_h, "sweep_capacity.csv", "lambda_c_usd_per_mw_h");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Battery peak-shaving and frequency-regulation co-optimization"};
  app.name("peakreg");
  app.require_subcommand(0, 1);

  std::string config_file;
  std::string manifest_file;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool print_default = false;
  app.add_option("--config", config_file, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--from-manifest", manifest_file, "Reuse the configuration recorded in a manifest")
      ->check(CLI::ExistingFile)
      ->excludes("--config");
  app.add_option("--set", overrides, "Override a config key, e.g. --set tariff.lambda_c_usd_per_mw_h=40");
  app.add_option("--out", out_dir, "Output directory (overrides paths.output_dir)");
  app.add_flag("--print-default-config", print_default, "Print the default configuration and exit");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate synthetic load, signal and scenarios");
  gen->add_option("--rect", gen_args.rect, "Rectangle load: base=MW peak=MW minutes=M start=STEP")->expected(0, 4);
  gen->add_option("--gauss", gen_args.gauss, "Truncated Gaussian signal: seed=N sigma2=V lo=L hi=H")->expected(0, 4);
  gen->add_option("--scenarios", gen_args.scenarios, "Scenario pool: count=N seed=S sigma2=V")->expected(0, 3);
  gen->add_option("--start", gen_args.start, "Timestamp of the first sample (seconds)");

  std::string training, next_day;
  auto* forecast = app.add_subcommand("forecast", "Fit the load model and predict the next day");
  forecast->add_option("--training", training, "Hourly training CSV (timestamp,mw,tmp_c,is_holiday)");
  forecast->add_option("--next-day", next_day, "Next-day CSV with the same columns (mw ignored)");

  std::optional<std::size_t> keep;
  std::string scenario_dir;
  auto* reduce = app.add_subcommand("reduce", "Forward scenario reduction");
  reduce->add_option("--scenario-dir", scenario_dir, "Directory of scenario_<i>.csv and weights.csv");
  reduce->add_option("-k,--keep", keep, "Scenarios to keep");

  std::string load, signal, forecast_csv, plan_file;
  auto* plan = app.add_subcommand("plan", "Solve the day-ahead stochastic program");
  plan->add_option("--forecast", forecast_csv, "Load forecast CSV (defaults to the load)");
  plan->add_option("--load", load, "Load CSV used when no forecast is given");
  plan->add_option("--scenario-dir", scenario_dir, "Scenario directory");

  auto* simulate = app.add_subcommand("simulate", "Run the real-time controller over a day");
  simulate->add_option("--plan", plan_file, "Plan file written by `plan`");
  simulate->add_option("--load", load, "Load CSV (timestamp,mw)");
  simulate->add_option("--signal", signal, "Regulation signal CSV (timestamp,r)");
  simulate->add_option("--forecast", forecast_csv, "Reported baseline (defaults to the load)");

  auto* benchmark = app.add_subcommand("benchmark", "Offline peak-shaving and regulation optima");
  benchmark->add_option("--load", load, "Load CSV");
  benchmark->add_option("--signal", signal, "Regulation signal CSV");

  std::vector<double> bills;
  auto* analyze = app.add_subcommand("analyze", "Superlinear gain, peak durations and life expectancy");
  analyze->add_option("--load", load, "Load CSV");
  analyze->add_option("--signal", signal, "Regulation signal CSV");
  analyze->add_option("--scenario-dir", scenario_dir, "Scenario directory");
  analyze->add_option("--forecast", forecast_csv, "Load forecast CSV");
  analyze->add_option("--bills", bills, "Only compute q from J J^p J^r J^joint")->expected(4);

  std::string axis = "both";
  auto* sweep = app.add_subcommand("sweep", "Probability of superlinear gain over price grids");
  sweep->add_option("--axis", axis, "peak, capacity or both")->check(CLI::IsMember({"peak", "capacity", "both"}));

  std::vector<std::string> argv_storage{"peakreg"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    RunConfig config;
    if (!config_file.empty()) config = RunConfig::load(config_file);
    if (!manifest_file.empty()) {
      const auto j = nlohmann::json::parse(read_file(manifest_file));
      config = RunConfig::from_json(nlohmann::json::parse(j.at("config").get<std::string>()));
    }
    // Flags take precedence over the file.
    std::vector<std::pair<std::string, std::string>> assignments;
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + o + "'");
      assignments.emplace_back(o.substr(0, eq), o.substr(eq + 1));
    }
    auto bind = [&](const std::string& value, const char* key) {
      if (!value.empty()) assignments.emplace_back(std::string("paths.") + key, nlohmann::json(value).dump());
    };
    bind(out_dir, "output_dir");
    bind(training, "training_csv");
    bind(next_day, "next_day_csv");
    bind(scenario_dir, "scenario_dir");
    bind(load, "load_csv");
    bind(signal, "signal_csv");
    bind(forecast_csv, "forecast_csv");
    bind(plan_file, "plan_file");
    config.override_values(assignments);

    if (print_default) {
      out << serialize(config);
      return kOk;
    }
    if (app.get_subcommands().empty()) {
      out << app.help();
      return kOk;
    }
    if (auto warning = lambda_b_warning(config)) err << *warning << "\n";

    Session session{config, fs::path(config.paths.output_dir), out, err, std::nullopt};
    fs::create_directories(session.out_dir);
    if (gen->parsed()) cmd_gen(session, gen_args);
    if (forecast->parsed()) cmd_forecast(session);
    if (reduce->parsed()) cmd_reduce(session, keep);
    if (plan->parsed()) cmd_plan(session);
    if (simulate->parsed()) cmd_simulate(session);
    if (benchmark->parsed()) cmd_benchmark(session);
    if (analyze->parsed()) cmd_analyze(session, bills);
    if (sweep->parsed()) cmd_sweep(session, axis);
    session.record().save();
    return kOk;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const AlignmentError& e) {
    err << "alignment error: " << e.what() << "\n";
    return kAlignment;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kSolver;
  } catch (const LimitError& e) {
    err << "battery limit error: " << e.what() << "\n";
    return kBatteryLimit;
  } catch (const SocViolation& e) {
    err << "battery limit error: " << e.what() << "\n";
    return kBatteryLimit;
  } catch (const StateError& e) {
    err << "state error: " << e.what() << "\n";
    return kState;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace peakreg::cli
