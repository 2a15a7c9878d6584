#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "peakreg/analysis.hpp"
#include "peakreg/errors.hpp"

namespace py = pybind11;
using namespace peakreg;

namespace {

template <class T>
void error_type(py::module_& m, const char* name, py::handle base) {
  py::register_exception<T>(m, name, base);
}

}  // namespace

PYBIND11_MODULE(_peakreg, m) {
  m.doc() = "Battery dispatch for joint peak shaving and frequency regulation";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  error_type<AlignmentError>(m, "AlignmentError", base);
  error_type<DomainError>(m, "DomainError", base);
  error_type<LimitError>(m, "LimitError", base);
  error_type<SocViolation>(m, "SocViolation", base);
  error_type<SolverError>(m, "SolverError", base);
  error_type<ValidationError>(m, "ValidationError", base);
  error_type<StateError>(m, "StateError", base);

  py::class_<TimeSeries>(m, "TimeSeries")
      .def(py::init<double, std::vector<double>>(), py::arg("step_seconds"), py::arg("values"))
      .def_static("constant", &TimeSeries::constant, py::arg("step_seconds"), py::arg("length"), py::arg("value"))
      .def_property_readonly("step_seconds", &TimeSeries::step_seconds)
      .def_property_readonly("values", [](const TimeSeries& s) { return s.vector(); })
      .def("integral_hours", &TimeSeries::integral_hours)
      .def("__len__", &TimeSeries::size)
      .def("__getitem__",
           [](const TimeSeries& s, std::size_t i) {
             if (i >= s.size()) throw py::index_error();
             return s[i];
           })
      .def(py::self == py::self)
      .def("__repr__", [](const TimeSeries& s) {
        return "TimeSeries(step_seconds=" + std::to_string(s.step_seconds()) + ", len=" + std::to_string(s.size()) + ")";
      });

  py::class_<Tariff>(m, "Tariff")
      .def(py::init<>())
      .def_readwrite("lambda_elec_usd_per_mwh", &Tariff::lambda_elec_usd_per_mwh)
      .def_readwrite("lambda_peak_usd_per_kw_month", &Tariff::lambda_peak_usd_per_kw_month)
      .def_readwrite("lambda_c_usd_per_mw_h", &Tariff::lambda_c_usd_per_mw_h)
      .def_readwrite("lambda_mis_usd_per_mwh", &Tariff::lambda_mis_usd_per_mwh)
      .def_readwrite("peak_window_seconds", &Tariff::peak_window_seconds)
      .def_readwrite("days_per_month", &Tariff::days_per_month)
      .def_readwrite("billing_days", &Tariff::billing_days)
      .def("validate", &Tariff::validate)
      .def("window_steps", &Tariff::window_steps, py::arg("step_seconds"));

  py::class_<BatterySpec>(m, "BatterySpec")
      .def(py::init<>())
      .def_readwrite("p_max_mw", &BatterySpec::p_max_mw)
      .def_readwrite("energy_mwh", &BatterySpec::energy_mwh)
      .def_readwrite("soc_min", &BatterySpec::soc_min)
      .def_readwrite("soc_max", &BatterySpec::soc_max)
      .def_readwrite("eta_c", &BatterySpec::eta_c)
      .def_readwrite("eta_d", &BatterySpec::eta_d)
      .def_readwrite("lambda_b_usd_per_mwh", &BatterySpec::lambda_b_usd_per_mwh)
      .def("validate", &BatterySpec::validate);

  py::class_<BatteryState>(m, "BatteryState")
      .def(py::init([](double soc) { return BatteryState{soc}; }), py::arg("soc") = 0.5)
      .def_readwrite("soc", &BatteryState::soc);

  py::class_<CellParams>(m, "CellParams")
      .def(py::init<>())
      .def_readwrite("lambda_cell_usd_per_wh", &CellParams::lambda_cell_usd_per_wh)
      .def_readwrite("cycles", &CellParams::cycles)
      .def_readwrite("dod_window", &CellParams::dod_window);

  py::class_<BillBreakdown>(m, "BillBreakdown")
      .def_static("assemble", &BillBreakdown::assemble, py::arg("energy"), py::arg("peak"), py::arg("battery"),
                  py::arg("revenue"))
      .def_readonly("energy_charge", &BillBreakdown::energy_charge)
      .def_readonly("peak_charge", &BillBreakdown::peak_charge)
      .def_readonly("battery_cost", &BillBreakdown::battery_cost)
      .def_readonly("regulation_revenue", &BillBreakdown::regulation_revenue)
      .def_readonly("total", &BillBreakdown::total);

  py::class_<RectPeak>(m, "RectPeak")
      .def(py::init<>())
      .def_readwrite("base_mw", &RectPeak::base_mw)
      .def_readwrite("peak_mw", &RectPeak::peak_mw)
      .def_readwrite("peak_minutes", &RectPeak::peak_minutes)
      .def_readwrite("length", &RectPeak::length)
      .def_readwrite("step_seconds", &RectPeak::step_seconds)
      .def_readwrite("peak_start", &RectPeak::peak_start);

  py::class_<ScenarioSet>(m, "ScenarioSet")
      .def(py::init([](std::vector<TimeSeries> s, std::optional<std::vector<double>> w) {
             if (!w) return ScenarioSet::uniform(std::move(s));
             ScenarioSet set{std::move(s), std::move(*w)};
             set.validate();
             return set;
           }),
           py::arg("scenarios"), py::arg("weights") = py::none())
      .def_readonly("scenarios", &ScenarioSet::scenarios)
      .def_readonly("weights", &ScenarioSet::weights)
      .def("__len__", &ScenarioSet::size);

  py::class_<PeakShaveResult>(m, "PeakShaveResult")
      .def_readonly("dispatch", &PeakShaveResult::dispatch)
      .def_readonly("bill", &PeakShaveResult::bill)
      .def_readonly("lp_objective", &PeakShaveResult::lp_objective)
      .def_readonly("iterations", &PeakShaveResult::iterations);

  py::class_<RegulationResult>(m, "RegulationResult")
      .def_readonly("capacity_mw", &RegulationResult::capacity_mw)
      .def_readonly("dispatch", &RegulationResult::dispatch)
      .def_readonly("revenue", &RegulationResult::revenue)
      .def_readonly("iterations", &RegulationResult::iterations);

  py::class_<DayAheadPlan>(m, "DayAheadPlan")
      .def(py::init<>())
      .def_readwrite("capacity_mw", &DayAheadPlan::capacity_mw)
      .def_readwrite("threshold_mw", &DayAheadPlan::threshold_mw)
      .def_readonly("scenario_dispatch", &DayAheadPlan::scenario_dispatch)
      .def_readonly("planned_objective", &DayAheadPlan::planned_objective)
      .def_readonly("downsample", &DayAheadPlan::downsample);

  py::class_<SimulationTrace>(m, "SimulationTrace")
      .def_readonly("dispatch", &SimulationTrace::dispatch)
      .def_readonly("soc_path", &SimulationTrace::soc_path)
      .def_readonly("realized_bill", &SimulationTrace::realized_bill)
      .def_readonly("mismatch_energy_mwh", &SimulationTrace::mismatch_energy_mwh);

  py::class_<DailyComparison>(m, "DailyComparison")
      .def_readonly("j_original", &DailyComparison::j_original)
      .def_readonly("j_peak_only", &DailyComparison::j_peak_only)
      .def_readonly("j_reg_only", &DailyComparison::j_reg_only)
      .def_readonly("j_joint", &DailyComparison::j_joint)
      .def_readonly("superlinear", &DailyComparison::superlinear)
      .def_readonly("q", &DailyComparison::q);

  m.def("smooth", &smooth, py::arg("series"), py::arg("window_steps"));
  m.def("energy_charge", &energy_charge, py::arg("load"), py::arg("tariff"));
  m.def("peak_charge", &peak_charge, py::arg("load"), py::arg("tariff"), py::arg("horizon_days"));
  m.def("smoothed_peak", &smoothed_peak, py::arg("load"), py::arg("tariff"));
  m.def(
      "total_bill",
      [](const TimeSeries& load, const TimeSeries& b, const Tariff& t, double lambda_b,
         std::optional<double> capacity_mw, std::optional<TimeSeries> signal, std::optional<TimeSeries> baseline) {
        std::optional<RegulationOutcome> reg;
        if (capacity_mw || signal) {
          if (!capacity_mw || !signal) throw ValidationError("capacity_mw and signal must be given together");
          reg = RegulationOutcome{*capacity_mw, *signal, baseline};
        }
        return total_bill(load, b, reg, t, lambda_b);
      },
      py::arg("load"), py::arg("battery_power"), py::arg("tariff"), py::arg("lambda_b_usd_per_mwh"),
      py::arg("capacity_mw") = py::none(), py::arg("signal") = py::none(), py::arg("baseline") = py::none());

  m.def("lambda_b_from_cell", &lambda_b_from_cell, py::arg("cell"));
  m.def("feasible_power", &feasible_power, py::arg("state"), py::arg("requested_mw"), py::arg("step_seconds"),
        py::arg("spec"));

  m.def("gen_rect_peak", &gen_rect_peak, py::arg("shape"));
  m.def("gen_trunc_gauss", &gen_trunc_gauss, py::arg("length"), py::arg("step_seconds"), py::arg("sigma2"),
        py::arg("lo"), py::arg("hi"), py::arg("seed"));
  m.def(
      "forward_reduce",
      [](const ScenarioSet& set, std::size_t k) { return forward_reduce(set, k).apply(set); }, py::arg("scenarios"),
      py::arg("k"), "Reduced scenario set with redistributed weights.");

  m.def("solve_peak_shaving", &solve_peak_shaving, py::arg("load"), py::arg("tariff"), py::arg("spec"),
        py::arg("soc_ini"));
  m.def(
      "solve_regulation",
      [](const TimeSeries& r, const Tariff& t, const BatterySpec& spec, double soc_ini,
         std::optional<double> fixed_capacity_mw) {
        RegulationOptions options;
        options.fixed_capacity_mw = fixed_capacity_mw;
        return solve_regulation(r, t, spec, soc_ini, options);
      },
      py::arg("signal"), py::arg("tariff"), py::arg("spec"), py::arg("soc_ini"),
      py::arg("fixed_capacity_mw") = py::none());
  m.def("regulation_policy", &regulation_policy, py::arg("r"), py::arg("capacity_mw"), py::arg("state"),
        py::arg("spec"), py::arg("step_seconds"), py::arg("tariff"));

  m.def(
      "solve_day_ahead",
      [](const TimeSeries& forecast, const ScenarioSet& scenarios, const Tariff& t, const BatterySpec& spec,
         double soc_ini, std::size_t downsample) {
        return solve_day_ahead(forecast, scenarios, t, spec, soc_ini, downsample);
      },
      py::arg("forecast"), py::arg("scenarios"), py::arg("tariff"), py::arg("spec"), py::arg("soc_ini"),
      py::arg("downsample") = 1);
  m.def("simulate_day", &simulate_day, py::arg("load"), py::arg("signal"), py::arg("plan"), py::arg("spec"),
        py::arg("tariff"), py::arg("soc_ini"), py::arg("forecast") = py::none());

  m.def("superlinear_ratio", &superlinear_ratio, py::arg("j"), py::arg("j_peak_only"), py::arg("j_reg_only"),
        py::arg("j_joint"));
  m.def(
      "peak_duration_cdf",
      [](const TimeSeries& load, double fraction) { return peak_duration_cdf(load, fraction).cdf; },
      py::arg("load"), py::arg("threshold_fraction") = 0.95);
  m.def(
      "life_expectancy",
      [](double throughput, const CellParams& cell, double energy) {
        return life_expectancy(throughput, cell, energy).years;
      },
      py::arg("annual_throughput_mwh"), py::arg("cell"), py::arg("energy_capacity_mwh"));
}
