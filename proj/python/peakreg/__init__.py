"""Battery dispatch for joint peak shaving and frequency regulation."""

from ._peakreg import (
    AlignmentError,
    BatterySpec,
    BatteryState,
    BillBreakdown,
    CellParams,
    DailyComparison,
    DayAheadPlan,
    DomainError,
    Error,
    LimitError,
    PeakShaveResult,
    RectPeak,
    RegulationResult,
    ScenarioSet,
    SimulationTrace,
    SocViolation,
    SolverError,
    StateError,
    Tariff,
    TimeSeries,
    ValidationError,
    energy_charge,
    feasible_power,
    forward_reduce,
    gen_rect_peak,
    gen_trunc_gauss,
    lambda_b_from_cell,
    life_expectancy,
    peak_charge,
    peak_duration_cdf,
    regulation_policy,
    simulate_day,
    smooth,
    smoothed_peak,
    solve_day_ahead,
    solve_peak_shaving,
    solve_regulation,
    superlinear_ratio,
    total_bill,
)

__all__ = [name for name in dir() if not name.startswith("_")]
