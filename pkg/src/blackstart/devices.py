"""Closed-form lifecycle trajectories for each device given its start decision.

These are the semantic ground truth: the optimizer encoding and the
validator must both agree with the values produced here. Injections are
net MW at each step; cranking shows up as a negative draw.

Lifecycle of a generator or fuel cell started at step s:

    t <  s                         off, 0 MW
    s <= t < s+crank               cranking, -p_crank MW
    s+crank <= t < s+crank+ramp    ramping, p_max * k / ramp_steps at the
                                   k-th ramp step
    afterwards                     p_max MW

A black-start generator cranks on its own station supply, so its cranking
draw on the grid is zero. A battery injects a chosen dispatch level within
[p_min, p_max] while its discharge window is open and nothing otherwise.
"""

from __future__ import annotations

from .grid import Battery, FuelCell, Generator, GridCase, TimeGrid
from .schedule import Schedule


def phase_output(p_max: float, crank_draw: float, crank_steps: int, ramp_steps: int,
                 since_start: int) -> float:
    """Net MW a unit injects `since_start` steps after it began startup.

    since_start 0 is the first cranking step; negative means not yet started.
    """
    if since_start < 0:
        return 0.0
    if since_start < crank_steps:
        return -crank_draw
    k = since_start - crank_steps + 1
    if k < ramp_steps:
        return p_max * k / ramp_steps
    return p_max


def _phase_power(p_max: float, crank_draw: float, crank_steps: int, ramp_steps: int,
                 start_step: int | None, t: int) -> float:
    if start_step is None:
        return 0.0
    return phase_output(p_max, crank_draw, crank_steps, ramp_steps, t - start_step)


def fuel_cell_power(fc: FuelCell, start_step: int | None, t: int) -> float:
    """Net MW injected by a fuel cell at step t when started at start_step."""
    return _phase_power(fc.p_max, fc.p_crank, fc.crank_steps, fc.ramp_steps, start_step, t)


def generator_power(g: Generator, start_step: int | None, t: int) -> float:
    """Net MW injected by a generator at step t when started at start_step."""
    crank_draw = 0.0 if g.is_black_start else g.p_crank
    return _phase_power(g.p_max, crank_draw, g.crank_steps, g.ramp_steps, start_step, t)


def battery_power(b: Battery, start_step: int | None, end_step: int | None,
                  t: int, dispatch: float) -> float:
    """Net MW injected by a battery at step t.

    dispatch is the chosen level for step t; it must lie in [p_min, p_max]
    while the window [start_step, end_step) is open and is ignored outside.
    """
    if start_step is None or not start_step <= t < (end_step if end_step is not None else 0):
        return 0.0
    if not b.p_min - 1e-9 <= dispatch <= b.p_max + 1e-9:
        raise ValueError(
            f"battery {b.id}: dispatch {dispatch} MW outside [{b.p_min}, {b.p_max}] at step {t}"
        )
    return dispatch


def fuel_cell_trajectory(fc: FuelCell, start_step: int | None, grid: TimeGrid) -> list[float]:
    return [fuel_cell_power(fc, start_step, t) for t in grid.steps]


def generator_trajectory(g: Generator, start_step: int | None, grid: TimeGrid) -> list[float]:
    return [generator_power(g, start_step, t) for t in grid.steps]


def battery_trajectory(b: Battery, start_step: int | None, end_step: int | None,
                       dispatch: list[float], grid: TimeGrid) -> list[float]:
    return [
        battery_power(b, start_step, end_step, t, dispatch[t - 1]) for t in grid.steps
    ]


def soc_trajectory(b: Battery, trajectory: list[float], step_minutes: float
                   ) -> tuple[list[float], list[int]]:
    """Per-step state of charge in MWh and the steps where it dips below soc_min.

    SOC after step t is soc_init minus the energy discharged through t.
    Infeasibility is reported, not raised.
    """
    hours = step_minutes / 60.0
    soc = []
    low: list[int] = []
    level = b.soc_init
    for i, p in enumerate(trajectory):
        level -= p * hours
        soc.append(level)
        if level < b.soc_min - 1e-9:
            low.append(i + 1)
    return soc, low


def device_trajectories(case: GridCase, schedule: Schedule) -> dict[str, list[float]]:
    """Per-device semantic injection series for a complete schedule."""
    grid = case.time_grid
    out: dict[str, list[float]] = {}
    for g in case.generators:
        out[g.id] = generator_trajectory(g, schedule.gen_start[g.id], grid)
    for f in case.fuel_cells:
        out[f.id] = fuel_cell_trajectory(f, schedule.fc_start[f.id], grid)
    for b in case.batteries:
        window = schedule.bat_window[b.id]
        start, end = window if window is not None else (None, None)
        out[b.id] = battery_trajectory(b, start, end, schedule.bat_dispatch[b.id], grid)
    return out


def system_power(case: GridCase, schedule: Schedule) -> list[float]:
    """Pointwise sum of all device injections over the horizon."""
    total = [0.0] * case.time_grid.n_steps
    for series in device_trajectories(case, schedule).values():
        for i, p in enumerate(series):
            total[i] += p
    return total
