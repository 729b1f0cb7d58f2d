"""Exhaustive-search backend: the independent oracle for small cases.

Decisions enumerated: each non-black-start generator's start step within
its window (or never), and each battery's discharge window (or never).
Black-start generators and fuel cells are pinned to step 2. For every
combination a forward simulation runs the earliest-energization closure,
checks that each decided start lands on an energized bus, and dispatches
batteries greedily at the minimum level that keeps the power balance
nonnegative. Infeasible combinations are discarded; the best survivor by
objective wins, ties broken by the lexicographic start vector over device
ids (earlier starts preferred, then later discharge ends).

Everything here is straight simulation on the device semantics; none of
the MILP machinery is consulted, which is what makes agreement between the
two paths meaningful.
"""

from __future__ import annotations

import itertools
import math
import time

from ..devices import fuel_cell_trajectory, generator_trajectory
from ..grid import Battery, Generator, GridCase
from ..milp import assignment_from_schedule, encode, objective_value
from ..schedule import Schedule, empty_schedule
from ..validate import validate
from .result import ERROR, INFEASIBLE, OPTIMAL, SolveResult

DEFAULT_COMBINATION_CAP = 500_000


class EnumerationCapError(RuntimeError):
    """The decision space exceeds the configured cap."""


def _gen_options(g: Generator, T: int) -> list[int | None]:
    if g.is_black_start:
        return [2]
    return [None, *range(g.start_min, g.start_max + 1)]


def _battery_options(b: Battery, T: int) -> list[tuple[int, int] | None]:
    options: list[tuple[int, int] | None] = [None]
    for s in range(b.start_min, T + 1):
        for e in range(s + 1, T + 2):
            options.append((s, e))
    return options


def energization_closure(case: GridCase, sources: dict[str, int]
                         ) -> tuple[dict[str, int | None], dict[str, int | None]]:
    """Earliest energization step of every bus and branch.

    sources maps bus id -> step at which a self-start device lights it.
    A branch lights one step after either endpoint; it lights its far
    endpoint in the same step it comes up.
    """
    T = case.time_grid.n_steps
    bus_step: dict[str, int | None] = {b.id: None for b in case.buses}
    branch_step: dict[str, int | None] = {k.id: None for k in case.branches}
    frontier: list[str] = []
    for b_id, s in sources.items():
        if s <= T and (bus_step[b_id] is None or s < bus_step[b_id]):
            bus_step[b_id] = s
    # Dijkstra with unit hop costs and per-source offsets; grids are small,
    # so a simple repeated relaxation over steps is clear and fast enough.
    changed = True
    while changed:
        changed = False
        for k in case.branches:
            ends = (bus_step[k.from_bus], bus_step[k.to_bus])
            reach = min((s for s in ends if s is not None), default=None)
            if reach is None or reach + 1 > T:
                continue
            step = reach + 1
            if branch_step[k.id] is None or step < branch_step[k.id]:
                branch_step[k.id] = step
                changed = True
            for end in (k.from_bus, k.to_bus):
                if bus_step[end] is None or branch_step[k.id] < bus_step[end]:
                    bus_step[end] = branch_step[k.id]
                    changed = True
    return bus_step, branch_step


def _simulate(case: GridCase,
              gen_starts: dict[str, int | None],
              bat_windows: dict[str, tuple[int, int] | None]) -> Schedule | None:
    """Forward-simulate one decision combination; None if infeasible."""
    T = case.time_grid.n_steps
    hours = case.time_grid.step_minutes / 60.0

    sources: dict[str, int] = {}
    for g in case.generators:
        if g.is_black_start:
            sources[g.bus] = min(sources.get(g.bus, T + 1), 2)
    for f in case.fuel_cells:
        sources[f.bus] = min(sources.get(f.bus, T + 1), 2)
    for b in case.batteries:
        window = bat_windows[b.id]
        if window is not None:
            sources[b.bus] = min(sources.get(b.bus, T + 1), window[0])
    bus_step, branch_step = energization_closure(case, sources)

    # every decided start must land on a bus energized by that step
    for g in case.generators:
        s = gen_starts[g.id]
        if s is None:
            continue
        lit = bus_step[g.bus]
        if lit is None or lit > s:
            return None

    # a bus lit only by a battery must stay justified once the discharge
    # window closes (energization is monotone)
    adj = case.adjacency
    by_gen = {g.id: g for g in case.generators}
    for b in case.batteries:
        window = bat_windows[b.id]
        if window is None or window[1] > T:
            continue
        for t in range(window[1], T + 1):
            justified = any(
                branch_step[k_id] is not None and branch_step[k_id] <= t
                for k_id in adj.branches[b.bus]
            )
            justified = justified or bool(adj.fuel_cells[b.bus])
            for g_id in adj.generators[b.bus]:
                g = by_gen[g_id]
                s = gen_starts[g_id]
                if g.is_black_start or (s is not None and s + g.crank_steps <= t):
                    justified = True
            for other_id in adj.batteries[b.bus]:
                w2 = bat_windows[other_id]
                if w2 is not None and w2[0] <= t < w2[1]:
                    justified = True
            if not justified:
                return None

    base = [0.0] * T
    for g in case.generators:
        for i, p in enumerate(generator_trajectory(g, gen_starts[g.id], case.time_grid)):
            base[i] += p
    for f in case.fuel_cells:
        for i, p in enumerate(fuel_cell_trajectory(f, 2, case.time_grid)):
            base[i] += p

    dispatch: dict[str, list[float]] = {b.id: [0.0] * T for b in case.batteries}
    soc_left = {b.id: b.soc_init - b.soc_min for b in case.batteries}
    for t in range(1, T + 1):
        open_now = [
            b for b in case.batteries
            if bat_windows[b.id] is not None
            and bat_windows[b.id][0] <= t < bat_windows[b.id][1]
        ]
        level = base[t - 1]
        for b in open_now:
            if b.p_min * hours > soc_left[b.id] + 1e-9:
                return None  # window open but the floor output would sink SOC
            dispatch[b.id][t - 1] = b.p_min
            level += b.p_min
        if level < -1e-9:
            need = -level
            for b in open_now:
                headroom = min(b.p_max - b.p_min, soc_left[b.id] / hours - b.p_min)
                extra = min(need, max(headroom, 0.0))
                dispatch[b.id][t - 1] += extra
                need -= extra
                if need <= 1e-9:
                    break
            if need > 1e-9:
                return None
        for b in open_now:
            soc_left[b.id] -= dispatch[b.id][t - 1] * hours

    sched = empty_schedule(case)
    sched.gen_start = dict(gen_starts)
    sched.fc_start = {f.id: 2 for f in case.fuel_cells}
    sched.bat_window = dict(bat_windows)
    sched.bat_dispatch = dispatch
    for b in case.buses:
        s = bus_step[b.id]
        sched.bus_on[b.id] = [s is not None and t >= s for t in range(1, T + 1)]
    for k in case.branches:
        s = branch_step[k.id]
        sched.branch_on[k.id] = [s is not None and t >= s for t in range(1, T + 1)]
    return sched


def _tiebreak_key(case: GridCase, gen_starts: dict[str, int | None],
                  bat_windows: dict[str, tuple[int, int] | None]) -> tuple:
    """Lexicographic start vector by device id; earlier starts win, then
    later discharge ends (a window held open mirrors a fuel cell)."""
    never = math.inf
    key: list[float] = []
    for g in sorted(gen_starts):
        s = gen_starts[g]
        key.append(never if s is None else s)
    for b in sorted(bat_windows):
        w = bat_windows[b]
        key.append(never if w is None else w[0])
        key.append(0 if w is None else -w[1])
    return tuple(key)


def solve_enumeration(case: GridCase, cap: int = DEFAULT_COMBINATION_CAP) -> SolveResult:
    """Optimal schedule by exhaustive enumeration of decision combinations."""
    t0 = time.monotonic()
    T = case.time_grid.n_steps
    gens = [g for g in case.generators]
    gen_opts = [_gen_options(g, T) for g in gens]
    bat_opts = [_battery_options(b, T) for b in case.batteries]
    n_combos = math.prod([len(o) for o in gen_opts] + [len(o) for o in bat_opts])
    if n_combos > cap:
        raise EnumerationCapError(
            f"{n_combos} decision combinations exceed the cap of {cap}"
        )

    best: tuple[float, tuple, Schedule] | None = None
    explored = 0
    for combo in itertools.product(*gen_opts, *bat_opts):
        explored += 1
        gen_starts = {g.id: combo[i] for i, g in enumerate(gens)}
        bat_windows = {
            b.id: combo[len(gens) + j] for j, b in enumerate(case.batteries)
        }
        sched = _simulate(case, gen_starts, bat_windows)
        if sched is None:
            continue
        obj = objective_value(case, sched)
        key = _tiebreak_key(case, gen_starts, bat_windows)
        if best is None or (obj, key) < (best[0], best[1]):
            best = (obj, key, sched)

    stats = {
        "combinations": n_combos,
        "explored": explored,
        "wall_time_s": time.monotonic() - t0,
    }
    if best is None:
        return SolveResult(status=INFEASIBLE, stats=stats,
                           message="no feasible decision combination")
    obj, _, sched = best
    report = validate(case, sched)
    if not report.passed:
        return SolveResult(
            status=ERROR, stats=stats, schedule=sched, validation=report,
            message="enumeration winner failed validation (internal inconsistency)",
        )
    model = encode(case)
    assignment = assignment_from_schedule(model, case, sched)
    stats["wall_time_s"] = time.monotonic() - t0
    return SolveResult(
        status=OPTIMAL,
        assignment=assignment,
        objective=obj,
        stats=stats,
        schedule=sched,
        validation=report,
    )
