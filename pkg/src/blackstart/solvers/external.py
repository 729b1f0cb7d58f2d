"""Solve a model through an external MILP solver exchanged via files.

The solver is a command template containing ``{mps}`` and ``{sol}``
placeholders, configured explicitly, via the BLACKSTART_SOLVER_CMD
environment variable, or defaulting to the bundled HiGHS front end run as
a child process. The solution document is whitespace-separated
``name value`` lines; ``#`` starts a comment, unknown names are an error,
missing variables default to 0, and a single ``=infeasible=`` line marks
a proven-infeasible model.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import sys
import tempfile
import time
from pathlib import Path

from ..grid import GridCase
from ..milp import DecodeError, MilpModel, decode, encode
from ..mps import write_mps
from ..schedule import Schedule
from ..validate import validate
from .result import ERROR, INFEASIBLE, OPTIMAL, SolveResult

ENV_SOLVER_CMD = "BLACKSTART_SOLVER_CMD"
INFEASIBLE_SENTINEL = "=infeasible="


def default_solver_command() -> str:
    """Bundled out-of-process solver (HiGHS via scipy)."""
    return f"{shlex.quote(sys.executable)} -m blackstart.solvers.highs_cli {{mps}} {{sol}}"


def resolve_solver_command(command: str | None = None) -> str:
    return command or os.environ.get(ENV_SOLVER_CMD) or default_solver_command()


class SolutionFormatError(ValueError):
    pass


def import_solution(model: MilpModel, text: str) -> dict[str, float] | None:
    """Parse a solution document into a complete assignment.

    Returns None when the document carries the infeasibility sentinel.
    """
    assignment: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == INFEASIBLE_SENTINEL:
            return None
        tokens = line.split()
        if len(tokens) != 2:
            raise SolutionFormatError(f"line {lineno}: expected 'name value', got {raw!r}")
        name, value = tokens
        if not model.has_var(name):
            raise SolutionFormatError(f"line {lineno}: unknown variable {name!r}")
        try:
            assignment[name] = float(value)
        except ValueError as exc:
            raise SolutionFormatError(f"line {lineno}: unparseable value {value!r}") from exc
    for v in model.variables:
        assignment.setdefault(v.name, 0.0)
    return assignment


def solve_external(
    case: GridCase,
    command: str | None = None,
    model: MilpModel | None = None,
    timeout_s: float = 600.0,
    workdir: str | Path | None = None,
) -> SolveResult:
    """Encode, export, run the solver command, import, decode, validate."""
    t0 = time.monotonic()
    model = model if model is not None else encode(case)
    template = resolve_solver_command(command)

    with tempfile.TemporaryDirectory(dir=workdir, prefix="blackstart-") as tmp:
        mps_path = Path(tmp) / "model.mps"
        sol_path = Path(tmp) / "model.sol"
        write_mps(model, mps_path)
        argv = [
            part.format(mps=str(mps_path), sol=str(sol_path))
            for part in shlex.split(template)
        ]
        try:
            proc = subprocess.run(
                argv, capture_output=True, text=True, timeout=timeout_s,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            return SolveResult(status=ERROR, message=f"solver process failed: {exc}",
                               stats={"wall_time_s": time.monotonic() - t0})
        stats = {
            "wall_time_s": time.monotonic() - t0,
            "solver_command": " ".join(argv),
            "returncode": proc.returncode,
        }
        if proc.returncode != 0:
            return SolveResult(
                status=ERROR, stats=stats,
                message=f"solver exited {proc.returncode}: {proc.stderr.strip()[:2000]}",
            )
        if not sol_path.exists():
            return SolveResult(status=ERROR, stats=stats,
                               message="solver wrote no solution file")
        try:
            assignment = import_solution(model, sol_path.read_text())
        except SolutionFormatError as exc:
            return SolveResult(status=ERROR, stats=stats,
                               message=f"bad solution document: {exc}")

    if assignment is None:
        return SolveResult(status=INFEASIBLE, stats=stats)
    try:
        schedule: Schedule = decode(model, assignment, case)
    except DecodeError as exc:
        return SolveResult(status=ERROR, assignment=assignment, stats=stats,
                           message=f"solution does not decode: {exc}")
    report = validate(case, schedule)
    objective = model.objective_of(assignment)
    if not report.passed:
        return SolveResult(
            status=ERROR, assignment=assignment, objective=objective,
            stats=stats, schedule=schedule, validation=report,
            message=f"solution fails validation with {len(report.violations)} violation(s)",
        )
    return SolveResult(
        status=OPTIMAL, assignment=assignment, objective=objective,
        stats=stats, schedule=schedule, validation=report,
    )
