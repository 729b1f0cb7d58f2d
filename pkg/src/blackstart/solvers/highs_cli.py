"""Out-of-process MILP front end: read an MPS file, solve, write a solution.

Usage: python -m blackstart.solvers.highs_cli MODEL.mps OUT.sol

Solves with HiGHS through scipy at zero relative gap. Writes ``name value``
lines on optimality, the ``=infeasible=`` sentinel for a proven-infeasible
model, and exits nonzero on anything else, which is exactly the contract
solve_external expects of any external solver.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from ..mps import read_mps


def solve_mps_file(mps_path: str | Path, sol_path: str | Path) -> int:
    model = read_mps(mps_path)
    n = len(model.variables)
    index = {v.name: i for i, v in enumerate(model.variables)}

    c = np.zeros(n)
    for name, coef in model.objective.items():
        c[index[name]] += coef

    rows, cols, vals = [], [], []
    con_lb, con_ub = [], []
    for i, con in enumerate(model.constraints):
        for name, coef in con.terms:
            rows.append(i)
            cols.append(index[name])
            vals.append(coef)
        if con.sense == "<=":
            con_lb.append(-np.inf)
            con_ub.append(con.rhs)
        elif con.sense == ">=":
            con_lb.append(con.rhs)
            con_ub.append(np.inf)
        else:
            con_lb.append(con.rhs)
            con_ub.append(con.rhs)

    integrality = np.array([1 if v.is_integer else 0 for v in model.variables])
    bounds = Bounds(
        np.array([v.lb for v in model.variables]),
        np.array([v.ub for v in model.variables]),
    )
    constraints = []
    if model.constraints:
        a = sparse.csc_matrix((vals, (rows, cols)), shape=(len(model.constraints), n))
        constraints = [LinearConstraint(a, np.array(con_lb), np.array(con_ub))]

    res = milp(
        c=c,
        constraints=constraints,
        integrality=integrality,
        bounds=bounds,
        options={"mip_rel_gap": 0.0},
    )

    if res.status == 2:  # proven infeasible
        Path(sol_path).write_text("=infeasible=\n")
        return 0
    if res.status != 0 or res.x is None:
        print(f"solve failed: status={res.status} {res.message}", file=sys.stderr)
        return 1
    lines = [
        f"# objective {float(res.fun) + model.objective_constant!r}",
        *(f"{v.name} {float(res.x[i])!r}" for i, v in enumerate(model.variables)),
    ]
    Path(sol_path).write_text("\n".join(lines) + "\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 2:
        print("usage: blackstart-solve-mps MODEL.mps OUT.sol", file=sys.stderr)
        return 2
    return solve_mps_file(argv[0], argv[1])


if __name__ == "__main__":
    sys.exit(main())
