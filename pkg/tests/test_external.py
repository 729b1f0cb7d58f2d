import shlex
import stat
import sys

import pytest

from blackstart import encode
from blackstart.solvers import (
    ENV_SOLVER_CMD,
    default_solver_command,
    import_solution,
    resolve_solver_command,
    solve_external,
)
from blackstart.solvers.external import SolutionFormatError


def write_solution_text(model, assignment):
    return "\n".join(f"{name} {value!r}" for name, value in assignment.items()) + "\n"


def stub_command(tmp_path, name, body):
    """Executable python stub invoked as `<python> <stub> {mps} {sol}`."""
    script = tmp_path / name
    script.write_text(body)
    script.chmod(script.stat().st_mode | stat.S_IEXEC)
    return f"{shlex.quote(sys.executable)} {shlex.quote(str(script))} {{mps}} {{sol}}"


@pytest.fixture()
def known_good(toy_cases, toy_enum, tmp_path):
    case = toy_cases["toy_t5"]
    model = encode(case)
    assignment = toy_enum["toy_t5"].assignment
    sol = tmp_path / "good.sol"
    sol.write_text(write_solution_text(model, assignment))
    return case, model, assignment, sol


def test_stub_solver_copies_known_good_solution(known_good, tmp_path):
    case, model, assignment, sol = known_good
    cmd = stub_command(
        tmp_path, "copy_stub.py",
        "import shutil, sys\nshutil.copy(%r, sys.argv[2])\n" % str(sol),
    )
    result = solve_external(case, command=cmd)
    assert result.status == "optimal"
    assert result.schedule.gen_start == {"g1": 2, "g2": 3, "g3": 4}
    for name, value in assignment.items():
        assert result.assignment[name] == pytest.approx(value, abs=1e-9)


def test_nonzero_exit_is_error(known_good, tmp_path):
    case = known_good[0]
    cmd = stub_command(tmp_path, "fail_stub.py", "import sys\nsys.exit(7)\n")
    result = solve_external(case, command=cmd)
    assert result.status == "error"
    assert "7" in result.message


def test_infeasible_sentinel(known_good, tmp_path):
    case = known_good[0]
    cmd = stub_command(
        tmp_path, "infeasible_stub.py",
        "import sys\nopen(sys.argv[2], 'w').write('=infeasible=\\n')\n",
    )
    result = solve_external(case, command=cmd)
    assert result.status == "infeasible"


def test_corrupt_solution_fails_validation(known_good, tmp_path):
    case, model, assignment, sol = known_good
    corrupt = dict(assignment)
    corrupt["gen_power.g2.4"] = 55.0  # semantic trajectory says 80
    bad = tmp_path / "bad.sol"
    bad.write_text(write_solution_text(model, corrupt))
    cmd = stub_command(
        tmp_path, "corrupt_stub.py",
        "import shutil, sys\nshutil.copy(%r, sys.argv[2])\n" % str(bad),
    )
    result = solve_external(case, command=cmd)
    assert result.status == "error"
    assert result.validation is not None
    assert any(v.tag == "eq23g" for v in result.validation.violations)


def test_missing_solution_file_is_error(known_good, tmp_path):
    case = known_good[0]
    cmd = stub_command(tmp_path, "noop_stub.py", "pass\n")
    result = solve_external(case, command=cmd)
    assert result.status == "error"
    assert "no solution" in result.message


def test_import_all_zero_is_all_dark(known_good):
    case, model, _, _ = known_good
    text = "\n".join(f"{v.name} 0" for v in model.variables)
    assignment = import_solution(model, text)
    assert set(assignment) == {v.name for v in model.variables}
    assert all(v == 0.0 for v in assignment.values())


def test_import_missing_names_default_to_zero(known_good):
    _, model, _, _ = known_good
    assignment = import_solution(model, "# only a comment\n")
    assert all(v == 0.0 for v in assignment.values())


def test_import_tolerates_near_integral_values(known_good, toy_cases):
    case, model, assignment, _ = known_good
    text = write_solution_text(model, assignment).replace(
        "bus_on.b1.3 1.0", "bus_on.b1.3 1.0000001"
    )
    parsed = import_solution(model, text)
    assert parsed["bus_on.b1.3"] == pytest.approx(1.0, abs=1e-6)
    from blackstart import decode

    sched = decode(model, parsed, case)
    assert sched.bus_on["b1"][2] is True


def test_import_unknown_name_rejected(known_good):
    _, model, _, _ = known_good
    with pytest.raises(SolutionFormatError, match="foo.bar.1"):
        import_solution(model, "foo.bar.1 0\n")


def test_import_unparseable_value_rejected(known_good):
    _, model, _, _ = known_good
    with pytest.raises(SolutionFormatError, match="unparseable"):
        import_solution(model, "gen_start.g1.2 twelve\n")


def test_env_var_selects_solver(monkeypatch):
    monkeypatch.setenv(ENV_SOLVER_CMD, "mysolver {mps} {sol}")
    assert resolve_solver_command() == "mysolver {mps} {sol}"
    monkeypatch.delenv(ENV_SOLVER_CMD)
    assert resolve_solver_command() == default_solver_command()
    assert resolve_solver_command("explicit {mps} {sol}") == "explicit {mps} {sol}"


def test_real_backend_matches_enumeration(toy_cases, toy_enum, toy_external):
    for name in toy_cases:
        enum = toy_enum[name]
        ext = toy_external[name]
        assert ext.status == "optimal", (name, ext.message)
        rel = abs(enum.objective - ext.objective) / (1 + abs(enum.objective))
        assert rel <= 1e-6, name
        assert ext.validation.passed
