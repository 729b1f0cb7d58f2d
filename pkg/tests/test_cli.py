import json
import shlex
import stat
import sys

from blackstart import import_mps
from blackstart.cases import bundled_case_path
from blackstart.cli import main

from conftest import bundled_document, doc_variant


def case_arg(name):
    return str(bundled_case_path(name))


def test_run_writes_artifacts(tmp_path, capsys):
    rc = main(["run", "--case", case_arg("toy_t5"), "--backend", "enum",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    for artifact in ("schedule.json", "validation.json", "gsus.csv", "restored_power.csv"):
        assert (tmp_path / artifact).exists()
    summary = json.loads(capsys.readouterr().out)
    assert summary["status"] == "optimal"


def test_run_load_error_exit_code(tmp_path):
    bad = doc_variant(bundled_document("toy_path3"), **{"generators.0.black_start": False})
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    rc = main(["run", "--case", str(path), "--backend", "enum", "--out-dir", str(tmp_path)])
    assert rc == 2


def test_run_with_corrupt_external_solution_exits_validation_code(tmp_path):
    stub = tmp_path / "stub.py"
    # claims full fuel-cell output one step early: decodes but fails validation
    stub.write_text(
        "import sys\n"
        "from blackstart.mps import read_mps\n"
        "model = read_mps(sys.argv[1])\n"
        "values = {v.name: v.lb for v in model.variables}\n"
        "lines = [f'{n} {v}' for n, v in values.items()]\n"
        "open(sys.argv[2], 'w').write('\\n'.join(lines))\n"
    )
    stub.chmod(stub.stat().st_mode | stat.S_IEXEC)
    cmd = f"{shlex.quote(sys.executable)} {shlex.quote(str(stub))} {{mps}} {{sol}}"
    rc = main(["run", "--case", case_arg("toy_t5"), "--backend", "external",
               "--solver-cmd", cmd, "--out-dir", str(tmp_path)])
    assert rc == 4
    assert (tmp_path / "validation.json").exists()


def test_validate_verb(tmp_path):
    rc = main(["run", "--case", case_arg("toy_path3"), "--backend", "enum",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    rc = main(["validate", "--case", case_arg("toy_path3"),
               "--schedule", str(tmp_path / "schedule.json")])
    assert rc == 0
    # corrupt it: start the generator during the blackout step
    doc = json.loads((tmp_path / "schedule.json").read_text())
    doc["gen_start"]["g2"] = 1
    bad = tmp_path / "bad_schedule.json"
    bad.write_text(json.dumps(doc))
    rc = main(["validate", "--case", case_arg("toy_path3"), "--schedule", str(bad)])
    assert rc == 4


def test_export_mps_verb(tmp_path):
    out = tmp_path / "model.mps"
    rc = main(["export-mps", "--case", case_arg("toy_path3"), "--out", str(out)])
    assert rc == 0
    model = import_mps(out.read_text())
    assert any(v.kind == "gen_start" for v in model.variables)


def test_report_verb(tmp_path, capsys):
    assert main(["run", "--case", case_arg("toy_t5"), "--backend", "enum",
                 "--out-dir", str(tmp_path)]) == 0
    rc = main(["report", "--case", case_arg("toy_t5"),
               "--schedule", str(tmp_path / "schedule.json"),
               "--out-dir", str(tmp_path / "report")])
    assert rc == 0
    stats = json.loads((tmp_path / "report" / "stats.json").read_text())
    assert stats["critical_buses"] == 5
    assert (tmp_path / "report" / "gsus.csv").exists()


def test_sweep_verb(tmp_path):
    rc = main(["sweep", "--case", case_arg("toy_t5"), "--axis", "fc_capacity",
               "--values", "10,20", "--backend", "enum", "--out-dir", str(tmp_path)])
    assert rc == 0
    csv = (tmp_path / "sweep_fc_capacity.csv").read_text()
    assert csv.splitlines()[0] == "fc_capacity,10,20"


def test_sweep_verb_location_values(tmp_path):
    rc = main(["sweep", "--case", case_arg("toy_t5"), "--axis", "resource_location",
               "--values", "b2;b5", "--backend", "enum", "--out-dir", str(tmp_path)])
    assert rc == 0
    csv = (tmp_path / "sweep_resource_location.csv").read_text()
    assert csv.splitlines()[0] == "resource_location,b2,b5"
