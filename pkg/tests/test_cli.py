import json
import subprocess
import sys

import pytest

from pax.cli import main
from pax.selftest import bundled_path

TAU = bundled_path("tau")
DIE = bundled_path("die")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bisim_exit_codes(capsys):
    assert run(capsys, "bisim", TAU, "TA", "A", "--rooted")[0] == 1
    assert run(capsys, "bisim", TAU, "TA", "A", "--branching")[0] == 0
    code, out, _ = run(capsys, "bisim", TAU, "TA", "A", "--format", "json")
    data = json.loads(out)
    assert code == 1 and data["equivalent"] is False and data["evidence"]


def test_inline_terms(capsys):
    assert run(capsys, "bisim", TAU, "a", "pc{1/2: a, 1/2: a}")[0] == 0


def test_prove(capsys):
    code, out, _ = run(capsys, "prove", TAU, "Absorb", "Merged", "--format", "json")
    assert code == 0 and json.loads(out)["verdict"] == "derived"
    assert run(capsys, "prove", TAU, "a", "b")[0] == 3


def test_lts_json(capsys):
    code, out, _ = run(capsys, "lts", DIE, "Die", "--json")
    data = json.loads(out)
    assert code == 0 and len(data["states"]) == 8


def test_sim_reproducible(capsys):
    args = ("sim", DIE, "Die", "--runs", "20", "--seed", "4", "--event", "performed:throw1")
    first = run(capsys, *args)[1]
    assert first == run(capsys, *args)[1]
    assert first.splitlines()[0] == "run,seed,status,final_map,actions"
    assert "# performed:throw1" in first or "95%" in first


def test_parse_error_location(tmp_path, capsys):
    bad = tmp_path / "bad.pax"
    bad.write_text("actions a\nproc P = a || b\n")
    code, _, err = run(capsys, "parse", str(bad))
    assert code == 2 and "bad.pax:2:" in err


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bisim", TAU])
    assert exc.value.code == 2


def test_budget_exit(capsys):
    geo = bundled_path("geometric")
    assert run(capsys, "lts", geo, "Run", "--max-states", "5")[0] == 4


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "pax", "parse", DIE], capture_output=True, text=True)
    assert res.returncode == 0 and "throw1" in res.stdout
