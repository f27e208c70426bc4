import json
import os
import subprocess
import sys

import pytest

from supertheta import cli
from supertheta.pipeline import PipelineError

MB = os.path.join(os.path.dirname(__file__), os.pardir, "configs", "mb_p3.json")


def test_squares_run_writes_json(tmp_path):
    out = tmp_path / "res.json"
    assert cli.main(["run", MB, "--mode", "squares", "--out", str(out)]) == cli.EXIT_OK
    res = json.loads(out.read_text())
    assert res["theta_squares_only"] is True
    assert len(res["theta"]) == 16
    assert sorted(res["vanishing_profile"]) == sorted(
        k for k in res["theta"] if not any(res["theta"][k]))
    assert res["supersingular"] is True
    assert "timings" not in res


def test_two_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert cli.main(["run", MB, "--mode", "squares", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_validation_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    cfg = json.loads(open(MB).read())
    cfg["n"] = 3
    bad.write_text(json.dumps(cfg))
    assert cli.main(["run", str(bad)]) == cli.EXIT_VALIDATION
    assert "validation error" in capsys.readouterr().err


@pytest.mark.parametrize("text", ["{not json", "{}"])
def test_unreadable_config(tmp_path, text):
    bad = tmp_path / "bad.json"
    bad.write_text(text)
    assert cli.main(["run", str(bad)]) == cli.EXIT_VALIDATION
    assert cli.main(["run", str(tmp_path / "missing.json")]) == cli.EXIT_VALIDATION


def test_pipeline_failure_dumps_partial(tmp_path, monkeypatch):
    def fail(cfg):
        raise PipelineError("sections: stuck", {"diagnostics": {"section_dim": 3}})

    monkeypatch.setattr(cli, "run_pipeline", fail)
    out = tmp_path / "err.json"
    code = cli.main(["run", MB, "--dump-intermediates", "--out", str(out)])
    assert code == cli.EXIT_PIPELINE
    dump = json.loads(out.read_text())
    assert dump["error"] == "sections: stuck"
    assert dump["partial"]["diagnostics"]["section_dim"] == 3


def test_console_entry_point_help():
    proc = subprocess.run([sys.executable, "-m", "supertheta.cli", "run", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "--dump-intermediates" in proc.stdout
