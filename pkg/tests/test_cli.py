import json
import subprocess
import sys

import pytest

from zerofree import __version__
from zerofree.cli import main
from zerofree.report import TAGS, Report, to_csv, to_json


def run_json(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_params_report(capsys):
    code, rep = run_json(capsys, "params", "--H", "3", "--nu", "2")
    assert code == 0
    assert rep["version"] == __version__
    assert rep["config"]["H"] == 3 and rep["config"]["nu"] == 2
    assert "parameter-pipeline" in rep["tags"]
    assert rep["results"]["params"]["q"] == 15


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"H": 4, "nu": 3}))
    _, rep = run_json(capsys, "params", "--config", str(cfg), "--nu", "5")
    assert rep["config"]["H"] == 4 and rep["config"]["nu"] == 5


@pytest.mark.parametrize("payload", [{"bogus": 1}, [1, 2]])
def test_bad_config_is_usage_error(tmp_path, capsys, payload):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(payload))
    assert main(["params", "--config", str(cfg)]) == 64
    assert "usage error" in capsys.readouterr().err


def test_unknown_flag_exits_64():
    with pytest.raises(SystemExit) as info:
        main(["params", "--frobnicate", "1"])
    assert info.value.code == 64


def test_domain_error_exits_64(capsys):
    assert main(["params", "--H", "12"]) == 64
    assert "InvalidArgument" in capsys.readouterr().err


def test_deterministic_apart_from_timestamp(capsys):
    outs = []
    for _ in range(2):
        main(["hilbert", "--trials", "50", "--seed", "9"])
        rep = json.loads(capsys.readouterr().out)
        rep.pop("timestamp")
        outs.append(json.dumps(rep, sort_keys=True))
    assert outs[0] == outs[1]


def test_csv_and_text(capsys, tmp_path):
    out = tmp_path / "r.csv"
    assert main(["spacing", "--n-max", "3", "--q-max", "2", "--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith(f"# zerofree {__version__} spacing")
    assert "# n_max=3" in lines
    header = next(line for line in lines if not line.startswith("#"))
    assert header.startswith("N,q,xi,lower_bound")
    main(["zeta", "--format", "text", "--T", "30"])
    text = capsys.readouterr().out
    assert "[PASS]" in text and "exit status: 0" in text


def test_plot_writes_figures(tmp_path, capsys):
    code, rep = run_json(capsys, "cover", "--plot", str(tmp_path))
    assert code == 0
    assert rep["figures"] and all((tmp_path / f).exists() or f.endswith(".png")
                                  for f in rep["figures"])
    assert (tmp_path / "cover.png").stat().st_size > 0


def test_infeasible_stage_exit_2(capsys):
    code, rep = run_json(capsys, "theta", "--nu", "8", "--cq", "1.0")
    assert code == 2
    assert rep["checks"][0]["analysis_only"]


def test_report_exit_status_rules():
    r = Report("x", {})
    r.check("a", "psi-map", True, theorem_backed=True)
    r.check("b", "psi-map", False)
    assert r.exit_status == 0
    r.check("c", "psi-map", False, analysis_only=True)
    assert r.exit_status == 2
    r.check("d", "psi-map", False, theorem_backed=True)
    assert r.exit_status == 1
    with pytest.raises(KeyError):
        r.check("e", "no-such-tag", True)
    assert set(r.tags) <= set(TAGS)
    assert json.loads(to_json(r, timestamp=False))["exit_status"] == 1
    assert to_csv(r).startswith("# zerofree")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "zerofree", "params", "--nu", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["subcommand"] == "params"
