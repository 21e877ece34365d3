import csv
import json
from pathlib import Path

import pytest

from zerohopf.cli import ConfigError, load_config, main, parse_number

ROOT = Path(__file__).resolve().parents[1]


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


SCALAR = """
[run]
case = scalar
analyses = averaging

[parameters]
rate = 1
power = 1
probe = 7/10
"""


def test_parse_number_accepts_rationals():
    assert parse_number("-177/10") == -17.7
    assert parse_number(" 0.25 ") == 0.25
    with pytest.raises(ConfigError):
        parse_number("abc")


def test_selftest_exit_codes(capsys):
    assert main(["selftest"]) == 0
    assert "FAIL" not in capsys.readouterr().out
    assert main(["selftest", "--perturb-fixture", "1e-3"]) == 2
    assert main(["selftest", "--tolerance", "-1"]) == 3


@pytest.mark.parametrize(
    "text, message",
    [
        ("[run]\ncase = scalar\nanalyses =\n[parameters]\nrate = 1\npower = 1\n", "no analyses requested"),
        (SCALAR + "\n[tolerances]\nnewton = -1e-10\n", "tolerance newton must be positive"),
        (SCALAR.replace("[run]", "[run]\neps = 0.7"), "eps values must lie in (0, 0.5)"),
        (SCALAR.replace("case = scalar", "case = C"), "case must be one of"),
        (SCALAR.replace("power = 1\n", ""), "needs parameters ['power']"),
        (SCALAR.replace("analyses = averaging", "analyses = plots"), "unknown analyses"),
    ],
)
def test_config_errors(tmp_path, capsys, text, message):
    assert main(["analyze", "--config", str(write(tmp_path, text)), "--out", str(tmp_path / "o")]) == 3
    assert message in capsys.readouterr().err


def test_unreadable_config(tmp_path, capsys):
    assert main(["analyze", "--config", str(tmp_path / "missing.cfg")]) == 3
    assert "cannot read config" in capsys.readouterr().err


def test_deterministic_outputs(tmp_path):
    cfg = write(tmp_path, SCALAR)
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}"
        assert main(["analyze", "--config", str(cfg), "--out", str(out)]) == 0
        outs.append(out)
    data = sorted(p.name for p in outs[0].iterdir() if p.name != "manifest.json")
    for name in data:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name
    manifest = json.loads((outs[0] / "manifest.json").read_text())
    assert manifest["files"] == data
    report = json.loads((outs[0] / "averaging.json").read_text())
    assert "tolerance" in report and report["exact_gap"] <= 1e-10
    rows = list(csv.reader((outs[0] / "averaging.csv").open()))
    assert rows[0] == ["order", "component", "engine", "oracle", "relative_gap"]
    assert rows[1][2] == f"{float(rows[1][2]):.17g}"


def test_sample_configs_parse():
    for name in ("fig1.cfg", "fig2.cfg", "scalar.cfg"):
        cfg = load_config(ROOT / "configs" / name)
        assert cfg.analyses


def test_case_b_bifurcation_and_stability(tmp_path):
    cfg = (ROOT / "configs" / "fig1.cfg").read_text().replace(
        "analyses = averaging, bifurcation, orbit, stability, scaling, findings", "analyses = bifurcation, stability")
    out = tmp_path / "o"
    assert main(["analyze", "--config", str(write(tmp_path, cfg)), "--out", str(out)]) == 0
    bif = json.loads((out / "bifurcation.json").read_text())
    assert bif["f1_sup"] <= 1e-9
    assert bif["report"]["u_star"][0] == pytest.approx(30.0297055932, rel=1e-9)
    stab = json.loads((out / "stability.json").read_text())
    assert stab["classification"] == "asymptotically stable"
    assert "tolerance" in stab
