import csv
import json
import subprocess
import sys

import pytest

from torusdense import cli

CAT_CFG = "matrix = 2 1 1 1\nobservable = cos 1 0 1\nprecision_bits = 128\n"
COB_CFG = "matrix = 2 1 1 1\nobservable = sin 1 1 3/10; sin 0 1 -3/10; const 1/2\n"
HIT = ["--p", "2/5,4/5", "--q", "1/5,2/5"]


@pytest.fixture
def cfg(tmp_path):
    def write(text, name="sys.cfg"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def test_config_parse():
    c = cli.SystemConfig.parse(CAT_CFG + "period_max = 6  # comment\nextra_key = 1\n")
    assert tuple(c.matrix) == (2, 1, 1, 1) and c.period_max == 6 and c.extra == {"extra_key": "1"}


@pytest.mark.parametrize("text", [
    "matrix = 2 1 1 1\n",
    "matrix = 1 1 0 1\nobservable = cos 1 0 1\n",
    "matrix = 2 1 1\nobservable = cos 1 0 1\n",
    "matrix = 2 1 1 1\nobservable = tan 1 0 1\n",
    CAT_CFG + "precision_bits = 8\n",
    "no equals sign\n",
])
def test_bad_configs(text):
    with pytest.raises(cli.ConfigError):
        cli.SystemConfig.parse(text)


def test_scan_writes_csvs(cfg, tmp_path, capsys):
    out = tmp_path / "orbits.csv"
    code = cli.main(["scan", "--config", cfg(CAT_CFG), "--period-max", "2", "--window=-5..5",
                     "--bins", "4", "--out", str(out)])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    orbits = [{("0/1", "0/1")}, {("1/5", "2/5"), ("4/5", "3/5")}, {("2/5", "4/5"), ("3/5", "1/5")}]
    assert [r["period"] for r in rows] == ["1", "2", "2"]
    assert all((r["x1"], r["x2"]) in orbit for r, orbit in zip(rows, orbits))
    sums = sorted(float.fromhex(r["sum_lo"]) for r in rows)
    assert sums[0] == pytest.approx(-(1 + 5**0.5) / 2) and sums[-1] == pytest.approx(1)
    hist = list(csv.DictReader((tmp_path / "orbits_hist.csv").open()))
    assert len(hist) == 4 and sum(int(h["count"]) for h in hist) == 3
    assert "max_gap" in capsys.readouterr().out


def test_exit_codes(cfg, tmp_path):
    cat, cob = cfg(CAT_CFG), cfg(COB_CFG, "cob.cfg")
    assert cli.main(["scan", "--config", cfg("matrix = 1 1 0 1\nobservable = cos 1 0 1\n", "bad.cfg"),
                     "--window", "0..1"]) == cli.EXIT_CONFIG
    assert cli.main(["scan", "--config", str(tmp_path / "missing.cfg"), "--window", "0..1"]) == cli.EXIT_CONFIG
    assert cli.main(["scan", "--config", cat, "--window", "0-1"]) == cli.EXIT_CONFIG
    assert cli.main(["scan", "--config", cfg(CAT_CFG + "enum_cap = 100\n", "cap.cfg"), "--period-max", "8",
                     "--window", "0..1"]) == cli.EXIT_CAP
    assert cli.main(["hit", "--config", cat, "--target", "0", "--eps", "1/10", "--p", "1/5"]
                    + ["--q", "1/5,2/5"]) == cli.EXIT_CONFIG
    assert cli.main(["hit", "--config", cat, "--target", "0", "--eps", "0"] + HIT) == cli.EXIT_CONFIG
    assert cli.main(["hit", "--config", cat, "--target", "0", "--eps", "1/10",
                     "--p", "1/5,2/5", "--q", "2/5,4/5"]) == cli.EXIT_HYPOTHESIS
    assert cli.main(["hit", "--config", cob, "--target", "0.77", "--eps", "0.01"] + HIT) == cli.EXIT_OBSTRUCTED
    assert cli.main(["hit", "--config", cfg(CAT_CFG + "L_max = 40\n", "small.cfg"), "--target", "5",
                     "--eps", "1/10"] + HIT) == cli.EXIT_CAP


def test_lattice_messages(cfg, capsys):
    assert cli.main(["lattice", "--config", cfg(COB_CFG), "--period-max", "6"]) == 0
    out = capsys.readouterr().out
    assert float(out.split("lattice c = ")[1].split()[0]) == pytest.approx(0.5, abs=1e-6)
    assert cli.main(["lattice", "--config", cfg(CAT_CFG, "cat.cfg"), "--period-max", "6"]) == 0
    assert "no lattice" in capsys.readouterr().out
    assert cli.main(["lattice", "--config", cfg("matrix = 2 1 1 1\nobservable = const 0\n", "z.cfg")]) == 0
    assert "all sums vanish" in capsys.readouterr().out


def test_hit_is_deterministic_and_verifies(cfg, tmp_path):
    cat = cfg(CAT_CFG)
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        assert cli.main(["hit", "--config", cat, "--target", "3/10", "--eps", "1/10", "--cert", str(path)] + HIT) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert cli.main(["verify", "--cert", str(paths[0])]) == 0
    assert cli.main(["verify", "--cert", str(paths[0]), "--precision", "256"]) == 0


def test_verify_rejects_tampering(cfg, tmp_path):
    path = tmp_path / "c.json"
    assert cli.main(["hit", "--config", cfg(CAT_CFG), "--target", "0", "--eps", "1/10", "--cert", str(path)] + HIT) == 0
    data = json.loads(path.read_text())
    data["shadow"]["z"] = ["1/3", "0/1"]
    path.write_text(json.dumps(data))
    assert cli.main(["verify", "--cert", str(path)]) == cli.EXIT_VERIFY
    path.write_text("{ not json")
    assert cli.main(["verify", "--cert", str(path)]) == cli.EXIT_CONFIG


def test_module_entry_point(cfg):
    out = subprocess.run([sys.executable, "-m", "torusdense", "lattice", "--config", cfg(COB_CFG), "--period-max", "4"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "lattice c" in out.stdout
