import json

import pytest

from bosebound import potentials as pot
from bosebound import tables
from bosebound.cli import main


@pytest.fixture
def well_file(tmp_path):
    path = tmp_path / "well.json"
    pot.dump(pot.square_well(8.0, 1.0), path)
    return path


def test_scatter_writes_table(tmp_path, well_file):
    out = tmp_path / "s.csv"
    assert main(["--seed", "4", "scatter", "--potential", str(well_file), "--out", str(out)]) == 0
    t = tables.read_table(out)
    assert t.columns == ("r", "omega", "g") and t.meta["seed"] == 4
    assert abs(t.meta["a_ode"] - t.meta["a_variational"]) < 1e-8


def test_scatter_hard_core_profiles_finite(tmp_path):
    src = tmp_path / "hc.json"
    pot.dump(pot.hard_core(1.0), src)
    out = tmp_path / "hc.csv"
    assert main(["scatter", "--potential", str(src), "--out", str(out)]) == 0
    rows = tables.read_table(out).rows
    assert all(all(x == x for x in row) for row in rows)


def test_outputs_are_deterministic(tmp_path, well_file):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["lhy", "--potential", str(well_file), "--rho-a3", "1e-6",
                     "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_localize_columns(tmp_path):
    out = tmp_path / "loc.csv"
    assert main(["localize", "--pgrid", "axis:3", "--out", str(out)]) == 0
    t = tables.read_table(out)
    assert t.columns == ("px", "py", "pz", "p", "F", "F_s", "quav")
    assert len(t.rows) == 3


def test_bog_prints_values(capsys):
    assert main(["bog", "--A", "2", "--B", "1", "--nmax", "30"]) == 0
    out = dict(line.split() for line in capsys.readouterr().out.splitlines())
    assert abs(float(out["oracle"]) - float(out["exact"])) < 1e-8
    assert float(out["gap"]) >= -1e-9


def test_energy_json_schema(tmp_path, well_file):
    out = tmp_path / "e.json"
    assert main(["energy", "--potential", str(well_file), "--rho", "1e-6", "--C", "1.0",
                 "--mode", "grand-canonical", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    for key in ("leading", "quadratic_gap", "lhy_term", "budget", "constants_used"):
        assert key in doc
    assert all({"label", "value", "law"} <= set(item) for item in doc["budget"])


def test_corrupted_potential_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "square_well",\n "params": {"V0": }}')
    assert main(["scatter", "--potential", str(bad)]) == 2
    assert "bad.json:2:" in capsys.readouterr().err


def test_missing_file_exit_2(tmp_path):
    assert main(["scatter", "--potential", str(tmp_path / "none.json")]) == 2


def test_unknown_config_key_exit_2(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"A": 1.0, "colour": "red"}')
    assert main(["--config", str(cfg), "bog", "--A", "1", "--B", "0"]) == 2


def test_config_fills_options(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"B": 0.5, "nmax": 20}')
    assert main(["--config", str(cfg), "bog", "--A", "1", "--B", "0"]) == 0
    out = dict(line.split() for line in capsys.readouterr().out.splitlines())
    # the command-line B wins over the file
    assert float(out["exact"]) == 0.0


def test_invalid_coefficients_exit_2():
    assert main(["bog", "--A", "1", "--B", "2"]) == 2


def test_verify_list_and_unknown_filter(capsys):
    assert main(["verify", "--list"]) == 0
    names = capsys.readouterr().out.split()
    assert "bogoliubov.tau_split" in names and len(names) >= 15
    assert main(["verify", "--filter", "nothing.*"]) == 2


def test_verify_with_zero_kinetic_cutoff(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--filter", "bogoliubov.tau*", "--C-kin", "0", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] and doc["checks"][0]["name"] == "bogoliubov.tau_split"


def test_verify_failure_exit_1(monkeypatch):
    from bosebound import verify
    monkeypatch.setitem(verify.CHECKS, "zz.fails", lambda cfg: (False, "forced"))
    assert main(["verify", "--filter", "zz.*"]) == 1


def test_verify_default_suite_passes(tmp_path):
    out = tmp_path / "v.json"
    assert main(["--seed", "0", "verify", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["seed"] == 0 and all(c["passed"] for c in doc["checks"])
