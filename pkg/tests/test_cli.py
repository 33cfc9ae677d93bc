import csv
import hashlib

import numpy as np
import pytest

from dsmin.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK, main
from dsmin.config import ConfigError, load_settings
from dsmin.moments import read_matrix


def _rows(path):
    with open(path) as fh:
        lines = [l for l in fh if not l.startswith("#")]
    return list(csv.DictReader(lines))


def _header(path):
    with open(path) as fh:
        return [l[2:].strip() for l in fh if l.startswith("#")]


def _write(tmp_path, text):
    p = tmp_path / "exp.ini"
    p.write_text(text)
    return str(p)


def test_defaults_validate():
    s = load_settings("weights")
    assert s.m_antennas == 64 and s.epsilon == 0.5
    assert load_settings("select").m_antennas == 16


def test_config_section_overrides(tmp_path):
    p = _write(tmp_path, "[scenario]\nm_antennas = 12\nseed = 4\n[weights]\nm_antennas = 10\nepsilon = 0.7\n")
    s = load_settings("weights", p, {"seed": 9})
    assert (s.m_antennas, s.epsilon, s.seed) == (10, 0.7, 9)


@pytest.mark.parametrize("text,field", [
    ("[weights]\nepsilon = 1.0\n", "epsilon"),
    ("[scenario]\ntheta_l_deg = 100\ntheta_r_deg = 90\n", "theta_l_deg"),
    ("[weights]\nepsilonn = 0.2\n", "weights.epsilonn"),
    ("[weights]\nepsilon = abc\n", "weights.epsilon"),
    ("[bogus]\nx = 1\n", "[bogus]"),
])
def test_config_errors_name_field(tmp_path, text, field):
    with pytest.raises(ConfigError, match=field.replace("[", r"\[").replace("]", r"\]")):
        load_settings("weights", _write(tmp_path, text))


def test_select_budget_validation(tmp_path):
    with pytest.raises(ConfigError, match="budgets"):
        load_settings("select", _write(tmp_path, "[select]\nbudgets = 4 40\n"))


def test_weights_command(tmp_path, capsys):
    cfg = _write(tmp_path, "[scenario]\nm_antennas = 16\n[weights]\npattern_step_deg = 1.0\n")
    assert main(["weights", "--config", cfg, "--out", str(tmp_path / "o"), "--trace"]) == EXIT_OK
    rows = _rows(tmp_path / "o" / "metrics.csv")
    assert [r["method"] for r in rows] == ["aw-mini-ds", "proposed"]
    assert float(rows[1]["normalized_efficiency"]) >= 0.5 - 1e-6
    pat = _rows(tmp_path / "o" / "pattern.csv")
    assert len(pat) == 179 and set(pat[0]) == {"angle_deg", "gain_db_aw_mini_ds", "gain_db_proposed"}
    assert "seed = 0" in _header(tmp_path / "o" / "pattern.csv")
    assert (tmp_path / "o" / "trace_proposed.txt").exists()


def test_weights_single_antenna_identical_rows(tmp_path):
    cfg = _write(tmp_path, "[scenario]\nm_antennas = 1\n[weights]\npattern_step_deg = 5\n")
    assert main(["weights", "--config", cfg, "--out", str(tmp_path)]) == EXIT_OK
    rows = _rows(tmp_path / "metrics.csv")
    assert float(rows[0]["normalized_ds"]) == pytest.approx(float(rows[1]["normalized_ds"]), rel=1e-12)
    pat = np.array([[float(r["gain_db_proposed"])] for r in _rows(tmp_path / "pattern.csv")])
    np.testing.assert_allclose(pat, pat[0, 0])


def test_weights_inactive_constraint_identical_rows(tmp_path):
    # at 4 antennas the unconstrained optimum already has high efficiency
    cfg = _write(tmp_path, "[scenario]\nm_antennas = 2\ntheta_l_deg = 30\ntheta_r_deg = 60\n"
                           "[weights]\nepsilon = 0.01\npattern_step_deg = 5\n")
    assert main(["weights", "--config", cfg, "--out", str(tmp_path)]) == EXIT_OK
    rows = _rows(tmp_path / "metrics.csv")
    assert float(rows[0]["normalized_efficiency"]) > 0.01
    for k in ("normalized_ds", "normalized_efficiency"):
        assert float(rows[0][k]) == pytest.approx(float(rows[1][k]), rel=1e-9)


def test_sweep_spread(tmp_path):
    cfg = _write(tmp_path, "[scenario]\nm_antennas = 16\n[sweep-spread]\nspreads_deg = 5 10 20\nepsilons = 0.9\n")
    assert main(["sweep-spread", "--config", cfg, "--out", str(tmp_path), "--trace"]) == EXIT_OK
    rows = _rows(tmp_path / "sweep_spread.csv")
    base = [float(r["normalized_ds"]) for r in rows if r["method"] == "aw-mini-ds"]
    prop = [r for r in rows if r["method"] == "proposed"]
    assert [float(r["spread_deg"]) for r in prop] == [5, 10, 20]
    assert all(float(r["normalized_efficiency"]) >= 0.9 - 1e-6 for r in prop)
    assert np.all(np.diff(base) >= 0)
    assert len(list(tmp_path.glob("trace_spread*.txt"))) == 3


def test_select_command(tmp_path):
    cfg = _write(tmp_path, "[select]\nm_antennas = 8\nbudgets = 2 4 8\n")
    assert main(["select", "--config", cfg, "--out", str(tmp_path)]) == EXIT_OK
    rows = _rows(tmp_path / "select.csv")
    assert [int(r["n_rf"]) for r in rows] == [2, 4, 8]
    for r in rows:
        assert float(r["baseline_m_element_ds"]) <= float(r["proposed_ds"]) * (1 + 1e-9)
        assert float(r["proposed_ds"]) <= float(r["baseline_n_element_ds"]) * (1 + 1e-9)
        assert len(r["support"].split()) <= int(r["n_rf"])
    assert float(rows[-1]["proposed_ds"]) == pytest.approx(float(rows[-1]["baseline_m_element_ds"]), rel=1e-9)


def _sim_cfg(tmp_path, extra=""):
    return _write(tmp_path, "[scenario]\nm_antennas = 8\nq_count = 8\ntheta_l_deg = 70\ntheta_r_deg = 100\n"
                            "[simulate]\nn_paths = 32\nn_realizations = 1\nblock_len = 64\n" + extra)


def test_simulate_reproducible(tmp_path):
    cfg = _sim_cfg(tmp_path)
    digests = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["simulate", "--config", cfg, "--out", str(out), "--seed", "11"]) == EXIT_OK
        digests.append({f.name: hashlib.sha256(f.read_bytes()).hexdigest() for f in out.iterdir()})
    assert digests[0] == digests[1]
    assert set(digests[0]) == {"psd_empirical.csv", "psd_analytic.csv", "summary.txt"}
    assert "seed = 11" in _header(tmp_path / "run0" / "summary.txt")


def test_simulate_rejects_zero_weights(tmp_path, capsys):
    cfg = _sim_cfg(tmp_path, "weights = values\nweight_values = 0,0,0,0,0,0,0,0\n")
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "weight_values" in capsys.readouterr().err
    assert not (tmp_path / "o" / "psd_empirical.csv").exists()


def test_moments_dump(tmp_path):
    cfg = _write(tmp_path, "[scenario]\nm_antennas = 5\n")
    assert main(["moments-dump", "--config", cfg, "--out", str(tmp_path), "--quad-nodes", "8"]) == EXIT_OK
    c0 = read_matrix(tmp_path / "c0.txt")
    assert c0.shape == (5, 5)
    np.testing.assert_allclose(np.diag(c0), 2 * np.pi, atol=1e-12)


def test_exit_codes(tmp_path, monkeypatch):
    assert main(["weights", "--config", str(tmp_path / "missing.ini")]) == EXIT_CONFIG
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = _write(tmp_path, "[scenario]\nm_antennas = 3\n")
    assert main(["moments-dump", "--config", cfg, "--out", str(blocker / "sub")]) == EXIT_IO

    from dsmin import cli
    from dsmin.errors import NumericalFailure

    def boom(*a, **k):
        raise NumericalFailure("forced")

    monkeypatch.setattr(cli, "build_moments", boom)
    assert main(["moments-dump", "--config", cfg, "--out", str(tmp_path)]) == EXIT_NUMERIC


def test_help_documents_columns(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    assert "baseline_n_element_ds" in out and "Exit codes" in out


def test_select_spread_baseline(tmp_path):
    from dsmin.cli import baseline_subarray
    assert list(baseline_subarray(8, 3, "spread")) == [0, 4, 7]
    assert list(baseline_subarray(8, 3)) == [0, 1, 2]
    cfg = _write(tmp_path, "[select]\nm_antennas = 8\nbudgets = 3 8\nn_element_baseline = spread\n")
    assert main(["select", "--config", cfg, "--out", str(tmp_path)]) == EXIT_OK
    assert "n_element_baseline = spread" in _header(tmp_path / "select.csv")
    rows = _rows(tmp_path / "select.csv")
    assert float(rows[1]["baseline_n_element_ds"]) == pytest.approx(float(rows[1]["baseline_m_element_ds"]))


def test_config_inline_comments(tmp_path):
    p = _write(tmp_path, "[weights]\nepsilon = 0.7   ; tighter target\nsingle_branch = 3  # one beam\n")
    s = load_settings("weights", p)
    assert (s.epsilon, s.single_branch) == (0.7, 3)
