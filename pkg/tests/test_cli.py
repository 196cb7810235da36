import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swgalerkin.cli import OUTPUT_DIR_ENV, ConfigError, RunConfig, main, parse_config, run


def test_table1_config():
    cfg = parse_config("spatial-study --r 4 --mesh quasi-a --N 160,200,240 --lambda 0.05 --T 1 --mms 1".split())
    assert (cfg.command, cfg.r, cfg.mu, cfg.mesh) == ("spatial-study", 4, 2, "quasi-a")
    assert cfg.N == [160, 200, 240]
    assert (cfg.lam, cfg.k, cfg.M, cfg.T, cfg.mms) == (0.05, None, None, 1.0, 1)


def test_table5_config():
    cfg = parse_config("projection-study --r 5 --mu 3 --mesh quasi-b --N 9,17,33".split())
    assert (cfg.r, cfg.mu, cfg.mesh, cfg.N, cfg.target) == (5, 3, "quasi-b", [9, 17, 33], "nonsmooth")


def test_defaults():
    cfg = parse_config(["solve"])
    assert (cfg.r, cfg.mu, cfg.mesh, cfg.lam, cfg.T, cfg.mms) == (4, 2, "quasi-a", 0.05, 1.0, 1)


@pytest.mark.parametrize("argv", [
    "spatial-study --lambda 0.05 --k 1e-4",
    "solve --k 0.01 --M 100",
    "spatial-study --mesh quasi-a --N 161",
    "projection-study --mesh quasi-b --N 8",
    "temporal-study --N 60 --M 110,120 --M-ref 120",
    "temporal-study --lambda 0.1",
    "projection-study --k 0.1",
    "solve --r 4 --mu 3",
    "solve --N 10,20",
    "spatial-study --M-ref 600",
])
def test_usage_errors(argv):
    with pytest.raises(ConfigError):
        parse_config(argv.split())


def test_main_reports_usage_error(capsys):
    assert main("spatial-study --lambda 0.05 --k 1e-4".split()) == 2
    assert "conflicting" in capsys.readouterr().err


def test_config_file_and_override(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"r": 6, "mesh": "uniform", "N": [12, 18], "k": 1e-4}))
    cfg = parse_config(["spatial-study", "--config", str(path), "--N", "24"])
    assert (cfg.r, cfg.mu, cfg.mesh, cfg.N, cfg.k, cfg.lam) == (6, 4, "uniform", [24], 1e-4, None)
    path.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(ConfigError):
        parse_config(["solve", "--config", str(path)])


configs = st.one_of(
    st.builds(
        lambda N, r, lam, T, mms: ["spatial-study", "--r", str(r), "--mesh", "uniform",
                                   "--N", ",".join(map(str, N)), "--lambda", repr(lam),
                                   "--T", repr(T), "--mms", str(mms)],
        st.lists(st.integers(1, 500), min_size=1, max_size=6),
        st.integers(3, 7),
        st.floats(1e-3, 1.0),
        st.floats(0.01, 5.0),
        st.sampled_from([0, 1, 2]),
    ),
    st.builds(
        lambda N, M, extra: ["temporal-study", "--mesh", "quasi-a", "--N", str(2 * N),
                             "--M", ",".join(map(str, M)), "--M-ref", str(max(M) + extra)],
        st.integers(1, 100),
        st.lists(st.integers(1, 300), min_size=1, max_size=5),
        st.integers(1, 300),
    ),
    st.builds(
        lambda N, target, q: ["projection-study", "--r", "5", "--mesh", "quasi-b",
                              "--N", ",".join(str(2 * n + 1) for n in N), "--target", target,
                              "--quad", str(q)],
        st.lists(st.integers(0, 2000), min_size=1, max_size=4),
        st.sampled_from(["smooth", "nonsmooth"]),
        st.integers(1, 32),
    ),
)


@settings(max_examples=60, deadline=None)
@given(configs)
def test_roundtrip(argv):
    cfg = parse_config(argv)
    again = parse_config(cfg.to_argv())
    assert again == cfg
    assert RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))).validate() == cfg


def test_solve_zero_data_writes_zeros(tmp_path, capsys):
    out = tmp_path / "snap.csv"
    assert main(["solve", "--mms", "0", "--N", "8", "--T", "0.1", "--output", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("# artifact=swgalerkin")
    rows = [line for line in text.splitlines() if not line.startswith("#")]
    assert rows[0] == "x,eta,u"
    values = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
    assert not values[:, 1:].any()
    assert "wrote" in capsys.readouterr().out


def test_study_writes_csv_and_plot_data(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "out"))
    assert main("projection-study --r 4 --mesh uniform --N 9,17,33".split()) == 0
    csv = tmp_path / "out" / "projection-study.csv"
    lines = csv.read_text().splitlines()
    config_line = next(line for line in lines if line.startswith("# config="))
    echoed = RunConfig.from_dict(json.loads(config_line[len("# config="):]))
    assert echoed.N == [9, 17, 33]
    header = next(line for line in lines if not line.startswith("#"))
    assert header.startswith("resolution,L2,rate_L2,H1semi")
    assert (tmp_path / "out" / "projection-study.plot.dat").exists()
    assert "H3semi" in capsys.readouterr().out


def test_temporal_study_command(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code = main(["temporal-study", "--mesh", "uniform", "--N", "8", "--M", "20,25", "--M-ref", "100",
                 "--T", "0.5", "--output", str(out)])
    assert code == 0
    text = out.read_text()
    assert "# E_ref_eta=" in text
    assert "resolution,Estar_eta,rate_Estar_eta,Estar_u,rate_Estar_u" in text
    assert "E_ref" in capsys.readouterr().out


def test_divergence_gives_nonzero_exit(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["spatial-study", "--N", "8,16", "--lambda", "2", "--output", str(out)]) == 1
    assert "diverged" in out.read_text()
    assert main(["solve", "--N", "8", "--lambda", "2", "--output", str(tmp_path / "s.csv")]) == 1


def test_io_error_reports_path(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code = main(["projection-study", "--mesh", "uniform", "--N", "9", "--output", str(blocker / "x.csv")])
    assert code == 1
    assert str(blocker) in capsys.readouterr().err


def test_run_returns_status(tmp_path):
    cfg = parse_config(["solve", "--mms", "2", "--mesh", "uniform", "--N", "6", "--M", "20",
                        "--output", str(tmp_path / "s.csv")])
    assert run(cfg) == 0
