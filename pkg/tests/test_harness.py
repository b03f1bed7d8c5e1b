import json
import math

import numpy as np
import pytest

import openspin as osp
from openspin import cli
from openspin.config import initial_state_vector, parse_config, parse_observable
from openspin.errors import ConfigError
from openspin.runner import compare_methods, run_experiment, sweep_dt
from openspin.series import TimeSeries

MINIMAL = """\
[model]
kind = "xy_chain"
n = 2
gamma = 0.1

[evolution]
dt = 0.05
T = 1.0

[initial_state]
kind = "staggered"

[output]
observables = ["correlation(0,1)"]
"""

FULL = """\
[model]
kind = "heisenberg_disordered"
n = 4
J = -1.0
gamma = 0.1
h = 10.0
disorder_seed = 0

[evolution]
dt = 0.05
T = 2.0

[strategy]
kind = "adjoint_direct"
truncation_eps = 1e-10

[initial_state]
kind = "staggered"

[output]
observables = ["imbalance", "entropy(0,1)", "pauli(ZIII)"]
reference = false
"""


def write(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_minimal_config_defaults(tmp_path):
    cfg = parse_config(write(tmp_path, MINIMAL))
    assert cfg.model_kind == "xy_chain" and cfg.n == 2
    assert cfg.J == -1.0
    assert cfg.strategy.kind == "reconstructed"
    assert cfg.strategy.truncation_eps == 1e-12
    assert cfg.sampler_kind == "exact_channel"
    assert cfg.reference is False
    assert cfg.steps == 20
    assert cfg.observables[0].label == "Z0Z1"


def test_full_config(tmp_path):
    cfg = parse_config(write(tmp_path, FULL))
    assert cfg.model_kind == "heisenberg_disordered"
    assert cfg.h == 10.0 and cfg.disorder_seed == 0
    assert cfg.strategy.kind == "adjoint_direct"
    assert cfg.strategy.truncation_eps == 1e-10
    assert [o.label for o in cfg.observables] == ["imbalance", "entropy_0-1", "ZIII"]


def test_missing_file():
    with pytest.raises(ConfigError):
        parse_config("/nonexistent/path.toml")


@pytest.mark.parametrize("mangle", [
    lambda s: s.replace("gamma = 0.1", "gamma = 0.1\nrate = 3"),  # unknown key
    lambda s: s + "\n[extras]\nfoo = 1\n",                        # unknown section
    lambda s: s.replace("[initial_state]\nkind = \"staggered\"\n\n", ""),
    lambda s: s.replace("n = 2", "n = true"),                     # bool is not an int
    lambda s: s.replace("T = 1.0", "T = 1.02"),                   # not a whole step count
    lambda s: s.replace("n = 2", "n = 3"),                        # staggered needs even n
    lambda s: s.replace("gamma = 0.1", "gamma = -0.2"),
    lambda s: s.replace("gamma = 0.1", "gamma = 0.1\nh = 5.0"),   # h is heisenberg-only
    lambda s: s.replace('observables = ["correlation(0,1)"]', "observables = []"),
    lambda s: s.replace("correlation(0,1)", "correlation(0,7)"),  # site out of range
    lambda s: s.replace("correlation(0,1)", "bogus(1)"),
    lambda s: s.replace('reference = false', 'reference = 1') if "reference" in s
    else s + "reference = 1\n",                                   # int is not a bool
])
def test_rejected_configs(tmp_path, mangle):
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, mangle(MINIMAL)))


def test_grid_shape_consistency(tmp_path):
    text = MINIMAL.replace('kind = "xy_chain"\nn = 2', 'kind = "xy_grid"\nrows = 2\ncols = 2')
    cfg = parse_config(write(tmp_path, text.replace("correlation(0,1)", "correlation(0,3)")))
    assert cfg.n == 4 and cfg.rows == 2 and cfg.cols == 2
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, text + "\n[model]\n", name="dup.toml"))
    bad = text.replace("rows = 2", "rows = 2\nn = 5")
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, bad, name="bad.toml"))


def test_sampler_section(tmp_path):
    text = MINIMAL + "\n[sampler]\nkind = \"trajectories\"\nM = 100\nseed = 1\n"
    cfg = parse_config(write(tmp_path, text))
    assert cfg.sampler_kind == "trajectories" and cfg.M == 100 and cfg.sampler_seed == 1
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, text.replace("M = 100", "M = 0"), name="m0.toml"))
    # M/seed are trajectory-only
    with pytest.raises(ConfigError):
        parse_config(write(
            tmp_path, MINIMAL + "\n[sampler]\nkind = \"exact_channel\"\nM = 10\n",
            name="mx.toml"))
    # entropy cannot be sampled from trajectories
    with pytest.raises(ConfigError):
        parse_config(write(
            tmp_path, text.replace("correlation(0,1)", "entropy(all)"), name="ent.toml"))


def test_initial_state_kinds(tmp_path):
    text = MINIMAL.replace('kind = "staggered"', 'kind = "computational"\nbitstring = "10"')
    cfg = parse_config(write(tmp_path, text))
    psi = initial_state_vector(cfg)
    assert psi[int("10", 2)] == 1.0 and np.count_nonzero(psi) == 1
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, text.replace('"10"', '"101"'), name="len.toml"))
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, text.replace('"10"', '"1x"'), name="alpha.toml"))
    rnd = MINIMAL.replace('kind = "staggered"', 'kind = "random_product"\nseed = 5')
    cfg = parse_config(write(tmp_path, rnd, name="rnd.toml"))
    psi = initial_state_vector(cfg)
    assert np.isclose(np.linalg.norm(psi), 1.0, atol=1e-12)
    assert np.array_equal(psi, initial_state_vector(cfg))  # seed-deterministic
    stag_seed = MINIMAL.replace('kind = "staggered"', 'kind = "staggered"\nseed = 5')
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, stag_seed, name="seedx.toml"))


def test_parse_observable_forms():
    assert parse_observable("correlation(0,1)").label == "Z0Z1"
    assert parse_observable("entropy(all)").label == "entropy"
    assert parse_observable("entropy").label == "entropy"
    assert parse_observable("entropy(0,1)").label == "entropy_0-1"
    assert parse_observable("imbalance").label == "imbalance"
    assert parse_observable("pauli(XY)").label == "XY"
    for bad in ("correlation(0)", "entropy(x)", "pauli()", "imbalance(3)", "bogus", ""):
        with pytest.raises(ConfigError):
            parse_observable(bad)


def test_full_scale_configs_parse(tmp_path):
    chain10 = MINIMAL.replace("n = 2", "n = 10").replace(
        "correlation(0,1)", "correlation(0,9)")
    cfg = parse_config(write(tmp_path, chain10))
    assert cfg.n == 10
    mbl = FULL.replace("n = 4", "n = 8").replace("T = 2.0", "T = 1000.0").replace(
        "ZIII", "Z" + "I" * 7)
    cfg = parse_config(write(tmp_path, mbl, name="mbl.toml"))
    assert cfg.n == 8 and cfg.steps == 20000


def test_csv_round_trip_byte_identical(tmp_path):
    series = TimeSeries()
    series.add(0.0, "Z0Z1", 1 / 3, "reconstructed")
    series.add(0.05, "Z0Z1", -0.1234567890123456789, "reconstructed")
    series.add(0.0, "ZI", 0.5, "sampled", stderr=0.01)
    series.add(0.05, "ZI", 0.25, "sampled", stderr=1e-300)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    series.to_csv(p1)
    TimeSeries.from_csv(p1).to_csv(p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_run_reproducible_and_metadata_echo(tmp_path):
    text = MINIMAL + "\n[sampler]\nkind = \"trajectories\"\nM = 60\nseed = 9\n"
    cfg = parse_config(write(tmp_path, text))
    run_experiment(cfg, tmp_path / "r1")
    run_experiment(cfg, tmp_path / "r2")
    assert (tmp_path / "r1/results.csv").read_bytes() == (tmp_path / "r2/results.csv").read_bytes()
    md = json.loads((tmp_path / "r1/metadata.json").read_text())
    assert md["config"] == cfg.raw
    assert md["derived"]["steps"] == cfg.steps
    assert md["numeric_policy"]["max_qubits"] == 14


def test_run_difference_rows(tmp_path):
    text = MINIMAL.replace("observables = ", 'reference = true\nobservables = ')
    cfg = parse_config(write(tmp_path, text))
    series = run_experiment(cfg, tmp_path / "out")
    assert set(series.methods()) == {"reconstructed", "reference", "difference"}
    t_p, v_p, _ = series.column("Z0Z1", "reconstructed")
    t_r, v_r, _ = series.column("Z0Z1", "reference")
    t_d, v_d, _ = series.column("Z0Z1", "difference")
    assert np.array_equal(t_d, t_p) and np.array_equal(t_p, t_r)
    assert np.allclose(v_d, v_p - v_r, atol=1e-15)
    assert np.max(np.abs(v_d)) < cfg.T * cfg.dt  # stays under the T*dt bound


def test_trajectory_run_rows(tmp_path):
    text = MINIMAL + "\n[sampler]\nkind = \"trajectories\"\nM = 40\nseed = 2\n"
    cfg = parse_config(write(tmp_path, text))
    series = run_experiment(cfg, tmp_path / "out")
    _, _, e_s = series.column("Z0Z1", "sampled")
    _, _, e_r = series.column("Z0Z1", "reconstructed")
    assert not np.isnan(e_s).any()     # sampled rows carry a standard error
    assert np.isnan(e_r).all()         # reconstruction of samples does not
    csv_text = (tmp_path / "out/results.csv").read_text()
    assert csv_text.splitlines()[0] == "t,observable,value,stderr,method"


def test_compare_methods_unitary_limit(tmp_path):
    # gamma = 0: reconstruction, direct channel, and the oracle all coincide
    text = MINIMAL.replace("gamma = 0.1", "gamma = 0.0").replace(
        "observables = ", 'reference = true\nobservables = ')
    cfg = parse_config(write(tmp_path, text))
    summary = compare_methods(cfg, tmp_path / "cmp")
    devs = summary["observables"]["Z0Z1"]
    assert devs["max_abs_dev_reconstructed"] < 1e-8
    assert devs["max_abs_dev_adjoint_direct"] < 1e-8
    assert devs["final_gap_reconstructed_vs_direct"] < 1e-12
    assert summary["trace_distance_final_reconstructed_vs_reference"] < 1e-8
    assert (tmp_path / "cmp/defect_trace.csv").exists()
    assert (tmp_path / "cmp/compare_summary.json").exists()


def test_sweep_dt_threads_agree(tmp_path):
    text = MINIMAL.replace("observables = ", 'reference = true\nobservables = ')
    cfg = parse_config(write(tmp_path, text))
    t1 = sweep_dt(cfg, [0.1, 0.05], tmp_path / "s1", threads=1)
    t2 = sweep_dt(cfg, [0.1, 0.05], tmp_path / "s2", threads=2)
    assert (tmp_path / "s1/sweep.csv").read_bytes() == (tmp_path / "s2/sweep.csv").read_bytes()
    assert [r["max_abs_error"] for r in t1] == [r["max_abs_error"] for r in t2]
    md = json.loads((tmp_path / "s1/metadata.json").read_text())
    assert md["results"]["all_errors_under_bound"] is True
    with pytest.raises(ConfigError):
        sweep_dt(cfg, [0.3], tmp_path / "s3")  # T=1 is not a multiple of 0.3


def test_cli_run_and_validate(tmp_path, capsys):
    path = write(tmp_path, MINIMAL)
    assert cli.main(["validate", str(path)]) == 0
    assert "valid" in capsys.readouterr().out
    assert cli.main(["run", str(path), "--output", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out/results.csv").exists()
    assert (tmp_path / "out/metadata.json").exists()


def test_cli_output_root_env(tmp_path, monkeypatch):
    path = write(tmp_path, MINIMAL, name="envrun.toml")
    monkeypatch.setenv("OPENSPIN_OUTPUT_ROOT", str(tmp_path / "root"))
    assert cli.main(["run", str(path)]) == 0
    assert (tmp_path / "root/envrun/results.csv").exists()


def test_cli_sweep_and_compare(tmp_path):
    text = MINIMAL.replace("observables = ", 'reference = true\nobservables = ')
    path = write(tmp_path, text)
    assert cli.main(["sweep-dt", str(path), "--dts", "0.1,0.05",
                     "--output", str(tmp_path / "sw"), "--threads", "2"]) == 0
    assert (tmp_path / "sw/sweep.csv").exists()
    assert cli.main(["compare", str(path), "--output", str(tmp_path / "cmp")]) == 0
    assert (tmp_path / "cmp/compare_summary.json").exists()


def test_cli_exit_codes(tmp_path, capsys):
    # 2: configuration problems (bad key, absent file, malformed --dts)
    bad = write(tmp_path, MINIMAL + "\njunk = 1\n", name="bad.toml")
    assert cli.main(["run", str(bad)]) == 2
    assert cli.main(["run", str(tmp_path / "missing.toml")]) == 2
    ok = write(tmp_path, MINIMAL.replace("observables = ", 'reference = true\nobservables = '))
    assert cli.main(["sweep-dt", str(ok), "--dts", "abc",
                     "--output", str(tmp_path / "x")]) == 2
    capsys.readouterr()

    # 3: numeric failure, the reconstruction scale factor overflows a float
    blow = MINIMAL.replace("gamma = 0.1", "gamma = 1.0").replace(
        "dt = 0.05", "dt = 0.3").replace("T = 1.0", "T = 480.0")
    path3 = write(tmp_path, blow, name="overflow.toml")
    assert cli.main(["run", str(path3), "--output", str(tmp_path / "o3")]) == 3
    assert "numeric failure" in capsys.readouterr().err

    # 4: resource guard, n above the dense-representation cap
    big = MINIMAL.replace("n = 2", "n = 16").replace(
        "correlation(0,1)", "correlation(0,15)")
    path4 = write(tmp_path, big, name="big.toml")
    assert cli.main(["run", str(path4), "--output", str(tmp_path / "o4")]) == 4
    assert "resource guard" in capsys.readouterr().err
