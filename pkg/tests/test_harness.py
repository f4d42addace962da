import json
from dataclasses import replace

import numpy as np
import pytest

from noma_lab.cli import EXIT_CONFIG, EXIT_OK, EXIT_ORACLE, EXIT_RUNTIME, main
from noma_lab.harness import oracle as oracle_mod
from noma_lab.harness.bench import run_bench
from noma_lab.harness.config import ConfigError, ScenarioConfig, dump_config, load_config, parse_items
from noma_lab.harness.figures import DEFAULT_TRIALS, FIGURES, PRESET_BASE, run_figures
from noma_lab.harness.oracle import OracleSizeError, OracleInstance, check_size, run_oracle
from noma_lab.harness.sweep import (
    FIELDS,
    aggregate,
    hash64,
    mean_se,
    read_rows,
    rows_to_csv,
    run_sweep,
    trial_seed,
    worker_count,
)

SMALL = dict(
    n_users=(12,),
    n_rf_chains=(3,),
    algorithm=("near_far", "corr_pair", "random", "cia", "kuc"),
    n_scatter_clusters=1,
    angular_spread_deg=0.001,
    n_hotspots=3,
    path_gain_db=60.0,
    trials=3,
)


def small(**kw):
    return ScenarioConfig(**dict(SMALL, **kw))


# configuration -------------------------------------------------------------


def test_defaults():
    c = ScenarioConfig()
    assert c.n_users == (150,) and c.n_rf_chains == (5,)
    assert c.gamma == 10.0 and c.p_max_w == 1.0 and c.bandwidth_hz == 200e3


def test_file_parsing_and_precedence(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text(
        "# comment\nn_users = 50, 100\nalgorithm = cia,kuc   # trailing\n"
        "p_max_w = 2\ngwo.pop_size = 7\n",
        encoding="utf-8",
    )
    c = load_config(path)
    assert c.n_users == (50, 100) and c.algorithm == ("cia", "kuc") and c.p_max_w == 2.0
    assert c.estimator_params("gwo") == {"pop_size": 7}
    c = load_config(path, [("p_max_w", "3"), ("n-users", "80")])
    assert c.p_max_w == 3.0 and c.n_users == (80,)
    assert load_config(path, base=small()).n_hotspots == 3


def test_dump_round_trip():
    c = small(gamma_th_db=(10.0,), algorithm_params={"kuc.max_iter": 5})
    items = [tuple(line.split(" = ", 1)) for line in dump_config(c).splitlines()]
    assert parse_items(items) == c


@pytest.mark.parametrize(
    "items,key",
    [
        ([("n_users", "100,50")], "n_users"),
        ([("p_max_w", "0")], "p_max_w"),
        ([("trials", "0")], "trials"),
        ([("algorithm", "magic")], "algorithm"),
        ([("bogus", "1")], "bogus"),
        ([("noise_power_w", "abc")], "noise_power_w"),
        ([("gwo.pop_size", "2")], "gwo.pop_size"),
        ([("gwo.colour", "2")], "gwo.colour"),
        ([("gamma_th_db", "1,2,3")], "gamma_th_db"),
        ([("array_geometry", "ring")], "array_geometry"),
    ],
)
def test_config_errors_name_the_key(items, key):
    with pytest.raises(ConfigError) as info:
        parse_items(items)
    assert info.value.key == key
    assert key in str(info.value)


def test_malformed_line(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("n_users 100\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")


# seeding -------------------------------------------------------------------


def test_hash64_is_stable_and_mixing():
    assert hash64(1, 2, 3) == hash64(1, 2, 3)
    assert hash64(1, 2, 3) != hash64(1, 3, 2)
    assert 0 <= hash64(0) < 2**64
    seeds = {trial_seed(7, n, 5, t) for n in (50, 100) for t in range(100)}
    assert len(seeds) == 200


def test_trial_seed_independent_of_sweep_order():
    a = run_sweep(small(n_users=(8, 12), trials=2, algorithm=("cia",)))
    b = run_sweep(small(n_users=(12,), trials=2, algorithm=("cia",)))
    pick = [r for r in a.rows if r.n_users == 12]
    assert [r.seed for r in pick] == [r.seed for r in b.rows]
    assert [r.served_users for r in pick] == [r.served_users for r in b.rows]


# sweep, CSV and aggregates ---------------------------------------------------


def test_sweep_rows_and_csv_format():
    res = run_sweep(small())
    assert len(res.rows) == 3 * 5
    text = res.raw_csv()
    assert text.splitlines()[0] == ",".join(FIELDS)
    assert "\r" not in text and text.endswith("\n")
    assert read_rows(text) == res.rows
    for r in res.rows:
        assert r.runtime_ms == 0.0
        assert r.total_power_w <= 1.0
        assert np.isfinite([r.total_power_w, r.sum_rate_bps, r.energy_efficiency_bpj]).all()


def test_record_runtime():
    res = run_sweep(small(record_runtime=True, trials=1, algorithm=("cia",)))
    assert res.rows[0].runtime_ms > 0


def test_aggregates_recompute_from_raw_rows():
    res = run_sweep(small(n_users=(9, 12)))
    summary = aggregate(read_rows(res.raw_csv()))
    assert len(summary) == 2 * 5
    for rec in summary:
        rows = [r for r in res.rows if (r.algorithm, r.n_users) == (rec["algorithm"], rec["n_users"])]
        x = np.array([r.served_users for r in rows], dtype=float)
        assert rec["served_users_mean"] == pytest.approx(x.mean(), abs=1e-9)
        assert rec["served_users_se"] == pytest.approx(x.std(ddof=1) / np.sqrt(x.size), abs=1e-9)


def test_mean_se_single_value():
    assert mean_se([4.0]) == (4.0, 0.0)


def test_sweep_three_points_gives_three_aggregates():
    c = small(n_users=(6, 9, 12), trials=1, algorithm=("cia",))
    assert len(run_sweep(c).summary()) == 3


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("NOMA_LAB_THREADS", "2")
    assert worker_count(10) == 2 and worker_count(1) == 1
    monkeypatch.setenv("NOMA_LAB_THREADS", "many")
    with pytest.raises(ValueError):
        worker_count(3)


def test_parallel_matches_serial(monkeypatch):
    c = small(trials=2, algorithm=("cia", "random"))
    monkeypatch.setenv("NOMA_LAB_THREADS", "1")
    serial = run_sweep(c).raw_csv()
    monkeypatch.setenv("NOMA_LAB_THREADS", "2")
    assert run_sweep(c).raw_csv() == serial


def test_rows_revalidate_from_logged_seed():
    from noma_lab.harness.sweep import channels_for, make_estimator

    c = small(trials=2)
    for r in run_sweep(c).rows:
        H = channels_for(c, r.n_users, r.n_clusters, r.seed).H
        est = make_estimator(c, r.algorithm, r.n_clusters, r.seed).fit(H)
        assert est.n_served_ == r.served_users
        assert r.total_power_w == (est.solution_.total if r.served_users else 0.0)
        served = est.solution_.served
        assert np.all(est.solution_.achieved_sinr[served] >= 10.0 - 1e-9)


# oracle --------------------------------------------------------------------


def test_oracle_passes():
    report = run_oracle(200, seed=1)
    assert report.passed
    assert report.lines()[-1] == "PASS"


def test_oracle_representatives_only_is_exact():
    rng = np.random.default_rng(0)
    for _ in range(50):
        inst = oracle_mod.random_instance(rng, representatives_only=True)
        assert oracle_mod.relative_deviation(
            oracle_mod.closed_form_total(inst), oracle_mod.fixed_point_total(inst)
        ) <= 1e-12


def test_oracle_infeasible_instance_agrees():
    from noma_lab.power import SinrModel

    model = SinrModel(gamma_th=np.full(4, 10.0), sigma2=0.01, c=np.array([1, 0.05, 1, 0.05]), g=np.ones(4))
    inst = OracleInstance(clusters=((0, 1), (2, 3)), model=model)
    assert np.isinf(oracle_mod.closed_form_total(inst))
    assert np.isinf(oracle_mod.fixed_point_total(inst))


def test_oracle_size_limits():
    from noma_lab.power import SinrModel

    model = SinrModel(gamma_th=np.full(8, 10.0), sigma2=0.01, c=np.ones(8), g=np.ones(8))
    with pytest.raises(OracleSizeError):
        check_size(OracleInstance(clusters=((0, 1), (2, 3), (4, 5), (6, 7)), model=model))


# bench and figures -----------------------------------------------------------


def test_bench_rows():
    rows = run_bench(small(algorithm=("cia", "kuc")))
    assert [r.algorithm for r in rows] == ["cia", "kuc"]
    assert all(r.reps == 5 and r.min_ms <= r.median_ms <= r.max_ms for r in rows)
    with pytest.raises(ValueError):
        run_bench(small(), reps=3)


def test_figures_outputs(tmp_path):
    base = replace(PRESET_BASE, algorithm=("near_far",))
    run_figures(tmp_path, trials=1, base=base)
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["trials"] == 1 and sorted(meta["figures"]) == sorted(FIGURES)
    for name in FIGURES:
        assert (tmp_path / f"{name}.svg").read_text().startswith("<svg")
        assert (tmp_path / f"{name}.txt").stat().st_size > 0
    assert DEFAULT_TRIALS == 50


# command line ---------------------------------------------------------------


@pytest.fixture
def cfg(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(dump_config(small(trials=2)), encoding="utf-8")
    return path


def test_cli_run_writes_csv_and_sidecars(cfg, tmp_path):
    out = tmp_path / "out.csv"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    assert out.read_bytes().startswith(b"algorithm,")
    assert (tmp_path / "out_summary.csv").exists() and (tmp_path / "out_timing.csv").exists()


def test_cli_run_is_byte_identical(cfg, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["run", "--config", str(cfg), "--out", str(a)])
    main(["run", "--config", str(cfg), "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_cli_override_beats_file(cfg, tmp_path, capsys):
    assert main(["run", "--config", str(cfg), "--trials", "1", "--algorithm=cia"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2 and lines[1].startswith("cia,")


def test_cli_config_errors(cfg, tmp_path):
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG
    assert main(["run", "--config", str(cfg), "--p_max_w", "-1"]) == EXIT_CONFIG
    assert main(["run", "--config", str(cfg), "--nonsense", "1"]) == EXIT_CONFIG
    assert main(["run", "--config", str(cfg), "--trials"]) == EXIT_CONFIG
    with pytest.raises(SystemExit) as info:
        main(["run"])
    assert info.value.code == EXIT_CONFIG


def test_cli_threads_env_error(cfg, monkeypatch):
    monkeypatch.setenv("NOMA_LAB_THREADS", "zero")
    assert main(["run", "--config", str(cfg)]) == EXIT_CONFIG


def test_cli_oracle(capsys):
    assert main(["oracle", "--instances", "50"]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out


def test_cli_oracle_deviation_exit(monkeypatch):
    failing = oracle_mod.OracleReport(10, 1.0, 0.0, 0, 3)
    monkeypatch.setattr("noma_lab.cli.run_oracle", lambda n, s: failing)
    assert main(["oracle", "--instances", "10"]) == EXIT_ORACLE


def test_cli_runtime_failure(cfg, monkeypatch):
    def boom(config, progress=None):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr("noma_lab.cli.run_sweep", boom)
    assert main(["run", "--config", str(cfg)]) == EXIT_RUNTIME


def test_cli_bench(cfg, capsys):
    assert main(["bench", "--config", str(cfg), "--algorithm", "cia"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("algorithm,n_users,n_clusters,reps,median_ms")
