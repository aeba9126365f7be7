import os

import pytest

from nnha import ConfigError
from nnha.cli import main as cli_main
from nnha.harness import (
    ExperimentConfig,
    ResultTable,
    emit_outputs,
    parse_config,
    run_experiment,
)


# --- config ------------------------------------------------------------------


def test_parse_config_values_and_comments(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text(
        "# comment\nexperiment = kcut\nseed = 3\nshots = 50\n"
        "graph.dropout = 0.3\nquench.times = 0.5, 1.0\nflag = true\nname = run-a\n"
    )
    values = parse_config(path)
    assert values["experiment"] == "kcut"
    assert values["seed"] == 3
    assert values["graph.dropout"] == 0.3
    assert values["quench.times"] == [0.5, 1.0]
    assert values["flag"] is True
    assert values["name"] == "run-a"


def test_parse_config_malformed_line(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("experiment kcut\n")
    with pytest.raises(ConfigError):
        parse_config(path)


def test_experiment_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig({"experiment": "bogus", "seed": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig({"experiment": "kcut"})
    with pytest.raises(ConfigError):
        ExperimentConfig({"experiment": "kcut", "seed": 1, "graph.file": "/nope"})


def test_config_hash_ignores_runtime_keys():
    a = ExperimentConfig({"experiment": "kcut", "seed": 1, "out": "/tmp/a"})
    b = ExperimentConfig({"experiment": "kcut", "seed": 1, "out": "/tmp/b"})
    assert a.config_hash() == b.config_hash()
    c = ExperimentConfig({"experiment": "kcut", "seed": 2})
    assert a.config_hash() != c.config_hash()


# --- tables and outputs --------------------------------------------------------


def test_result_table_roundtrip():
    t = ResultTable(["a", "b"])
    t.add(1, 0.5)
    t.add(2, None)
    assert t.to_csv() == "a,b\n1,0.5\n2,\n"
    assert t.select(a=2) == [(2, None)]
    with pytest.raises(ConfigError):
        t.add(1)


def test_emit_outputs_header_only_and_extras(tmp_path):
    t = ResultTable(["x", "y"])
    t.extras["histogram"] = ResultTable(["bin", "count"])
    written = emit_outputs(t, tmp_path / "out")
    assert open(written["results.csv"]).read() == "x,y\n"
    assert os.path.exists(written["histogram.csv"])


def test_emit_outputs_rerun_byte_identical(tmp_path):
    cfg = {
        "experiment": "mis-greedy", "seed": 7, "shots": 10,
        "graph.count": 1, "graph.rows": 3, "graph.cols": 3,
        "graph.dropout": 0.2, "protocol.t_max": 0.5,
    }
    outputs = []
    for name in ("a", "b"):
        config = ExperimentConfig(cfg)
        table = run_experiment(config)
        written = emit_outputs(table, tmp_path / name, config)
        outputs.append({k: open(p).read() for k, p in written.items()})
    assert outputs[0] == outputs[1]


# --- runners --------------------------------------------------------------------


def _mini_maxcut_config(**extra):
    base = {
        "experiment": "maxcut-ensemble", "seed": 19, "shots": 25,
        "graph.count": 3, "graph.n": 10, "graph.nu": 3,
        "qaoa.p_values": [1], "angles.train_graphs": 2,
        "angles.iters": 30, "angles.starts": 2,
    }
    base.update(extra)
    return ExperimentConfig(base)


def test_maxcut_ensemble_structure_and_dominance():
    table = run_experiment(_mini_maxcut_config())
    assert len(table.select(method="classical-limit")) == 3
    for idx in range(3):
        raw = table.select(instance=idx, method="raw-qaoa", p=1)[0]
        hybrid = table.select(instance=idx, method="hybrid", p=1)[0]
        mean_col = table.columns.index("mean")
        assert hybrid[mean_col] >= raw[mean_col]
        ratio = hybrid[table.columns.index("ratio")]
        assert 0.0 <= ratio <= 1.0


def test_maxcut_p0_hybrid_identical_to_classical():
    table = run_experiment(_mini_maxcut_config())
    for idx in range(3):
        classical = table.select(instance=idx, method="classical-limit", p=0)
        hybrid0 = table.select(instance=idx, method="hybrid", p=0)
        assert classical[0][3:] == hybrid0[0][3:]


def test_maxcut_over_brute_force_cap_omits_ratio(tmp_path):
    table_path = tmp_path / "angles.txt"
    table_path.write_text("3 1 0.6 0.4\n")
    config = _mini_maxcut_config(**{"graph.count": 1, "graph.n": 22, "shots": 5,
                                    "angles.mode": "table",
                                    "angles.table": str(table_path)})
    with pytest.warns(UserWarning, match="brute-force cap"):
        table = run_experiment(config)
    ratio_col = table.columns.index("ratio")
    assert all(row[ratio_col] is None for row in table.rows)


def test_maxcut_ensemble_threads_match_serial():
    serial = run_experiment(_mini_maxcut_config())
    threaded = run_experiment(_mini_maxcut_config(threads=3))
    assert serial.rows == threaded.rows


def test_kcut_runner_histogram_counts():
    config = ExperimentConfig({
        "experiment": "kcut", "seed": 5, "shots": 40,
        "graph.count": 2, "graph.rows": 3, "graph.cols": 3,
        "graph.dropout": 0.25, "repeats": 5,
        "quench.times": [0.3, 0.6], "quench.deltas": [4.0, 9.0],
        "lambdas": [1.0, 1.0],
    })
    table = run_experiment(config)
    samples = table.extras["samples"]
    hist = table.extras["histogram"]
    for method in ("hybrid", "classical-limit"):
        rows = samples.select(method=method)
        assert len(rows) == 2 * 5  # instances x repeats
        counts = [r[2] for r in hist.select(method=method)]
        assert sum(counts) == 2 * 5
    for ratio in table.column("ratio"):
        if ratio is not None:
            assert 0.0 <= ratio <= 1.0


def test_kcut_t0_hybrid_statistically_equal_to_classical():
    # zero-time quenches: the hybrid pipeline degenerates to the classical
    # limit, so the two post-processed cut samples share a distribution
    from scipy.stats import mannwhitneyu

    config = ExperimentConfig({
        "experiment": "kcut", "seed": 21, "shots": 30,
        "graph.count": 2, "graph.rows": 3, "graph.cols": 3,
        "graph.dropout": 0.25, "repeats": 40,
        "quench.times": [0.0, 0.0, 0.0], "quench.deltas": [4.0, 9.0, 13.0],
        "lambdas": [1.0, 1.0, 1.0],
    })
    table = run_experiment(config)
    samples = table.extras["samples"]
    hybrid = [r[4] for r in samples.select(method="hybrid")]
    classical = [r[4] for r in samples.select(method="classical-limit")]
    _, pvalue = mannwhitneyu(hybrid, classical)
    assert pvalue > 0.01


def test_mis_greedy_summary_consistency():
    config = ExperimentConfig({
        "experiment": "mis-greedy", "seed": 9, "shots": 20,
        "graph.count": 2, "graph.rows": 3, "graph.cols": 3,
        "graph.dropout": 0.2, "protocol.t_max": 0.5,
    })
    table = run_experiment(config)
    summary = table.extras["summary"]
    for row in summary.rows:
        idx, n, opt, h_mean, c_mean, ratio, eob = row
        assert ratio == pytest.approx(h_mean / c_mean)
        assert 0.0 <= eob <= 1.0
        hybrid_row = table.select(instance=idx, method="hybrid")[0]
        assert hybrid_row[3] == pytest.approx(h_mean)
        assert hybrid_row[3] <= opt  # mean MIS size below the optimum


def test_mis_cluster_trajectories_emitted():
    config = ExperimentConfig({
        "experiment": "mis-cluster", "seed": 9, "shots": 20,
        "graph.count": 1, "graph.rows": 3, "graph.cols": 3,
        "graph.dropout": 0.2, "protocol.t_max": 0.5,
        "epochs": 2, "runs": 1, "reservoir.shots": 16,
    })
    table = run_experiment(config)
    traj = table.extras["trajectories"]
    n = table.extras["summary"].rows[0][1]
    assert len(traj.select(method="hybrid")) == 2 * n
    objectives = [r[-1] for r in traj.select(method="hybrid")]
    assert all(b >= a for a, b in zip(objectives, objectives[1:]))  # beta = inf


def test_mis_greedy_from_shot_file(tmp_path):
    # hardware-ingestion seam: reservoir shots come from a file
    from nnha import save_shots, uniform_sample

    shots = uniform_sample(9, 25, seed=3)
    shot_path = tmp_path / "hw.shots"
    save_shots(shots, shot_path)
    config = ExperimentConfig({
        "experiment": "mis-greedy", "seed": 9, "shots": 25,
        "graph.count": 1, "graph.rows": 3, "graph.cols": 3,
        "graph.dropout": 0.0, "graph.jitter": 0.0,
        "sampler.kind": f"file:{shot_path}",
    })
    table = run_experiment(config)
    assert len(table.select(method="hybrid")) == 1
    with pytest.raises(ConfigError):
        ExperimentConfig({"experiment": "mis-greedy", "seed": 1,
                          "sampler.kind": "file:/does/not/exist"})


def test_run_optimize_history():
    config = ExperimentConfig({
        "experiment": "optimize", "seed": 4, "shots": 20,
        "optimize.target": "maxcut", "graph.n": 8, "qaoa.p": 1,
        "optimize.iters": 12,
    })
    table = run_experiment(config)
    assert len(table) <= 12
    best = table.extras["best"]
    assert best.rows[0][3] <= 12  # evaluations within budget
    total_shots = best.rows[0][4]
    assert total_shots == best.rows[0][3] * 20


# --- CLI ------------------------------------------------------------------------


def test_cli_runs_and_writes(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "experiment = mis-greedy\nseed = 7\nshots = 10\ngraph.count = 1\n"
        "graph.rows = 3\ngraph.cols = 3\ngraph.dropout = 0.2\n"
        "protocol.t_max = 0.5\n"
    )
    code = cli_main(["mis-greedy", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 0
    assert os.path.exists(tmp_path / "o" / "results.csv")


def test_cli_stdout_without_out(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "experiment = mis-greedy\nseed = 7\nshots = 5\ngraph.count = 1\n"
        "graph.rows = 3\ngraph.cols = 3\ngraph.dropout = 0.2\n"
        "protocol.t_max = 0.5\n"
    )
    assert cli_main(["mis-greedy", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("instance,method")


def test_cli_config_error_exit_codes(tmp_path, capsys):
    assert cli_main(["kcut", "--config", str(tmp_path / "missing.cfg")]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("experiment = kcut\n")  # no seed
    assert cli_main(["kcut", "--config", str(bad)]) == 2
