"""Experiment orchestration: configs, runners, result tables, persistence.

Runs the benchmark experiments at desk scale: the MaxCut ensemble comparison
(raw QAOA vs hybrid vs classical limit), the spectral k-cut pipeline with its
classical limit, and the two MIS modes (greedy repair and cluster simulated
annealing).  Every experiment is reproducible bit-for-bit from its config and
master seed; instance-level parallelism uses independent seed substreams so
execution order cannot change results.
"""

import hashlib
import os
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__ as _version
from .cluster_anneal import AnnealRun, Reservoir, run_cluster_sa
from .errors import ConfigError, ResourceError
from .graphs import Coloring, cut_value, kings_subgraph, load_graph, random_regular, unit_disk_edges
from .oracles import brute_force_kcut, brute_force_maxcut, brute_force_mis
from .postprocess import greedy_flip, mis_repair
from .rng import as_rng, spawn_seeds
from .samplers import (
    AnnealProtocol,
    QuenchParams,
    RydbergModel,
    cut_diagonal,
    load_shots,
    qaoa_sample,
    qaoa_state,
    uniform_sample,
)
from .spectral import SpectralParams, classical_limit_kcut, kcut_pipeline
from .varopt import (
    SearchBox,
    dfo_maximize,
    maxcut_objective,
    nested_optimize_spectral,
    optimize_angle_schedule,
    qaoa_angle_setup,
)

EXPERIMENTS = ("maxcut-ensemble", "kcut", "mis-greedy", "mis-cluster", "optimize")


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def _parse_value(text):
    text = text.strip()
    if "," in text:
        return [_parse_value(part) for part in text.split(",") if part.strip()]
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_config(path):
    """Parse the hierarchical `dotted.key = value` text format."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if not key:
                raise ConfigError(f"{path}:{lineno}: empty key")
            values[key] = _parse_value(value)
    return values


class ExperimentConfig:
    """Validated experiment settings with explicit seeds."""

    def __init__(self, values):
        self.values = dict(values)
        experiment = self.values.get("experiment")
        if experiment not in EXPERIMENTS:
            raise ConfigError(
                f"experiment must be one of {EXPERIMENTS}, got {experiment!r}"
            )
        if "seed" not in self.values or not isinstance(self.values["seed"], int):
            raise ConfigError("config must set an integer master 'seed'")
        self.experiment = experiment
        self.seed = int(self.values["seed"])
        self.shots = int(self.values.get("shots", 100))
        self.out_dir = self.values.get("out")
        self.threads = int(self.values.get("threads", 1))
        graph_file = self.values.get("graph.file")
        if graph_file is not None and not os.path.exists(graph_file):
            raise ConfigError(f"graph.file does not exist: {graph_file}")
        shot_file = self.values.get("sampler.file")
        kind = self.values.get("sampler.kind")
        if isinstance(kind, str) and kind.startswith("file:"):
            shot_file = kind[len("file:"):]
        if shot_file is not None and not os.path.exists(shot_file):
            raise ConfigError(f"sampler shot file does not exist: {shot_file}")

    @classmethod
    def from_file(cls, path, overrides=None):
        values = parse_config(path)
        if overrides:
            values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(values)

    def get(self, key, default=None):
        return self.values.get(key, default)

    def get_list(self, key, default):
        value = self.values.get(key, default)
        if not isinstance(value, list):
            value = [value]
        return value

    def canonical_text(self):
        lines = []
        for key in sorted(self.values):
            if key in ("out", "threads"):  # runtime-only, not part of the result
                continue
            value = self.values[key]
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    def config_hash(self):
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


# ---------------------------------------------------------------------------
# Result tables and persistence
# ---------------------------------------------------------------------------


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


class ResultTable:
    """Row-oriented results with deterministic CSV serialization."""

    def __init__(self, columns, rows=None):
        self.columns = list(columns)
        self.rows = [tuple(r) for r in (rows or [])]
        self.extras = {}

    def add(self, *row):
        if len(row) != len(self.columns):
            raise ConfigError(
                f"row has {len(row)} fields for {len(self.columns)} columns"
            )
        self.rows.append(tuple(row))

    def column(self, name):
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def select(self, **conditions):
        out = []
        idxs = {name: self.columns.index(name) for name in conditions}
        for row in self.rows:
            if all(row[idxs[name]] == want for name, want in conditions.items()):
                out.append(row)
        return out

    def to_csv(self):
        lines = [",".join(self.columns)]
        lines.extend(",".join(_fmt(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def __len__(self):
        return len(self.rows)


def emit_outputs(table, out_dir, config=None, extras=None):
    """Write results.csv, run metadata, and per-figure plot-data files.

    Outputs are byte-identical across reruns of the same config and seed
    (stable float formatting, no timestamps).  Returns the written paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = {}

    def write(name, text):
        path = os.path.join(out_dir, name)
        with open(path, "w") as fh:
            fh.write(text)
        written[name] = path

    write("results.csv", table.to_csv())
    merged_extras = dict(table.extras)
    if extras:
        merged_extras.update(extras)
    for name, value in sorted(merged_extras.items()):
        if isinstance(value, ResultTable):
            write(f"{name}.csv", value.to_csv())
        else:
            write(f"{name}.txt", str(value))
    if config is not None:
        meta = [
            f"config_hash = {config.config_hash()}",
            f"seed = {config.seed}",
            f"version = {_version}",
            "",
            config.canonical_text(),
        ]
        write("run_meta.txt", "\n".join(meta))
    return written


def _stats(values):
    arr = np.asarray(values, dtype=float)
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), float(arr.max()), float(arr.min()), std


def _instance_map(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# ---------------------------------------------------------------------------
# MaxCut ensemble (type-1, Fig.-2 style comparison)
# ---------------------------------------------------------------------------

RESULT_COLUMNS = ["instance", "method", "p", "mean", "max", "min", "stddev", "ratio", "shots"]


def _ratio(value, optimum):
    return None if optimum is None else value / optimum


def run_maxcut_ensemble(config):
    """Raw QAOA vs greedy-hybrid vs classical limit on random regular graphs.

    For each graph: the exact QAOA cut expectation, per-shot raw and
    greedy-flipped cut statistics, and the uniform-sampling classical limit
    (identically the hybrid at p = 0, realized through the same substream).
    """
    count = int(config.get("graph.count", 256))
    n = int(config.get("graph.n", 16))
    nu = int(config.get("graph.nu", 3))
    p_values = [int(p) for p in config.get_list("qaoa.p_values", [1, 2, 3, 4])]
    shots = config.shots
    angle_mode = config.get("angles.mode", "optimize")
    train_count = min(int(config.get("angles.train_graphs", 6)), count)

    s_graphs, s_angles, s_inst = spawn_seeds(config.seed, 3)
    graph_seeds = s_graphs.spawn(count)
    graphs = [random_regular(n, nu, seed=s) for s in graph_seeds]

    optima = []
    for g in graphs:
        try:
            optima.append(brute_force_maxcut(g)[0])
        except ResourceError:
            warnings.warn(f"n={g.n} over brute-force cap; ratio column omitted")
            optima.append(None)

    angles = {0: qaoa_angle_setup(graphs[0], 0)}
    if angle_mode == "table":
        for p in p_values:
            angles[p] = qaoa_angle_setup(
                graphs[0], p, mode="table",
                table_path=config.get("angles.table"), nu=nu,
            )
    else:
        train = graphs[:train_count]

        def mean_expectation_of(depth):
            from .samplers import qaoa_expectation
            from .samplers import QaoaParams

            def objective(params):
                qp = QaoaParams(betas=params[depth:], gammas=params[:depth])
                return float(np.mean([qaoa_expectation(g, qp) for g in train]))
            return objective

        schedules = {}
        for p in sorted(p_values):
            schedules[p] = optimize_angle_schedule(
                mean_expectation_of, p, seed=s_angles,
                starts=int(config.get("angles.starts", 3)),
                max_iters=config.get("angles.iters"),
            )
        angles.update(schedules)

    inst_seeds = s_inst.spawn(count)

    def run_instance(item):
        idx, g, opt, seed = item
        s_uniform, s_cflip, s_qaoa = seed.spawn(3)
        rows = []

        classical_shot_set = uniform_sample(g.n, shots, seed=s_uniform)
        flip_rng = as_rng(s_cflip)
        classical_cuts = np.array([
            cut_value(g, greedy_flip(g, Coloring.from_bits(row), flip_rng))
            for row in classical_shot_set.shots
        ], dtype=float)
        mean, mx, mn, sd = _stats(classical_cuts)
        rows.append((idx, "classical-limit", 0, mean, mx, mn, sd, _ratio(mean, opt), shots))
        rows.append((idx, "hybrid", 0, mean, mx, mn, sd, _ratio(mean, opt), shots))

        cutdiag = cut_diagonal(g)
        for p, s_p in zip(p_values, s_qaoa.spawn(len(p_values))):
            s_sample, s_hflip = s_p.spawn(2)
            qp = angles[p]
            psi = qaoa_state(g, qp)
            prob = np.abs(psi) ** 2
            exact = float(prob @ cutdiag)
            exact_sd = float(np.sqrt(max(prob @ (cutdiag.astype(float) ** 2) - exact**2, 0.0)))
            rows.append((idx, "raw-qaoa-exact", p, exact, exact, exact, exact_sd,
                         _ratio(exact, opt), 0))

            shot_set = qaoa_sample(g, qp, shots, seed=s_sample)
            shot_index = (
                shot_set.shots.astype(np.uint32) << np.arange(g.n, dtype=np.uint32)
            ).sum(axis=1)
            raw_cuts = cutdiag[shot_index].astype(float)
            mean, mx, mn, sd = _stats(raw_cuts)
            rows.append((idx, "raw-qaoa", p, mean, mx, mn, sd, _ratio(mean, opt), shots))

            hflip_rng = as_rng(s_hflip)
            hybrid_cuts = np.array([
                cut_value(g, greedy_flip(g, Coloring.from_bits(row), hflip_rng))
                for row in shot_set.shots
            ], dtype=float)
            if np.any(hybrid_cuts < raw_cuts):
                raise AssertionError("greedy_flip violated per-shot dominance")
            mean, mx, mn, sd = _stats(hybrid_cuts)
            rows.append((idx, "hybrid", p, mean, mx, mn, sd, _ratio(mean, opt), shots))
        return rows

    items = list(zip(range(count), graphs, optima, inst_seeds))
    all_rows = _instance_map(run_instance, items, config.threads)

    table = ResultTable(RESULT_COLUMNS)
    for rows in all_rows:
        for row in rows:
            table.add(*row)
    table.extras["summary"] = _ensemble_summary(table)
    table.extras["angles"] = _angles_table(angles)
    return table


def _ensemble_summary(table):
    """Ensemble mean/SEM of the per-graph mean ratios, per (method, p)."""
    summary = ResultTable(["method", "p", "mean_ratio", "sem_ratio", "graphs"])
    pairs = sorted({(row[1], row[2]) for row in table.rows})
    for method, p in pairs:
        ratios = [row[7] for row in table.select(method=method, p=p) if row[7] is not None]
        if not ratios:
            continue
        arr = np.asarray(ratios, dtype=float)
        sem = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
        summary.add(method, p, float(arr.mean()), sem, arr.size)
    return summary


def _angles_table(angles):
    out = ResultTable(["p", "gammas", "betas"])
    for p in sorted(angles):
        qp = angles[p]
        out.add(p, " ".join(f"{x:.10g}" for x in qp.gammas),
                " ".join(f"{x:.10g}" for x in qp.betas))
    return out


# ---------------------------------------------------------------------------
# Max k-Cut spectral pipeline
# ---------------------------------------------------------------------------


def _build_spectral_params(config, k):
    times = [float(t) for t in config.get_list("quench.times", [0.5, 1.0, 2.0])]
    deltas = [float(d) for d in config.get_list("quench.deltas", [3.0, 8.0, 13.0])]
    lambdas = [float(x) for x in config.get_list("lambdas", [1.0] * len(times))]
    omega = float(config.get("quench.omega", 15.0))
    scale = float(config.get("quench.scale", 4.8))
    if len(times) != len(deltas):
        raise ConfigError("quench.times and quench.deltas must have equal length")
    quenches = [QuenchParams(t=t, delta=d, omega=omega, lattice_scale=scale)
                for t, d in zip(times, deltas)]
    return SpectralParams(quenches, lambdas, k)


def run_kcut(config):
    """Hybrid spectral pipeline vs classical limit on King's subgraphs."""
    count = int(config.get("graph.count", 10))
    rows_ = int(config.get("graph.rows", 4))
    cols = int(config.get("graph.cols", 5))
    dropout = float(config.get("graph.dropout", 0.3))
    k = int(config.get("k", 3))
    repeats = int(config.get("repeats", 50))
    model = RydbergModel(float(config.get("model.c6", RydbergModel().c6)))
    params = _build_spectral_params(config, k)
    dt = float(config.get("quench.dt", 1e-3))

    s_graphs, s_runs = spawn_seeds(config.seed, 2)
    graphs = [kings_subgraph(rows_, cols, dropout, seed=s)
              for s in s_graphs.spawn(count)]
    optima = []
    for g in graphs:
        try:
            optima.append(brute_force_kcut(g, k)[0])
        except ResourceError:
            optima.append(None)

    samples = ResultTable(
        ["instance", "method", "rep", "raw_cut", "post_cut", "ratio", "n"]
    )

    def run_instance(item):
        idx, g, opt, seed = item
        out = []
        for rep, child in enumerate(seed.spawn(repeats)):
            s_h, s_c = child.spawn(2)
            coloring, diag = kcut_pipeline(g, params, model, config.shots, seed=s_h, dt=dt)
            out.append((idx, "hybrid", rep, diag["raw_cut"], diag["post_cut"],
                        _ratio(diag["post_cut"], opt), g.n))
            classical = classical_limit_kcut(g, k, seed=s_c)
            ccut = cut_value(g, classical)
            out.append((idx, "classical-limit", rep, None, ccut,
                        _ratio(ccut, opt), g.n))
        return out

    items = list(zip(range(count), graphs, optima, s_runs.spawn(count)))
    for rows in _instance_map(run_instance, items, config.threads):
        for row in rows:
            samples.add(*row)

    table = ResultTable(RESULT_COLUMNS)
    for idx in range(count):
        for method in ("hybrid", "classical-limit"):
            cuts = [r[4] for r in samples.select(instance=idx, method=method)]
            mean, mx, mn, sd = _stats(cuts)
            table.add(idx, method, "", mean, mx, mn, sd,
                      _ratio(mean, optima[idx]), config.shots)
    table.extras["samples"] = samples
    table.extras["histogram"] = _cut_histogram(samples)
    return table


def _cut_histogram(samples):
    hist = ResultTable(["method", "cut", "count"])
    methods = sorted({row[1] for row in samples.rows})
    for method in methods:
        cuts = [int(r[4]) for r in samples.select(method=method)]
        for value in sorted(set(cuts)):
            hist.add(method, value, cuts.count(value))
    return hist


# ---------------------------------------------------------------------------
# MIS experiments
# ---------------------------------------------------------------------------


def _unit_disk_instance(config, seed):
    """Jittered King's-lattice unit-disk instance in micrometers."""
    rows_ = int(config.get("graph.rows", 4))
    cols = int(config.get("graph.cols", 4))
    dropout = float(config.get("graph.dropout", 0.2))
    spacing = float(config.get("graph.spacing", 4.8))
    jitter = float(config.get("graph.jitter", 0.4))
    radius = float(config.get("graph.radius", 6.7))
    s_lattice, s_jitter = spawn_seeds(seed, 2)
    base = kings_subgraph(rows_, cols, dropout, seed=s_lattice)
    pos = base.positions * spacing
    if jitter > 0:
        pos = pos + as_rng(s_jitter).uniform(-jitter, jitter, size=pos.shape)
    return unit_disk_edges(pos, radius)


def _build_protocol(config):
    return AnnealProtocol(
        t_max=float(config.get("protocol.t_max", 3.8)),
        delta_min=float(config.get("protocol.delta_min", -13.47)),
        delta_max=float(config.get("protocol.delta_max", 41.95)),
        omega_max=float(config.get("protocol.omega_max", 15.0)),
        ramp_fraction=float(config.get("protocol.ramp_fraction", 0.15)),
    )


def _reservoir_shots(config, g, model, pool_size, seed, dt):
    source = config.get("sampler.kind", "anneal")
    if isinstance(source, str) and source.startswith("file:"):
        return load_shots(source[len("file:"):])
    if source == "file":
        return load_shots(config.get("sampler.file"))
    if source == "anneal":
        from .samplers import anneal_sample

        protocol = _build_protocol(config)
        return anneal_sample(g, protocol, model, pool_size, seed=seed, dt=dt)
    raise ConfigError(f"unknown sampler.kind {source!r}")


def run_mis(config):
    """Greedy-repair or cluster-SA MIS comparison on unit-disk instances."""
    count = int(config.get("graph.count", 10))
    model = RydbergModel(float(config.get("model.c6", RydbergModel().c6)))
    dt = float(config.get("anneal.dt", 1e-3))
    mode = "greedy" if config.experiment == "mis-greedy" else "cluster"

    s_graphs, s_runs = spawn_seeds(config.seed, 2)
    graphs = [_unit_disk_instance(config, s) for s in s_graphs.spawn(count)]
    optima = []
    for g in graphs:
        try:
            optima.append(brute_force_mis(g)[0])
        except ResourceError:
            warnings.warn(f"n={g.n} over MIS brute-force cap; ratio omitted")
            optima.append(None)

    table = ResultTable(RESULT_COLUMNS)
    summary = ResultTable(
        ["instance", "n", "optimum", "hybrid_mean", "classical_mean",
         "performance_ratio", "equal_or_better"]
    )

    if mode == "greedy":
        shots = config.shots

        def run_instance(item):
            idx, g, opt, seed = item
            s_res, s_hrep, s_crep = seed.spawn(3)
            shot_set = _reservoir_shots(config, g, model, shots, s_res, dt)
            hrep = as_rng(s_hrep)
            hybrid = np.array([
                mis_repair(g, row, hrep).size for row in shot_set.shots
            ], dtype=float)
            crep = as_rng(s_crep)
            zeros = np.zeros(g.n, dtype=np.uint8)
            classical = np.array([
                mis_repair(g, zeros, crep).size for _ in range(shots)
            ], dtype=float)
            return idx, g, opt, hybrid, classical

        results = _instance_map(
            run_instance, list(zip(range(count), graphs, optima, s_runs.spawn(count))),
            config.threads,
        )
        for idx, g, opt, hybrid, classical in results:
            for name, values in (("hybrid", hybrid), ("classical-limit", classical)):
                mean, mx, mn, sd = _stats(values)
                table.add(idx, name, "", mean, mx, mn, sd, _ratio(mean, opt), shots)
            summary.add(idx, g.n, opt, float(hybrid.mean()), float(classical.mean()),
                        float(hybrid.mean() / classical.mean()),
                        _equal_or_better(hybrid, classical))
    else:
        epochs = int(config.get("epochs", 10))
        runs = int(config.get("runs", 2))
        pool_size = int(config.get("reservoir.shots", max(64, epochs * 16)))
        beta = config.get("beta", "inf")
        beta = np.inf if beta in ("inf", np.inf) else float(beta)
        trajectories = ResultTable(
            ["instance", "method", "run", "step", "cluster_size", "delta",
             "accepted", "objective"]
        )

        def run_instance(item):
            idx, g, opt, seed = item
            s_res, s_chains = seed.spawn(2)
            shot_set = _reservoir_shots(config, g, model, pool_size, s_res, dt)
            hybrid_pool = Reservoir.from_shotset(shot_set)
            classical_pool = Reservoir.constant(g.n, "zeros")
            bests = {"hybrid": [], "classical-limit": []}
            traj_rows = []
            for run_idx, child in enumerate(s_chains.spawn(runs)):
                s_h, s_c = child.spawn(2)
                for method, pool, s in (("hybrid", hybrid_pool, s_h),
                                        ("classical-limit", classical_pool, s_c)):
                    run_spec = AnnealRun(pool, epochs, (beta,),
                                         dissipation=float(config.get("dissipation", 0.05)))
                    best, trajectory = run_cluster_sa(g, run_spec, seed=s)
                    bests[method].append(best.size)
                    for rec in trajectory:
                        traj_rows.append((idx, method, run_idx, rec.step,
                                          rec.cluster_size, rec.delta,
                                          rec.accepted, rec.objective))
            return idx, g, opt, bests, traj_rows

        results = _instance_map(
            run_instance, list(zip(range(count), graphs, optima, s_runs.spawn(count))),
            config.threads,
        )
        for idx, g, opt, bests, traj_rows in results:
            for method, values in bests.items():
                mean, mx, mn, sd = _stats(values)
                table.add(idx, method, "", mean, mx, mn, sd, _ratio(mean, opt),
                          epochs * g.n)
            hybrid = np.asarray(bests["hybrid"], dtype=float)
            classical = np.asarray(bests["classical-limit"], dtype=float)
            summary.add(idx, g.n, opt, float(hybrid.mean()), float(classical.mean()),
                        float(hybrid.mean() / classical.mean()),
                        _equal_or_better(hybrid, classical))
            for row in traj_rows:
                trajectories.add(*row)
        table.extras["trajectories"] = trajectories

    table.extras["summary"] = summary
    return table


def _equal_or_better(hybrid, classical):
    """P(hybrid draw >= classical draw) over all sample pairs (U-statistic)."""
    h = np.sort(np.asarray(hybrid, dtype=float))
    c = np.sort(np.asarray(classical, dtype=float))
    wins = np.searchsorted(c, h, side="right")
    return float(wins.sum() / (h.size * c.size))


# ---------------------------------------------------------------------------
# Optimize experiment
# ---------------------------------------------------------------------------


def run_optimize(config):
    """Variational optimization runs with per-evaluation history tables."""
    target = config.get("optimize.target", "maxcut")
    if target == "maxcut":
        n = int(config.get("graph.n", 10))
        nu = int(config.get("graph.nu", 3))
        p = int(config.get("qaoa.p", 1))
        s_graph, s_obj, s_opt = spawn_seeds(config.seed, 3)
        if config.get("graph.file"):
            g = load_graph(config.get("graph.file"))
        else:
            g = random_regular(n, nu, seed=s_graph)
        spec = maxcut_objective(g, p, shots=config.shots)
        eval_seeds = iter(s_obj.spawn(int(config.get("optimize.iters", 30)) + 1))

        def objective(params):
            from .varopt import estimate_objective

            mean, stderr = estimate_objective(spec, params, next(eval_seeds))
            return mean, stderr, spec.shots

        box = SearchBox(
            lower=np.zeros(2 * p),
            upper=np.concatenate([np.full(p, np.pi), np.full(p, np.pi / 2)]),
            initial=np.concatenate([np.full(p, np.pi / 4), np.full(p, np.pi / 8)]),
            max_iters=int(config.get("optimize.iters", 30)),
        )
        result = dfo_maximize(objective, box, seed=s_opt)
        table = ResultTable(["eval", "params", "mean", "stderr", "shots"])
        for i, rec in enumerate(result.history):
            table.add(i, " ".join(f"{x:.10g}" for x in rec.params),
                      rec.mean, rec.stderr, rec.shots)
        best = ResultTable(["best_params", "best_value", "converged",
                            "evaluations", "total_shots"])
        best.add(" ".join(f"{x:.10g}" for x in result.best_params),
                 result.best_value, result.converged, result.evaluations,
                 result.evaluations * spec.shots)
        table.extras["best"] = best
        return table
    if target == "qaoa-angles":
        n = int(config.get("graph.n", 16))
        nu = int(config.get("graph.nu", 3))
        p = int(config.get("qaoa.p", 1))
        s_graph, s_opt = spawn_seeds(config.seed, 2)
        g = random_regular(n, nu, seed=s_graph)
        qp = qaoa_angle_setup(g, p, seed=s_opt)
        from .samplers import qaoa_expectation

        table = ResultTable(["p", "gammas", "betas", "expected_cut"])
        table.add(p, " ".join(f"{x:.10g}" for x in qp.gammas),
                  " ".join(f"{x:.10g}" for x in qp.betas),
                  qaoa_expectation(g, qp))
        return table
    if target == "spectral":
        s_graph, s_opt = spawn_seeds(config.seed, 2)
        g = kings_subgraph(int(config.get("graph.rows", 3)),
                           int(config.get("graph.cols", 4)),
                           float(config.get("graph.dropout", 0.3)), seed=s_graph)
        model = RydbergModel(float(config.get("model.c6", RydbergModel().c6)))
        params = nested_optimize_spectral(
            g, model,
            outer_budget=int(config.get("optimize.outer", 3)),
            inner_budget=int(config.get("optimize.inner", 12)),
            seed=s_opt, k=int(config.get("k", 3)), shots=config.shots,
            dt=float(config.get("quench.dt", 1e-3)),
        )
        table = ResultTable(["ansatz", "t", "delta", "lambda"])
        for i, (q, lam) in enumerate(zip(params.quenches, params.lambdas)):
            table.add(i, q.t, q.delta, lam)
        return table
    raise ConfigError(f"unknown optimize.target {target!r}")


RUNNERS = {
    "maxcut-ensemble": run_maxcut_ensemble,
    "kcut": run_kcut,
    "mis-greedy": run_mis,
    "mis-cluster": run_mis,
    "optimize": run_optimize,
}


def run_experiment(config):
    return RUNNERS[config.experiment](config)
