"""Type-3 hybrid MIS solver: sandpile clusters + reservoir merges + Metropolis.

A driven dissipative sandpile supplies scale-free update regions; inside each
region the current maximal independent set is replaced by a repaired reservoir
sample (quantum shots, or all-zeros in the classical limit), and the merged
candidate is accepted with the Metropolis rule for a maximization objective.
"""

import warnings
from collections import deque
from typing import NamedTuple

import numpy as np

from .errors import NumericalError, ParameterError
from .postprocess import mis_repair
from .rng import as_rng, spawn_seeds

_TOPPLE_CAP = 10_000_000


class SandpileState:
    """Persistent grain counts and rng stream of a driven sandpile.

    Between avalanches every vertex with positive degree satisfies
    grains[v] < degree(v).  The state persists across cluster draws within a
    run (self-organized criticality needs a driven steady state) and is reset
    per run.
    """

    def __init__(self, grains, rng, dissipation=0.05):
        grains = np.asarray(grains, dtype=np.int64)
        if grains.ndim != 1 or (grains.size and grains.min() < 0):
            raise ParameterError("grains must be a 1-D non-negative array")
        if not 0.0 <= dissipation <= 1.0:
            raise ParameterError(f"dissipation must lie in [0, 1], got {dissipation}")
        self.grains = grains
        self.rng = as_rng(rng)
        self.dissipation = float(dissipation)

    @classmethod
    def fresh(cls, g, dissipation=0.05, seed=None):
        return cls(np.zeros(g.n, dtype=np.int64), as_rng(seed), dissipation)


def sandpile_cluster(g, state):
    """Drive the sandpile to one avalanche and return the toppled vertex set.

    Grains land on uniformly random vertices until some vertex reaches its
    collapse threshold (its degree); it then sheds one grain per neighbour,
    each destroyed independently with probability ``dissipation``, cascading
    until stable.  The cluster is the nonempty, connected set of vertices
    that toppled at least once.  An isolated vertex is trivially at threshold
    and forms the cluster {v} by itself.
    """
    n = g.n
    if n < 1:
        raise ParameterError("graph must have at least one vertex")
    deg = g.degrees
    grains = state.grains
    rng = state.rng

    while True:
        v = int(rng.integers(n))
        if deg[v] == 0:
            grains[v] = 0
            return np.array([v], dtype=np.int64)
        grains[v] += 1
        if grains[v] >= deg[v]:
            break

    toppled = np.zeros(n, dtype=bool)
    queue = deque([v])
    work = 0
    while queue:
        u = queue.popleft()
        if grains[u] < deg[u]:
            continue
        grains[u] -= deg[u]
        toppled[u] = True
        work += 1
        if work > _TOPPLE_CAP:
            raise NumericalError("sandpile avalanche failed to stabilize")
        for w in g.neighbors(u):
            if rng.random() >= state.dissipation:
                grains[w] += 1
                if grains[w] >= deg[w]:
                    queue.append(int(w))
        if grains[u] >= deg[u]:
            queue.append(u)
    return np.flatnonzero(toppled)


def merge_solutions(g, chi, chi_prime, cluster, seed=None):
    """Replace ``chi`` by ``chi_prime`` inside the cluster, then repair.

    The merged candidate keeps chi outside the cluster and chi_prime inside;
    boundary independence violations are fixed by the greedy repair, so the
    result is always a maximal independent set.
    """
    in_cluster = np.zeros(g.n, dtype=bool)
    cluster = np.asarray(list(cluster), dtype=np.int64)
    if cluster.size:
        in_cluster[cluster] = True
    bits = np.where(in_cluster, chi_prime.to_bits(g.n), chi.to_bits(g.n))
    return mis_repair(g, bits, seed)


def metropolis_accept(delta, beta, seed=None):
    """Metropolis rule for a maximization objective.

    Accept with probability min[1, exp(+beta * delta)]; improvements
    (delta >= 0) are always accepted, and beta = inf accepts iff delta >= 0.
    """
    if not (beta >= 0):  # rejects negatives and NaN
        raise ParameterError(f"beta must be >= 0 or inf, got {beta}")
    if delta >= 0:
        return True
    if np.isinf(beta):
        return False
    return float(as_rng(seed).random()) < float(np.exp(beta * delta))


class Reservoir:
    """Immutable pool of bit strings, drawn one per update step.

    Draw order is a per-run permutation; exhausting a finite pool reshuffles
    it with a warning (constant single-row pools cycle silently).
    """

    def __init__(self, pool, warn_on_cycle=True):
        pool = np.asarray(pool, dtype=np.uint8)
        if pool.ndim != 2 or pool.shape[0] < 1:
            raise ParameterError("reservoir pool must be a non-empty (M, n) array")
        pool.setflags(write=False)
        self.pool = pool
        self.warn_on_cycle = bool(warn_on_cycle) and pool.shape[0] > 1

    @classmethod
    def from_shotset(cls, shot_set):
        return cls(shot_set.shots)

    @classmethod
    def constant(cls, n, value="zeros"):
        fill = 1 if value in ("ones", 1) else 0
        if value not in ("zeros", "ones", 0, 1):
            raise ParameterError(f"value must be 'zeros' or 'ones', got {value!r}")
        return cls(np.full((1, n), fill, dtype=np.uint8), warn_on_cycle=False)

    def draws(self, rng):
        """Generator yielding one pool row per draw, reshuffling on exhaustion."""
        rng = as_rng(rng)
        first = True
        while True:
            order = rng.permutation(self.pool.shape[0])
            if not first and self.warn_on_cycle:
                warnings.warn(
                    "reservoir pool exhausted; reshuffling and reusing shots",
                    stacklevel=2,
                )
            first = False
            for i in order:
                yield self.pool[i]


class AnnealRun:
    """Cluster-SA configuration: reservoir, epoch count, and beta schedule.

    ``beta_schedule`` holds one inverse temperature per epoch (np.inf allowed)
    or a single value broadcast to all epochs; one epoch is n update steps.
    ``cluster_mode`` selects the update region: "sandpile" (default,
    self-organized critical), "pair" (a random vertex and one random
    neighbour, the Hamming-distance-2 diffusive search), or "radius" (all
    vertices within ``cluster_radius`` hops of a random centre).  The
    alternatives are exposed untuned.
    """

    CLUSTER_MODES = ("sandpile", "pair", "radius")

    def __init__(self, reservoir, epochs, beta_schedule=(np.inf,), dissipation=0.05,
                 cluster_mode="sandpile", cluster_radius=1):
        if not isinstance(reservoir, Reservoir):
            raise ParameterError("reservoir must be a Reservoir")
        epochs = int(epochs)
        if epochs < 1:
            raise ParameterError(f"epochs must be >= 1, got {epochs}")
        schedule = tuple(float(b) for b in np.atleast_1d(beta_schedule))
        if len(schedule) == 1:
            schedule = schedule * epochs
        if len(schedule) != epochs:
            raise ParameterError(
                f"beta_schedule length {len(schedule)} does not match epochs={epochs}"
            )
        if any(not (b >= 0) for b in schedule):
            raise ParameterError("beta values must be >= 0 or inf")
        if cluster_mode not in self.CLUSTER_MODES:
            raise ParameterError(f"cluster_mode must be one of {self.CLUSTER_MODES}")
        if cluster_radius < 0:
            raise ParameterError(f"cluster_radius must be >= 0, got {cluster_radius}")
        self.reservoir = reservoir
        self.epochs = epochs
        self.beta_schedule = schedule
        self.dissipation = float(dissipation)
        self.cluster_mode = cluster_mode
        self.cluster_radius = int(cluster_radius)


def pair_cluster(g, rng):
    """A random vertex plus one random neighbour (Hamming-2 moves)."""
    v = int(rng.integers(g.n))
    nb = g.neighbors(v)
    if nb.size == 0:
        return np.array([v], dtype=np.int64)
    u = int(nb[rng.integers(nb.size)])
    return np.array(sorted((v, u)), dtype=np.int64)


def radius_cluster(g, rng, radius):
    """All vertices within ``radius`` hops of a uniformly random centre."""
    center = int(rng.integers(g.n))
    seen = {center}
    frontier = [center]
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for u in g.neighbors(v):
                if int(u) not in seen:
                    seen.add(int(u))
                    nxt.append(int(u))
        frontier = nxt
    return np.array(sorted(seen), dtype=np.int64)


class StepRecord(NamedTuple):
    step: int
    cluster_size: int
    delta: int
    accepted: bool
    objective: int


def run_cluster_sa(g, run, seed=None):
    """Cluster-update simulated annealing over maximal independent sets.

    The chain starts from the maximalized empty set and performs
    epochs * n update steps: draw a sandpile cluster, repair one reservoir
    shot, merge inside the cluster, and accept by the Metropolis rule.
    Returns (best solution, per-step trajectory); every accepted intermediate
    is a valid maximal independent set and the run is reproducible from
    (graph, run, seed) with an in-memory reservoir.
    """
    s_init, s_pile, s_pool, s_repair, s_merge, s_accept = spawn_seeds(seed, 6)
    init_rng = as_rng(s_init)
    repair_rng = as_rng(s_repair)
    merge_rng = as_rng(s_merge)
    accept_rng = as_rng(s_accept)
    state = SandpileState.fresh(g, run.dissipation, seed=s_pile)
    draws = run.reservoir.draws(as_rng(s_pool))

    chi = mis_repair(g, np.zeros(g.n, dtype=np.uint8), init_rng)
    best = chi
    trajectory = []
    for step in range(run.epochs * g.n):
        beta = run.beta_schedule[step // g.n]
        if run.cluster_mode == "pair":
            cluster = pair_cluster(g, state.rng)
        elif run.cluster_mode == "radius":
            cluster = radius_cluster(g, state.rng, run.cluster_radius)
        else:
            cluster = sandpile_cluster(g, state)
        shot = next(draws)
        chi_prime = mis_repair(g, shot, repair_rng)
        candidate = merge_solutions(g, chi, chi_prime, cluster, merge_rng)
        delta = candidate.size - chi.size
        accepted = metropolis_accept(delta, beta, accept_rng)
        if accepted:
            chi = candidate
        if chi.size > best.size:
            best = chi
        trajectory.append(
            StepRecord(step, int(cluster.size), int(delta), accepted, chi.size)
        )
    return best, trajectory


def classical_reservoir(g):
    """The no-quantum reservoir: every draw is the all-zeros string."""
    return Reservoir.constant(g.n, "zeros")
