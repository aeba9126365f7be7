"""Shot post-processors (type-1 hybrid steps).

``greedy_flip`` drives a (k-)coloring to a 1-local optimum by steepest-ascent
single-vertex recoloring; ``greedy_add`` / ``mis_repair`` turn arbitrary bit
strings into maximal independent sets.  All routines are pure functions of
(graph, input, seed).
"""

import numpy as np

from .errors import DimensionError, ParameterError
from .graphs import Coloring, IndependentSet
from .rng import as_rng


def greedy_flip(g, coloring, seed=None, mode="steepest"):
    """Single-vertex recoloring ascent on the cut objective.

    mode="steepest" evaluates all n*(k-1) recolorings and applies the one
    with the largest strictly positive gain, ties broken uniformly at random.
    mode="random" picks a uniformly random vertex among those with an
    improving move and applies that vertex's best move (zero-temperature
    single-spin annealing).  Plateau (zero-gain) moves are rejected, so the
    cut strictly increases and the loop ends at a 1-local optimum.
    """
    if not isinstance(coloring, Coloring):
        raise ParameterError("greedy_flip expects a Coloring")
    if len(coloring) != g.n:
        raise DimensionError(f"coloring has {len(coloring)} labels for n={g.n}")
    if mode not in ("steepest", "random"):
        raise ParameterError(f"unknown mode {mode!r}")
    rng = as_rng(seed)
    labels = np.array(coloring.labels, dtype=np.int64)
    k = coloring.k
    n = g.n
    if n == 0 or g.num_edges == 0:
        return Coloring(labels, k)

    # cnt[v, c] = number of neighbours of v currently colored c; the gain of
    # recoloring v from its label to c is cnt[v, label_v] - cnt[v, c].
    cnt = np.zeros((n, k), dtype=np.int64)
    e = g.edge_array()
    np.add.at(cnt, (e[:, 0], labels[e[:, 1]]), 1)
    np.add.at(cnt, (e[:, 1], labels[e[:, 0]]), 1)
    rows = np.arange(n)

    for _ in range(g.num_edges + 1):  # each move raises the cut, bounded by |E|
        gains = cnt[rows, labels][:, None] - cnt
        if mode == "steepest":
            best = gains.max()
            if best <= 0:
                break
            ties = np.argwhere(gains == best)
            v, c = ties[rng.integers(len(ties))]
        else:
            per_vertex = gains.max(axis=1)
            movable = np.flatnonzero(per_vertex > 0)
            if movable.size == 0:
                break
            v = movable[rng.integers(movable.size)]
            row = gains[v]
            ties = np.flatnonzero(row == row.max())
            c = ties[rng.integers(ties.size)]
        old = labels[v]
        labels[v] = c
        nb = g.neighbors(v)
        cnt[nb, old] -= 1
        cnt[nb, c] += 1
    else:
        raise AssertionError("greedy_flip exceeded its move bound")
    return Coloring(labels, k)


def greedy_add(g, members, seed=None, allowed=None):
    """Grow an independent set by uniformly random eligible vertices.

    Eligible vertices are outside the set, not adjacent to it, and inside the
    optional ``allowed`` mask (which restricts growth to an induced
    subgraph).  The result is maximal within the allowed region.  The input
    must already be independent.
    """
    rng = as_rng(seed)
    if isinstance(members, IndependentSet):
        members = members.members
    mem = {int(v) for v in members}
    if mem and (min(mem) < 0 or max(mem) >= g.n):
        raise DimensionError(f"vertex out of range for n={g.n}")
    for i, j in g.edges:
        if i in mem and j in mem:
            raise ParameterError(
                f"input set is not independent (edge ({i}, {j}) inside)"
            )
    if allowed is None:
        eligible = np.ones(g.n, dtype=bool)
    else:
        eligible = np.array(allowed, dtype=bool)
        if eligible.shape != (g.n,):
            raise DimensionError(f"allowed mask must have length {g.n}")
        eligible = eligible.copy()
    for v in mem:
        eligible[v] = False
        eligible[g.neighbors(v)] = False
    while True:
        pool = np.flatnonzero(eligible)
        if pool.size == 0:
            break
        v = int(pool[rng.integers(pool.size)])
        mem.add(v)
        eligible[v] = False
        eligible[g.neighbors(v)] = False
    return IndependentSet.from_members(g, mem)


def mis_repair(g, bits, seed=None):
    """Two-step greedy repair of a bit string into a maximal independent set.

    Step 1 runs greedy_add from the empty set on the subgraph induced by the
    '1' bits, removing independence violations (a bit string that already
    encodes an independent set survives unchanged).  Step 2 greedy-adds on
    the full graph until maximal.
    """
    bits = np.asarray(bits)
    if bits.shape != (g.n,):
        raise DimensionError(f"bit string has shape {bits.shape}, expected ({g.n},)")
    rng = as_rng(seed)
    inner = greedy_add(g, (), rng, allowed=(bits != 0))
    return greedy_add(g, inner, rng)
