"""Graphs, problem-instance generators, and combinatorial objectives.

Vertices are the integers ``0..n-1``.  Edges are unordered pairs stored in
sorted normal form, and a graph is immutable once built, so instances can be
shared freely across threads.  Positions, when present, are 2D coordinates in
micrometers (one per vertex).
"""

import hashlib

import numpy as np

from .errors import DimensionError, FormatError, ParameterError
from .rng import as_rng, spawn_seeds


class Graph:
    """Immutable simple undirected graph with optional 2D positions."""

    def __init__(self, n, edges, positions=None):
        n = int(n)
        if n < 0:
            raise ParameterError(f"vertex count must be non-negative, got {n}")
        seen = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ParameterError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise DimensionError(f"edge ({i}, {j}) out of range for n={n}")
            e = (i, j) if i < j else (j, i)
            if e in seen:
                raise ParameterError(f"duplicate edge {e}")
            seen.add(e)
        self.n = n
        self.edges = tuple(sorted(seen))
        if positions is not None:
            pos = np.asarray(positions, dtype=float)
            if pos.shape != (n, 2):
                raise DimensionError(
                    f"positions must have shape ({n}, 2), got {pos.shape}"
                )
            pos.setflags(write=False)
            self.positions = pos
        else:
            self.positions = None
        self._edge_array = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        self._edge_array.setflags(write=False)
        adj = [[] for _ in range(n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        self._adj = tuple(np.array(sorted(a), dtype=np.int64) for a in adj)
        self._deg = np.array([len(a) for a in self._adj], dtype=np.int64)
        self._deg.setflags(write=False)
        self._token = None

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def degrees(self):
        return self._deg

    def degree(self, v):
        return int(self._deg[v])

    def neighbors(self, v):
        """Sorted array of neighbours of ``v``."""
        return self._adj[v]

    def edge_array(self):
        """Edges as an (m, 2) int array with i < j per row."""
        return self._edge_array

    def adjacency_matrix(self):
        a = np.zeros((self.n, self.n))
        if self.num_edges:
            e = self._edge_array
            a[e[:, 0], e[:, 1]] = 1.0
            a[e[:, 1], e[:, 0]] = 1.0
        return a

    def token(self):
        """Content hash, usable as a cache key for derived quantities."""
        if self._token is None:
            h = hashlib.sha256()
            h.update(str(self.n).encode())
            h.update(np.ascontiguousarray(self._edge_array).tobytes())
            if self.positions is not None:
                h.update(np.ascontiguousarray(self.positions).tobytes())
            self._token = h.hexdigest()
        return self._token

    def __repr__(self):
        pos = "" if self.positions is None else ", with positions"
        return f"Graph(n={self.n}, m={self.num_edges}{pos})"


class Coloring:
    """Assignment of one of ``k`` colors to every vertex.

    For k=2 this is a MaxCut bipartition (label 0 = V+, label 1 = V-).
    """

    def __init__(self, labels, k):
        labels = np.asarray(labels, dtype=np.int64).copy()
        k = int(k)
        if k < 2:
            raise ParameterError(f"color count must be >= 2, got {k}")
        if labels.ndim != 1:
            raise DimensionError("labels must be a 1-D sequence")
        if labels.size and (labels.min() < 0 or labels.max() >= k):
            raise ParameterError(f"labels must lie in [0, {k})")
        labels.setflags(write=False)
        self.labels = labels
        self.k = k

    @classmethod
    def from_bits(cls, bits):
        """Interpret a bit string as a 2-coloring (0 -> V+, 1 -> V-)."""
        return cls(np.asarray(bits, dtype=np.int64), 2)

    def __len__(self):
        return self.labels.size

    def __repr__(self):
        return f"Coloring(k={self.k}, labels={self.labels.tolist()})"


class IndependentSet:
    """Vertex subset with cached independence/maximality flags."""

    def __init__(self, members, is_independent, is_maximal):
        self.members = frozenset(int(v) for v in members)
        self.is_independent = bool(is_independent)
        self.is_maximal = bool(is_maximal)

    @classmethod
    def from_members(cls, g, members):
        ind, mx, _ = mis_status(g, members)
        return cls(members, ind, mx)

    @property
    def size(self):
        return len(self.members)

    def to_bits(self, n):
        bits = np.zeros(n, dtype=np.uint8)
        if self.members:
            bits[sorted(self.members)] = 1
        return bits

    def __repr__(self):
        return (
            f"IndependentSet(size={self.size}, independent={self.is_independent}, "
            f"maximal={self.is_maximal})"
        )


def cut_value(g, coloring):
    """Number of edges whose endpoints carry different labels."""
    labels = coloring.labels if isinstance(coloring, Coloring) else np.asarray(coloring)
    if labels.shape != (g.n,):
        raise DimensionError(f"expected {g.n} labels, got shape {labels.shape}")
    if g.num_edges == 0:
        return 0
    e = g.edge_array()
    return int(np.count_nonzero(labels[e[:, 0]] != labels[e[:, 1]]))


def mis_status(g, members):
    """(is_independent, is_maximal, size) of a vertex subset.

    A set is maximal only if it is independent and every outside vertex is
    adjacent to some member.
    """
    if isinstance(members, IndependentSet):
        members = members.members
    mem = sorted({int(v) for v in members})
    if mem and (mem[0] < 0 or mem[-1] >= g.n):
        raise DimensionError(f"vertex out of range for n={g.n}")
    inset = np.zeros(g.n, dtype=bool)
    inset[mem] = True
    if g.num_edges:
        e = g.edge_array()
        independent = not np.any(inset[e[:, 0]] & inset[e[:, 1]])
    else:
        independent = True
    if independent:
        covered = inset.copy()
        for v in mem:
            covered[g.neighbors(v)] = True
        maximal = bool(covered.all())
    else:
        maximal = False
    return independent, maximal, len(mem)


def laplacian(g):
    """Graph Laplacian L = D - A (symmetric, PSD, zero row sums)."""
    return np.diag(g.degrees.astype(float)) - g.adjacency_matrix()


def random_regular(n, nu, seed=None):
    """nu-regular simple graph via the pairing model.

    Stubs are paired uniformly at random; any pairing containing a loop or a
    repeated edge triggers a full restart, so the output is deterministic
    under ``seed`` and close to uniform over simple nu-regular graphs.
    """
    n, nu = int(n), int(nu)
    if not 0 <= nu < n:
        raise ParameterError(f"need 0 <= nu < n, got nu={nu}, n={n}")
    if (n * nu) % 2:
        raise ParameterError(f"n*nu must be even, got n={n}, nu={nu}")
    rng = as_rng(seed)
    stub_base = np.repeat(np.arange(n), nu)
    while True:
        stubs = rng.permutation(stub_base)
        a, b = stubs[0::2], stubs[1::2]
        if np.any(a == b):
            continue
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        keys = lo * n + hi
        if np.unique(keys).size < keys.size:
            continue
        return Graph(n, zip(lo.tolist(), hi.tolist()))


_KING_OFFSETS = ((0, 1), (1, -1), (1, 0), (1, 1))


def kings_subgraph(rows, cols, dropout, seed=None, max_retries=100):
    """King's-lattice subgraph after i.i.d. vertex dropout.

    Vertices sit on a unit-spacing square lattice; each site is retained with
    probability 1 - dropout, and retained sites at Chebyshev distance 1
    (horizontal, vertical, or diagonal) are joined.  Positions are populated.
    An empty draw is retried on the next seed substream a bounded number of
    times.
    """
    rows, cols = int(rows), int(cols)
    if rows < 1 or cols < 1:
        raise ParameterError("lattice must have at least one site")
    if not 0.0 <= dropout < 1.0:
        raise ParameterError(f"dropout must be in [0, 1), got {dropout}")
    for child in spawn_seeds(seed, max_retries):
        rng = np.random.default_rng(child)
        keep = rng.random(rows * cols) >= dropout
        if not keep.any():
            continue
        index = -np.ones(rows * cols, dtype=np.int64)
        index[keep] = np.arange(int(keep.sum()))
        edges = []
        positions = []
        for r in range(rows):
            for c in range(cols):
                site = r * cols + c
                if not keep[site]:
                    continue
                positions.append((float(c), float(r)))
                for dr, dc in _KING_OFFSETS:
                    rr, cc = r + dr, c + dc
                    if 0 <= rr < rows and 0 <= cc < cols and keep[rr * cols + cc]:
                        edges.append((index[site], index[rr * cols + cc]))
        return Graph(int(keep.sum()), edges, positions)
    raise ParameterError(
        f"no vertices retained after {max_retries} attempts (dropout={dropout})"
    )


def unit_disk_edges(positions, radius):
    """Unit disk graph: edges between points at Euclidean distance <= radius."""
    if radius <= 0:
        raise ParameterError(f"radius must be positive, got {radius}")
    pos = np.asarray(positions, dtype=float)
    if pos.ndim != 2 or pos.shape[1] != 2:
        raise DimensionError("positions must be an (n, 2) array")
    n = pos.shape[0]
    d2 = ((pos[:, None, :] - pos[None, :, :]) ** 2).sum(axis=2)
    i, j = np.nonzero(np.triu(d2 <= radius * radius, k=1))
    return Graph(n, zip(i.tolist(), j.tolist()), pos)


def save_graph(g, path):
    """Write the text graph format: `n <count>`, `i j` edges, `pos i x y` lines."""
    lines = [f"n {g.n}"]
    lines.extend(f"{i} {j}" for i, j in g.edges)
    if g.positions is not None:
        lines.extend(
            f"pos {i} {float(x)!r} {float(y)!r}"
            for i, (x, y) in enumerate(g.positions)
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_graph(path):
    """Parse the text graph format written by :func:`save_graph`."""
    n = None
    edges = []
    pos_entries = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if n is None:
                if len(parts) != 2 or parts[0] != "n":
                    raise FormatError("expected header 'n <count>'", path, lineno)
                try:
                    n = int(parts[1])
                except ValueError:
                    raise FormatError(f"bad vertex count {parts[1]!r}", path, lineno)
                continue
            if parts[0] == "pos":
                if len(parts) != 4:
                    raise FormatError("expected 'pos i x y'", path, lineno)
                try:
                    v = int(parts[1])
                    xy = (float(parts[2]), float(parts[3]))
                except ValueError:
                    raise FormatError("bad position entry", path, lineno)
                if not 0 <= v < n:
                    raise FormatError(f"position vertex {v} out of range", path, lineno)
                pos_entries[v] = xy
                continue
            if len(parts) != 2:
                raise FormatError(f"malformed line {line!r}", path, lineno)
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise FormatError(f"malformed edge {line!r}", path, lineno)
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise FormatError(f"invalid edge ({i}, {j})", path, lineno)
            edges.append((i, j))
    if n is None:
        raise FormatError("missing header 'n <count>'", path)
    positions = None
    if pos_entries:
        if len(pos_entries) != n:
            raise FormatError(
                f"positions given for {len(pos_entries)} of {n} vertices", path
            )
        positions = [pos_entries[v] for v in range(n)]
    return Graph(n, edges, positions)
