"""Exhaustive reference solvers for small instances.

Used by the experiment harness for approximation ratios and by the test
suite as independent oracles.  Hard caps keep them at desk scale.
"""

import numpy as np

from .errors import ResourceError


def brute_force_maxcut(g, cap=20):
    """Exact MaxCut by enumeration of all 2^n bipartitions (n <= cap)."""
    n = g.n
    if n > cap:
        raise ResourceError(f"n={n} exceeds the MaxCut enumeration cap {cap}")
    if g.num_edges == 0:
        return 0, np.zeros(n, dtype=np.int64)
    idx = np.arange(1 << n, dtype=np.uint32)
    cut = np.zeros(idx.shape, dtype=np.int32)
    for i, j in g.edges:
        cut += ((idx >> i) ^ (idx >> j)) & 1
    best = int(cut.argmax())
    labels = (best >> np.arange(n)) & 1
    return int(cut[best]), labels.astype(np.int64)


def brute_force_kcut(g, k, cap=10):
    """Exact Max k-Cut by enumeration of all k^n colorings (n <= cap)."""
    n = g.n
    k = int(k)
    if n > cap:
        raise ResourceError(f"n={n} exceeds the k-Cut enumeration cap {cap}")
    if g.num_edges == 0:
        return 0, np.zeros(n, dtype=np.int64)
    total = k**n
    codes = np.arange(total, dtype=np.int64)
    digits = (codes[:, None] // k ** np.arange(n, dtype=np.int64)) % k
    cut = np.zeros(total, dtype=np.int32)
    for i, j in g.edges:
        cut += digits[:, i] != digits[:, j]
    best = int(cut.argmax())
    return int(cut[best]), digits[best].copy()


def brute_force_mis(g, cap=25):
    """Exact maximum independent set by branch and bound with degree pruning."""
    n = g.n
    if n > cap:
        raise ResourceError(f"n={n} exceeds the MIS search cap {cap}")
    nbr = [0] * n
    for i, j in g.edges:
        nbr[i] |= 1 << j
        nbr[j] |= 1 << i
    full = (1 << n) - 1
    best_size = 0
    best_mask = 0

    def search(remaining, size, mask):
        nonlocal best_size, best_mask
        while remaining:
            count = remaining.bit_count()
            if size + count <= best_size:
                return
            # Absorb isolated-in-remaining vertices, branch on a max-degree one.
            pick = -1
            pick_deg = -1
            r = remaining
            while r:
                v = (r & -r).bit_length() - 1
                r &= r - 1
                d = (nbr[v] & remaining).bit_count()
                if d == 0:
                    remaining &= ~(1 << v)
                    size += 1
                    mask |= 1 << v
                    pick = -1
                    break
                if d > pick_deg:
                    pick_deg = d
                    pick = v
            else:
                v = pick
                search(remaining & ~(1 << v) & ~nbr[v], size + 1, mask | (1 << v))
                remaining &= ~(1 << v)
        if size > best_size:
            best_size = size
            best_mask = mask

    search(full, 0, 0)
    members = frozenset(v for v in range(n) if best_mask >> v & 1)
    return best_size, members
