"""Type-2 hybrid Max k-Cut: correlation mining plus spectral clustering.

Shot ensembles from a few quenches are condensed into a weighted sum of
connected correlation matrices; its leading eigenvectors serve as per-vertex
feature vectors for k-means, and the resulting coloring is polished with the
greedy recoloring step.  The no-quantum limit (t = 0 quenches) collapses the
correlation matrix to zero and the pipeline to a greedy-post-processed random
coloring.
"""

import numpy as np

from .errors import DimensionError, ParameterError
from .graphs import Coloring, cut_value
from .postprocess import greedy_flip
from .rng import as_rng, spawn_seeds
from .samplers import QuenchParams, estimate_occupations, quench_sample

NO_SIGNAL_TOL = 1e-12


class SpectralParams:
    """Quench ansatz list, classical weights, and the color count."""

    def __init__(self, quenches, lambdas, k):
        self.quenches = tuple(quenches)
        self.lambdas = tuple(float(x) for x in lambdas)
        self.k = int(k)
        if not all(isinstance(q, QuenchParams) for q in self.quenches):
            raise ParameterError("quenches must be QuenchParams instances")
        if len(self.quenches) != len(self.lambdas):
            raise DimensionError(
                f"{len(self.quenches)} quenches but {len(self.lambdas)} weights"
            )
        if not self.quenches:
            raise ParameterError("need at least one quench ansatz")
        if self.k < 2:
            raise ParameterError(f"color count must be >= 2, got {self.k}")

    def __repr__(self):
        return (
            f"SpectralParams(k={self.k}, lambdas={self.lambdas}, "
            f"quenches={self.quenches})"
        )


class CorrelationMatrix:
    """Weighted sum of per-ansatz connected correlation matrices."""

    def __init__(self, entries, per_ansatz):
        entries = np.asarray(entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionError("correlation matrix must be square")
        if not np.allclose(entries, entries.T, atol=1e-12, rtol=0.0):
            raise ParameterError("correlation matrix must be symmetric")
        self.entries = entries
        self.per_ansatz = [np.asarray(m, dtype=float) for m in per_ansatz]

    @property
    def n(self):
        return self.entries.shape[0]


class FeatureMatrix:
    """Rows of per-vertex features built from k orthonormal eigenvectors."""

    def __init__(self, vectors, eigenvalues, degenerate):
        self.vectors = np.asarray(vectors, dtype=float)
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.degenerate = bool(degenerate)

    @property
    def n(self):
        return self.vectors.shape[0]

    @property
    def k(self):
        return self.vectors.shape[1]


def weighted_correlation(shot_sets, lambdas):
    """C_ij = sum_a lambda_a (<n_i n_j>_a - <n_i>_a <n_j>_a).

    One covariance matrix per ansatz, combined with the classical weights;
    exactly symmetric by construction and linear in the weights.
    """
    shot_sets = list(shot_sets)
    lambdas = [float(x) for x in lambdas]
    if len(shot_sets) != len(lambdas):
        raise DimensionError(
            f"{len(shot_sets)} shot sets but {len(lambdas)} weights"
        )
    if not shot_sets:
        raise ParameterError("need at least one shot set")
    n = shot_sets[0].n
    if any(ss.n != n for ss in shot_sets):
        raise DimensionError("shot sets disagree on qubit count")
    per_ansatz = []
    total = np.zeros((n, n))
    for lam, ss in zip(lambdas, shot_sets):
        means, moments = estimate_occupations(ss)
        cov = moments - np.outer(means, means)
        per_ansatz.append(cov)
        total += lam * cov
    return CorrelationMatrix(total, per_ansatz)


def top_k_eigvecs(matrix, k, rng=None, tol=1e-9):
    """Orthonormal eigenvectors of the k algebraically largest eigenvalues.

    Column signs follow a deterministic convention (largest-magnitude entry
    positive).  Degenerate eigenvalues are flagged; when an ``rng`` is given,
    each degenerate block is rotated by a Haar-random orthogonal matrix so the
    returned basis samples the eigenspace uniformly (the fully degenerate
    zero matrix then yields Haar-random features).
    """
    m = matrix.entries if isinstance(matrix, CorrelationMatrix) else np.asarray(matrix, float)
    n = m.shape[0]
    k = int(k)
    if not 1 <= k <= n:
        raise ParameterError(f"need 1 <= k <= {n}, got k={k}")
    w, v = np.linalg.eigh((m + m.T) / 2.0)  # ascending eigenvalues

    scale = max(1.0, float(np.abs(w).max()) if n else 1.0)
    close = np.abs(np.diff(w)) <= tol * scale
    # Contiguous blocks of (near-)equal eigenvalues.
    blocks = []
    start = 0
    for i in range(n - 1):
        if not close[i]:
            blocks.append((start, i + 1))
            start = i + 1
    blocks.append((start, n))

    chosen_lo = n - k
    degenerate = any(
        hi - lo > 1 and hi > chosen_lo for lo, hi in blocks
    )
    if rng is not None and degenerate:
        rng = as_rng(rng)
        for lo, hi in blocks:
            if hi - lo > 1 and hi > chosen_lo:
                q, _ = np.linalg.qr(rng.normal(size=(hi - lo, hi - lo)))
                v[:, lo:hi] = v[:, lo:hi] @ q

    cols = v[:, chosen_lo:][:, ::-1].copy()  # descending eigenvalue order
    vals = w[chosen_lo:][::-1].copy()
    for c in range(k):
        col = cols[:, c]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            cols[:, c] = -col
    return FeatureMatrix(cols, vals, degenerate)


def _kmeans_pp(x, k, rng):
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[c] = x[rng.integers(n)]
        else:
            centers[c] = x[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, ((x - centers[c]) ** 2).sum(axis=1))
    return centers


def k_means(features, k, seed=None, restarts=10, max_iter=100):
    """Lloyd's algorithm with k-means++ seeding and independent restarts.

    Empty clusters are reseeded to the point farthest from its assigned
    center.  The labeling with the best within-cluster sum of squares is
    returned, canonicalized by first occurrence.
    """
    x = features.vectors if isinstance(features, FeatureMatrix) else np.asarray(features, float)
    if x.ndim != 2:
        raise DimensionError("features must be an (n, d) array")
    n = x.shape[0]
    k = int(k)
    if not 1 <= k <= n:
        raise ParameterError(f"need 1 <= k <= {n}, got k={k}")
    rng = as_rng(seed)
    best_labels, best_wcss = None, np.inf
    for _ in range(max(1, int(restarts))):
        centers = _kmeans_pp(x, k, rng)
        labels = np.zeros(n, dtype=np.int64)
        for _ in range(max_iter):
            d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new_labels = d2.argmin(axis=1)
            counts = np.bincount(new_labels, minlength=k)
            for empty in np.flatnonzero(counts == 0):
                far = int(d2[np.arange(n), new_labels].argmax())
                centers[empty] = x[far]
                d2[:, empty] = ((x - centers[empty]) ** 2).sum(axis=1)
                new_labels = d2.argmin(axis=1)
                counts = np.bincount(new_labels, minlength=k)
            if np.array_equal(new_labels, labels):
                labels = new_labels
                break
            labels = new_labels
            for c in range(k):
                sel = labels == c
                if sel.any():
                    centers[c] = x[sel].mean(axis=0)
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        wcss = float(d2[np.arange(n), labels].sum())
        if wcss < best_wcss:
            best_wcss, best_labels = wcss, labels.copy()
    return Coloring(_canonicalize(best_labels, k), max(k, 2))


def _canonicalize(labels, k):
    """Relabel by first occurrence: first-seen cluster becomes 0, etc."""
    mapping = {}
    out = np.empty_like(labels)
    for i, lab in enumerate(labels):
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out[i] = mapping[lab]
    return out


def kcut_pipeline(g, params, model, shots_per_ansatz, seed=None, dt=1e-3):
    """Full type-2 pipeline: quenches -> correlations -> features -> colors.

    Samples each quench ansatz, builds the weighted correlation matrix, takes
    its top-k eigenvectors as features, clusters, and greedy-polishes.  When
    the selected eigenvalues carry no signal (the exact t = 0 limit), the
    clustering degenerates to a uniform random guess per vertex, which is the
    algorithm's classical limit.  Returns (coloring, diagnostics).
    """
    if g.positions is None:
        raise ParameterError("the quench ansatz requires vertex positions")
    s_shots, s_eig, s_km, s_flip, s_fallback = spawn_seeds(seed, 5)
    shot_seeds = s_shots.spawn(len(params.quenches))
    shot_sets = [
        quench_sample(g, q, model, shots_per_ansatz, seed=sq, dt=dt)
        for q, sq in zip(params.quenches, shot_seeds)
    ]
    corr = weighted_correlation(shot_sets, params.lambdas)
    feats = top_k_eigvecs(corr, params.k, rng=as_rng(s_eig))
    no_signal = float(np.abs(feats.eigenvalues).max()) < NO_SIGNAL_TOL
    if no_signal:
        labels = as_rng(s_fallback).integers(0, params.k, g.n)
        raw = Coloring(labels, params.k)
    else:
        raw = k_means(feats, params.k, seed=as_rng(s_km))
    final = greedy_flip(g, raw, seed=as_rng(s_flip))
    diagnostics = {
        "eigenvalues": feats.eigenvalues,
        "degenerate": feats.degenerate,
        "no_signal": no_signal,
        "raw_cut": cut_value(g, raw),
        "post_cut": cut_value(g, final),
        "shots_per_ansatz": int(shots_per_ansatz),
        "lambdas": params.lambdas,
    }
    return final, diagnostics


def classical_limit_kcut(g, k, seed=None):
    """No-quantum baseline: uniform random coloring then greedy recoloring."""
    s_labels, s_flip = spawn_seeds(seed, 2)
    labels = as_rng(s_labels).integers(0, int(k), g.n)
    return greedy_flip(g, Coloring(labels, int(k)), seed=as_rng(s_flip))
