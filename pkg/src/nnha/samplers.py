"""Variational bit-string samplers and their classical limits.

Implements the sampler contract {z} <- P(z | parameters): QAOA state-vector
simulation, analog Rydberg-array emulation (quench and adiabatic drives),
trivially classical samplers (uniform, constant), and shot-file ingestion.

Conventions
-----------
Basis states are indexed little-endian: bit ``i`` of the integer index is
vertex/atom ``i``, and a '1' means spin-down / Rydberg-excited / in-set.
The MaxCut phase generator is C = sum_{(i,j) in E} Z_i Z_j, and cut counts
relate to it through cut = (|E| - <C>) / 2.  Rydberg drives use rad/us and
micrometers, with n_i = (1 - Z_i)/2 the excitation projector.
"""

import math
import threading
import time

import numpy as np

from .errors import (
    DimensionError,
    FormatError,
    NumericalError,
    ParameterError,
    ResourceError,
)
from .rng import as_rng

DEFAULT_OMEGA = 15.0  # rad/us Rabi drive used throughout the experiments
DEFAULT_BLOCKADE_RADIUS = 6.7  # um at omega = 15 rad/us
DEFAULT_C6 = DEFAULT_OMEGA * DEFAULT_BLOCKADE_RADIUS**6  # ~1.357e6 rad um^6/us
DEFAULT_LATTICE_SPACING = 4.8  # um between adjacent lattice sites

QAOA_QUBIT_CAP = 24
RYDBERG_QUBIT_CAP = 16

QAOA_NORM_TOL = 1e-10
EVOLVE_NORM_TOL = 1e-8


class QaoaParams:
    """QAOA angle schedule: p layers of (gamma_j, beta_j)."""

    def __init__(self, betas=(), gammas=()):
        self.betas = tuple(float(b) for b in betas)
        self.gammas = tuple(float(g) for g in gammas)
        if len(self.betas) != len(self.gammas):
            raise DimensionError(
                f"betas ({len(self.betas)}) and gammas ({len(self.gammas)}) "
                "must have equal length"
            )

    @property
    def p(self):
        return len(self.betas)

    def __eq__(self, other):
        return (
            isinstance(other, QaoaParams)
            and self.betas == other.betas
            and self.gammas == other.gammas
        )

    def __hash__(self):
        return hash((self.betas, self.gammas))

    def __repr__(self):
        return f"QaoaParams(p={self.p}, betas={self.betas}, gammas={self.gammas})"


class QuenchParams:
    """Constant-drive quench: evolve for time t at fixed (omega, delta)."""

    def __init__(self, t, delta, omega=DEFAULT_OMEGA, lattice_scale=DEFAULT_LATTICE_SPACING):
        if t < 0:
            raise ParameterError(f"evolution time must be >= 0, got {t}")
        if omega < 0:
            raise ParameterError(f"omega must be >= 0, got {omega}")
        self.t = float(t)
        self.delta = float(delta)
        self.omega = float(omega)
        self.lattice_scale = float(lattice_scale)

    def _key(self):
        return (self.t, self.delta, self.omega, self.lattice_scale)

    def __eq__(self, other):
        return isinstance(other, QuenchParams) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (
            f"QuenchParams(t={self.t}, delta={self.delta}, omega={self.omega}, "
            f"lattice_scale={self.lattice_scale})"
        )


class AnnealProtocol:
    """Piecewise-linear adiabatic drive.

    Omega ramps 0 -> omega_max over ramp_fraction * t_max, holds, and ramps
    back to 0 over the final ramp_fraction * t_max; delta sweeps linearly
    from delta_min to delta_max across the whole protocol.
    """

    def __init__(self, t_max, delta_min, delta_max, omega_max=DEFAULT_OMEGA,
                 ramp_fraction=0.15):
        if t_max <= 0:
            raise ParameterError(f"t_max must be positive, got {t_max}")
        if delta_min >= delta_max:
            raise ParameterError(
                f"need delta_min < delta_max, got {delta_min} >= {delta_max}"
            )
        if omega_max < 0:
            raise ParameterError(f"omega_max must be >= 0, got {omega_max}")
        if not 0.0 < ramp_fraction <= 0.5:
            raise ParameterError(
                f"ramp_fraction must lie in (0, 0.5], got {ramp_fraction}"
            )
        self.t_max = float(t_max)
        self.delta_min = float(delta_min)
        self.delta_max = float(delta_max)
        self.omega_max = float(omega_max)
        self.ramp_fraction = float(ramp_fraction)

    def omega(self, t):
        ramp = self.ramp_fraction * self.t_max
        if t < ramp:
            return self.omega_max * t / ramp
        if t > self.t_max - ramp:
            return self.omega_max * max(self.t_max - t, 0.0) / ramp
        return self.omega_max

    def delta(self, t):
        frac = min(max(t / self.t_max, 0.0), 1.0)
        return self.delta_min + (self.delta_max - self.delta_min) * frac

    def drive(self):
        return lambda t: (self.omega(t), self.delta(t))

    def _key(self):
        return (self.t_max, self.delta_min, self.delta_max, self.omega_max,
                self.ramp_fraction)

    def __eq__(self, other):
        return isinstance(other, AnnealProtocol) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (
            f"AnnealProtocol(t_max={self.t_max}, delta_min={self.delta_min}, "
            f"delta_max={self.delta_max}, omega_max={self.omega_max}, "
            f"ramp_fraction={self.ramp_fraction})"
        )


class RydbergModel:
    """Van der Waals interaction model V_ij = c6 / r_ij^6.

    Atom positions enter through the graph (micrometers).  The blockade
    radius follows from the drive as R_b = (c6 / omega)^(1/6).
    """

    def __init__(self, c6=DEFAULT_C6):
        if c6 <= 0:
            raise ParameterError(f"c6 must be positive, got {c6}")
        self.c6 = float(c6)

    def blockade_radius(self, omega=DEFAULT_OMEGA):
        if omega <= 0:
            raise ParameterError(f"omega must be positive, got {omega}")
        return (self.c6 / omega) ** (1.0 / 6.0)

    def __eq__(self, other):
        return isinstance(other, RydbergModel) and self.c6 == other.c6

    def __hash__(self):
        return hash(self.c6)

    def __repr__(self):
        return f"RydbergModel(c6={self.c6})"


class ShotSet:
    """Ordered collection of measured bit strings from one sampler call."""

    def __init__(self, shots, meta=None):
        shots = np.asarray(shots, dtype=np.uint8)
        if shots.ndim != 2:
            raise DimensionError("shots must be an (M, n) array")
        if shots.shape[0] < 1:
            raise ParameterError("a ShotSet needs at least one shot")
        if shots.size and shots.max() > 1:
            raise ParameterError("shots must be binary")
        self.shots = shots
        self.meta = dict(meta) if meta else {}

    @property
    def n(self):
        return self.shots.shape[1]

    def __len__(self):
        return self.shots.shape[0]

    def __repr__(self):
        return f"ShotSet(M={len(self)}, n={self.n}, meta={self.meta})"


def _basis_indices(n):
    return np.arange(1 << n, dtype=np.uint32)


_CUT_DIAG_CACHE = {}
_CUT_DIAG_CACHE_CAP = 64


def cut_diagonal(g):
    """Cut count of every basis state, indexed by the little-endian pattern."""
    key = g.token()
    cached = _CUT_DIAG_CACHE.get(key)
    if cached is not None:
        return cached
    idx = _basis_indices(g.n)
    cut = np.zeros(idx.shape, dtype=np.int32)
    for i, j in g.edges:
        cut += ((idx >> i) ^ (idx >> j)) & 1
    cut.setflags(write=False)
    if len(_CUT_DIAG_CACHE) >= _CUT_DIAG_CACHE_CAP:
        _CUT_DIAG_CACHE.pop(next(iter(_CUT_DIAG_CACHE)))
    _CUT_DIAG_CACHE[key] = cut
    return cut


def _occupation_counts(n):
    idx = _basis_indices(n)
    occ = np.zeros(idx.shape, dtype=np.int16)
    for i in range(n):
        occ += ((idx >> i) & 1).astype(np.int16)
    return occ


def qaoa_state(g, params, cap=QAOA_QUBIT_CAP):
    """State vector of the p-layer QAOA ansatz.

    |psi> = prod_j exp(-i beta_j B) exp(-i gamma_j C) |+>^n with
    C = sum_edges Z_i Z_j and B = sum_i X_i, realized as a diagonal phase
    application followed by n single-qubit mixer sweeps per layer.
    """
    n = g.n
    if n < 1:
        raise ParameterError("graph must have at least one vertex")
    if n > cap:
        raise ResourceError(f"n={n} exceeds the state-vector cap {cap}")
    psi = np.full(1 << n, 2.0 ** (-n / 2.0), dtype=np.complex128)
    if params.p == 0:
        return psi
    zz = (g.num_edges - 2 * cut_diagonal(g)).astype(np.float64)
    for gamma, beta in zip(params.gammas, params.betas):
        psi *= np.exp(-1j * gamma * zz)
        _apply_uniform_x(psi, n, beta)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > QAOA_NORM_TOL:
        raise NumericalError(f"QAOA state norm drifted to {norm!r}")
    return psi


def _apply_uniform_x(psi, n, theta, group=4):
    """In-place exp(-i theta sum_i X_i), qubits processed in groups.

    The rotation factorizes into commuting single-qubit factors; applying
    them ``group`` qubits at a time (one batched 2^g x 2^g matmul per group)
    quarters the passes over the state vector, which dominates the cost.
    """
    c, s = math.cos(theta), math.sin(theta)
    if s == 0.0 and c == 1.0:
        return
    u1 = np.array([[c, -1j * s], [-1j * s, c]])
    q = 0
    while q < n:
        g = min(group, n - q)
        ug = np.array([[1.0 + 0j]])
        for _ in range(g):
            ug = np.kron(u1, ug)
        block = psi.reshape(-1, 1 << g, 1 << q)
        block[:] = np.matmul(ug, block)
        q += g


def sample_state(state, shots, seed=None, meta=None):
    """Draw ``shots`` independent bit strings from |amplitude|^2."""
    shots = int(shots)
    if shots < 1:
        raise ParameterError(f"shot count must be >= 1, got {shots}")
    state = np.asarray(state)
    dim = state.shape[0]
    n = dim.bit_length() - 1
    if dim != (1 << n):
        raise DimensionError(f"state length {dim} is not a power of two")
    prob = np.abs(state) ** 2
    prob = prob / prob.sum()
    rng = as_rng(seed)
    draws = rng.choice(dim, size=shots, p=prob)
    bits = ((draws[:, None] >> np.arange(n)) & 1).astype(np.uint8)
    return ShotSet(bits, meta)


def qaoa_sample(g, params, shots, seed=None, cap=QAOA_QUBIT_CAP):
    """M independent measurement outcomes of the QAOA state."""
    psi = qaoa_state(g, params, cap=cap)
    meta = {"sampler": "qaoa", "params": repr(params), "seed": repr(seed),
            "timestamp": time.time()}
    return sample_state(psi, shots, seed, meta)


def qaoa_expectation(g, params, cap=QAOA_QUBIT_CAP):
    """Exact expected cut value <cut> = (|E| - <sum ZZ>) / 2 (no shot noise)."""
    psi = qaoa_state(g, params, cap=cap)
    prob = np.abs(psi) ** 2
    return float(prob @ cut_diagonal(g))


# ---------------------------------------------------------------------------
# Rydberg analog emulation
# ---------------------------------------------------------------------------

# Yoshida 4th-order composition of Strang splitting steps.
_YOSH_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_YOSH_W0 = 1.0 - 2.0 * _YOSH_W1


def _interaction_diagonal(positions, c6, n):
    """sum_{i<j} (c6 / r_ij^6) z_i z_j over all basis states."""
    idx = _basis_indices(n)
    vint = np.zeros(idx.shape, dtype=np.float64)
    for i in range(n):
        bi = ((idx >> i) & 1).astype(bool)
        for j in range(i + 1, n):
            r2 = float(((positions[i] - positions[j]) ** 2).sum())
            if r2 == 0.0:
                raise ParameterError(f"atoms {i} and {j} coincide")
            both = bi & ((idx >> j) & 1).astype(bool)
            vint[both] += c6 / r2**3
    return vint


def rydberg_evolve(g, drive, model, t_final, initial=None, dt=1e-3,
                   cap=RYDBERG_QUBIT_CAP, positions=None):
    """Integrate the Rydberg Hamiltonian and return the final state vector.

    H(t) = (Omega(t)/2) sum_i X_i - Delta(t) sum_i n_i
           + sum_{i<j} (c6 / r_ij^6) n_i n_j

    ``drive`` maps a time (us) to (Omega, Delta) in rad/us.  The propagator is
    a fixed-step 4th-order split-operator scheme (Yoshida composition of
    exact diagonal phases and exact single-qubit mixer rotations), so every
    factor is unitary and the norm is preserved to roundoff; drives are
    evaluated at substep midpoints.  Positions default to ``g.positions``
    (micrometers) and may be overridden, e.g. with rescaled coordinates.
    """
    n = g.n
    if n < 1:
        raise ParameterError("graph must have at least one vertex")
    if n > cap:
        raise ResourceError(f"n={n} exceeds the dense-evolution cap {cap}")
    if positions is None:
        positions = g.positions
    if positions is None:
        raise ParameterError("Rydberg evolution requires vertex positions")
    positions = np.asarray(positions, dtype=float)
    if positions.shape != (n, 2):
        raise DimensionError(f"positions must have shape ({n}, 2)")
    if t_final < 0:
        raise ParameterError(f"t_final must be >= 0, got {t_final}")
    if not 0 < dt <= 1e-3:
        raise ParameterError(f"step must lie in (0, 1e-3] us, got {dt}")
    dim = 1 << n
    if initial is None:
        psi = np.zeros(dim, dtype=np.complex128)
        psi[0] = 1.0  # all-ground product state
    else:
        psi = np.array(initial, dtype=np.complex128)
        if psi.shape != (dim,):
            raise DimensionError(f"initial state must have length {dim}")
    if t_final == 0:
        return psi

    occ = _occupation_counts(n)
    vint = _interaction_diagonal(positions, model.c6, n)
    steps = max(1, math.ceil(t_final / dt))
    h = t_final / steps
    widths = (_YOSH_W1 * h, _YOSH_W0 * h, _YOSH_W1 * h)
    # exp(-i (w/2) vint) reused every step; the delta part is a small
    # per-occupation-count phase table since occ only takes n+1 values.
    vphases = {w: np.exp(-0.5j * w * vint) for w in set(widths)}
    kvals = np.arange(n + 1, dtype=np.float64)

    t = 0.0
    for _ in range(steps):
        tt = t
        for w in widths:
            omega, delta = drive(tt + 0.5 * w)
            half = np.take(np.exp(0.5j * w * delta * kvals), occ) * vphases[w]
            psi *= half
            if omega != 0.0:
                _apply_uniform_x(psi, n, 0.5 * w * omega)
            psi *= half
            tt += w
        t += h

    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > EVOLVE_NORM_TOL:
        raise NumericalError(f"state norm drifted to {norm!r} during evolution")
    return psi


# Memo for evolved states: the samplers stay pure functions of their
# arguments while repeated sampling of one (graph, drive) point skips the
# integration.  Keyed on graph content, parameters, model, and step size.
_STATE_CACHE = {}
_STATE_CACHE_CAP = 128
_STATE_CACHE_LOCK = threading.Lock()


def _cached_state(key, build):
    with _STATE_CACHE_LOCK:
        if key in _STATE_CACHE:
            return _STATE_CACHE[key]
    state = build()
    with _STATE_CACHE_LOCK:
        if len(_STATE_CACHE) >= _STATE_CACHE_CAP:
            _STATE_CACHE.pop(next(iter(_STATE_CACHE)))
        _STATE_CACHE[key] = state
    return state


def clear_state_cache():
    with _STATE_CACHE_LOCK:
        _STATE_CACHE.clear()


def quench_sample(g, params, model, shots, seed=None, dt=1e-3,
                  cap=RYDBERG_QUBIT_CAP):
    """Quench from the all-ground state at constant drive, then measure.

    Graph coordinates are scaled by ``params.lattice_scale`` to micrometers
    before building interactions; a '1' marks a Rydberg excitation.
    """
    if g.positions is None:
        raise ParameterError("quench sampling requires vertex positions")

    def build():
        if params.t == 0.0:
            psi = np.zeros(1 << g.n, dtype=np.complex128)
            psi[0] = 1.0
            return psi
        pos = g.positions * params.lattice_scale
        drive = lambda t: (params.omega, params.delta)
        return rydberg_evolve(g, drive, model, params.t, dt=dt, cap=cap,
                              positions=pos)

    state = _cached_state(("quench", g.token(), params._key(), model.c6, dt), build)
    meta = {"sampler": "quench", "params": repr(params), "seed": repr(seed),
            "timestamp": time.time()}
    return sample_state(state, shots, seed, meta)


def anneal_sample(g, protocol, model, shots, seed=None, dt=1e-3,
                  cap=RYDBERG_QUBIT_CAP):
    """Sample the final state of the piecewise-linear adiabatic protocol."""
    if g.positions is None:
        raise ParameterError("anneal sampling requires vertex positions")

    def build():
        return rydberg_evolve(g, protocol.drive(), model, protocol.t_max,
                              dt=dt, cap=cap)

    state = _cached_state(("anneal", g.token(), protocol._key(), model.c6, dt), build)
    meta = {"sampler": "anneal", "params": repr(protocol), "seed": repr(seed),
            "timestamp": time.time()}
    return sample_state(state, shots, seed, meta)


# ---------------------------------------------------------------------------
# Classical limits and shot-file ingestion
# ---------------------------------------------------------------------------


def uniform_sample(n, shots, seed=None):
    """i.i.d. uniform bit strings, the MaxCut no-quantum limit (P(z) = 2^-n)."""
    n, shots = int(n), int(shots)
    if n < 1:
        raise ParameterError(f"bit count must be >= 1, got {n}")
    if shots < 1:
        raise ParameterError(f"shot count must be >= 1, got {shots}")
    rng = as_rng(seed)
    bits = rng.integers(0, 2, size=(shots, n), dtype=np.uint8)
    return ShotSet(bits, {"sampler": "uniform", "seed": repr(seed),
                          "timestamp": time.time()})


def constant_sample(n, value, shots):
    """All-zeros or all-ones shots, the MIS no-quantum limit."""
    n, shots = int(n), int(shots)
    if n < 1 or shots < 1:
        raise ParameterError("need n >= 1 and shots >= 1")
    if value in ("zeros", 0):
        fill = 0
    elif value in ("ones", 1):
        fill = 1
    else:
        raise ParameterError(f"value must be 'zeros' or 'ones', got {value!r}")
    bits = np.full((shots, n), fill, dtype=np.uint8)
    return ShotSet(bits, {"sampler": "constant", "value": fill,
                          "timestamp": time.time()})


SHOT_FILE_MAGIC = "nnha-shots v1"


def save_shots(shot_set, path):
    """Write the shot-file format (hardware ingestion seam)."""
    lines = [SHOT_FILE_MAGIC, f"n {shot_set.n} M {len(shot_set)}"]
    for key in sorted(shot_set.meta):
        value = str(shot_set.meta[key]).replace("\n", " ")
        lines.append(f"# {key}={value}")
    lines.extend("".join("1" if b else "0" for b in row) for row in shot_set.shots)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_shots(path):
    """Parse a shot file; malformed lines raise with their line number."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw or raw[0].strip() != SHOT_FILE_MAGIC:
        raise FormatError(f"missing magic line {SHOT_FILE_MAGIC!r}", path, 1)
    if len(raw) < 2:
        raise FormatError("missing 'n <qubits> M <shots>' header", path, 2)
    header = raw[1].split()
    if len(header) != 4 or header[0] != "n" or header[2] != "M":
        raise FormatError("expected header 'n <qubits> M <shots>'", path, 2)
    try:
        n, m = int(header[1]), int(header[3])
    except ValueError:
        raise FormatError("non-integer counts in header", path, 2)
    if n < 1:
        raise FormatError(f"qubit count must be >= 1, got {n}", path, 2)
    meta = {}
    rows = []
    for lineno, line in enumerate(raw[2:], start=3):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
            continue
        if len(line) != n or set(line) - {"0", "1"}:
            raise FormatError(
                f"expected {n} characters of 0/1, got {line!r}", path, lineno
            )
        rows.append([1 if ch == "1" else 0 for ch in line])
    if not rows:
        raise FormatError("shot file has no shot lines", path)
    if len(rows) != m:
        raise FormatError(f"header declares M={m} but found {len(rows)} shots", path)
    return ShotSet(np.array(rows, dtype=np.uint8), meta)


def estimate_occupations(shots):
    """Empirical occupation means and pair moments from a shot set.

    Returns (means, second_moments) with second_moments[i, j] = <z_i z_j>;
    the matrix is symmetric and its diagonal equals the means exactly.
    """
    z = shots.shots if isinstance(shots, ShotSet) else np.asarray(shots)
    if z.ndim != 2 or z.shape[0] < 1:
        raise DimensionError("shots must be a non-empty (M, n) array")
    z = z.astype(np.float64)
    m = z.shape[0]
    means = z.sum(axis=0) / m
    moments = (z.T @ z) / m
    return means, moments
