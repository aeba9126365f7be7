"""Shared fixtures and independent dense-matrix oracles.

The oracles here deliberately avoid the package's fast paths: states are
evolved with scipy.linalg.expm on explicitly built Hamiltonians, so they
check the production code through an independent route.
"""

import numpy as np
import pytest
from scipy.linalg import expm

from nnha import Graph

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Z = np.diag([1.0, -1.0]).astype(complex)
NUM_OP = np.diag([0.0, 1.0]).astype(complex)  # n = (1 - Z) / 2


def kron_site(op, site, n):
    """Operator acting on one site, little-endian (site 0 = lowest bit)."""
    out = np.array([[1.0 + 0j]])
    for q in range(n):
        out = np.kron(op if q == site else I2, out)
    return out


def dense_qaoa_state(g, gammas, betas):
    """QAOA state built from dense expm factors (independent oracle)."""
    n = g.n
    C = np.zeros((1 << n, 1 << n), dtype=complex)
    for i, j in g.edges:
        C += kron_site(PAULI_Z, i, n) @ kron_site(PAULI_Z, j, n)
    B = sum(kron_site(PAULI_X, q, n) for q in range(n))
    psi = np.full(1 << n, 2.0 ** (-n / 2.0), dtype=complex)
    for gamma, beta in zip(gammas, betas):
        psi = expm(-1j * gamma * C) @ psi
        psi = expm(-1j * beta * B) @ psi
    return psi


def dense_rydberg_hamiltonian(positions, c6, n, omega, delta):
    positions = np.asarray(positions, dtype=float)
    H = np.zeros((1 << n, 1 << n), dtype=complex)
    for q in range(n):
        H += 0.5 * omega * kron_site(PAULI_X, q, n)
        H -= delta * kron_site(NUM_OP, q, n)
    for i in range(n):
        for j in range(i + 1, n):
            r2 = float(((positions[i] - positions[j]) ** 2).sum())
            H += (c6 / r2**3) * (
                kron_site(NUM_OP, i, n) @ kron_site(NUM_OP, j, n)
            )
    return H


def dense_rydberg_evolve(positions, c6, drive, t_final, n, steps=4000, initial=None):
    """Piecewise-constant expm evolution (independent oracle)."""
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    if initial is not None:
        psi = np.asarray(initial, dtype=complex).copy()
    dt = t_final / steps
    for m in range(steps):
        omega, delta = drive((m + 0.5) * dt)
        H = dense_rydberg_hamiltonian(positions, c6, n, omega, delta)
        psi = expm(-1j * dt * H) @ psi
    return psi


def state_bit_moments(state, n):
    """Exact occupation means and pair moments of a state vector."""
    prob = np.abs(np.asarray(state)) ** 2
    bits = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(float)
    means = prob @ bits
    moments = bits.T @ (prob[:, None] * bits)
    return means, moments


@pytest.fixture
def triangle():
    return Graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3():
    return Graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def square():
    return Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
