"""Shared oracles and helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from krylov_echo.models import IsingParams

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
ID2 = np.eye(2, dtype=np.complex128)


def kron_site(op: np.ndarray, site: int, n_spins: int) -> np.ndarray:
    """Embed a single-site operator at bit position `site` (LSB = site 0)."""
    ops = [ID2] * n_spins
    ops[n_spins - 1 - site] = op
    out = ops[0]
    for factor in ops[1:]:
        out = np.kron(out, factor)
    return out


def ising_dense_oracle(params: IsingParams) -> np.ndarray:
    """Independent Kronecker-product construction of the Ising chain."""
    n = params.n_spins
    dim = 2**n
    ham = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(n):
        ham += params.h_x * kron_site(SX, k, n) + params.h_z * kron_site(SZ, k, n)
    for k in range(n - 1):
        ham -= params.J * kron_site(SZ, k, n) @ kron_site(SZ, k + 1, n)
    return ham


def hermiticity_defect(op, rng: np.random.Generator, probes: int = 4) -> float:
    """Max relative defect of <u|Hv> = conj(<v|Hu>) over random probes."""
    worst = 0.0
    for _ in range(probes):
        u = rng.standard_normal(op.dim) + 1j * rng.standard_normal(op.dim)
        v = rng.standard_normal(op.dim) + 1j * rng.standard_normal(op.dim)
        lhs = np.vdot(u, op.apply(v))
        rhs = np.conj(np.vdot(v, op.apply(u)))
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1e-300))
    return worst


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
