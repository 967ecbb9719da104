"""Test Hamiltonians and seeded initial states.

The Ising chain is applied bitwise and never materialized; the random-matrix
ensembles are dense by construction and capped, since they exist only to
validate estimators. All samplers are pure functions of (size, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DenseOperator, LinearOperator

__all__ = [
    "IsingOperator",
    "IsingParams",
    "MAX_ENSEMBLE_DIM",
    "MAX_ISING_SPINS",
    "goe_sample",
    "gue_sample",
    "ising_operator",
    "random_state",
]

MAX_ISING_SPINS = 20
MAX_ENSEMBLE_DIM = 4096


@dataclass(frozen=True)
class IsingParams:
    """Open-boundary Ising chain with transverse (x) and parallel (z) fields.

    Energies are in units of the coupling J, times in 1/J. The defaults put
    the chain at a standard nonintegrable point.
    """

    n_spins: int
    J: float = 1.0
    h_x: float = 1.0
    h_z: float = 0.5

    def __post_init__(self):
        if self.n_spins < 2:
            raise ValueError("n_spins must be >= 2")


class IsingOperator(LinearOperator):
    """Matrix-free H = sum_k (h_x sx_k + h_z sz_k) - J sum_k sz_k sz_{k+1}.

    Basis index b encodes the spins bitwise: bit k = 0 means sz eigenvalue +1
    at site k+1. sz terms are a precomputed diagonal; each sx_k flips bit k
    through a strided reshape, so one apply costs O(n 2^n).
    """

    def __init__(self, params: IsingParams):
        if params.n_spins > MAX_ISING_SPINS:
            raise ValueError(f"n_spins {params.n_spins} exceeds cap {MAX_ISING_SPINS}")
        super().__init__(2**params.n_spins)
        self.params = params
        idx = np.arange(self.dim)
        diag = np.zeros(self.dim)
        z_prev = None
        for k in range(params.n_spins):
            z_k = 1.0 - 2.0 * ((idx >> k) & 1)
            diag += params.h_z * z_k
            if z_prev is not None:
                diag -= params.J * z_prev * z_k
            z_prev = z_k
        self._diag = diag

    def apply(self, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec, dtype=np.complex128)
        if vec.shape != (self.dim,):
            raise ValueError(f"vector shape {vec.shape} does not match dim {self.dim}")
        out = self._diag * vec
        h_x = self.params.h_x
        if h_x != 0.0:
            for k in range(self.params.n_spins):
                flipped = vec.reshape(-1, 2, 1 << k)[:, ::-1, :].reshape(self.dim)
                out += h_x * flipped
        return out


def ising_operator(params: IsingParams) -> LinearOperator:
    """Matrix-free Ising chain operator for the given parameters."""
    return IsingOperator(params)


def _check_ensemble_dim(dim: int) -> None:
    if dim < 2:
        raise ValueError("ensemble dimension must be >= 2")
    if dim > MAX_ENSEMBLE_DIM:
        raise ValueError(f"ensemble dimension {dim} exceeds cap {MAX_ENSEMBLE_DIM}")


def goe_sample(dim: int, seed: int) -> DenseOperator:
    """Real symmetric (G + G^T)/2 with standard normal G; deterministic per seed."""
    _check_ensemble_dim(dim)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim))
    return DenseOperator((g + g.T) / 2.0)


def gue_sample(dim: int, seed: int) -> DenseOperator:
    """Hermitian (G + G^dagger)/2 with complex standard normal G."""
    _check_ensemble_dim(dim)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return DenseOperator((g + g.conj().T) / 2.0)


def random_state(dim: int, seed: int) -> np.ndarray:
    """Normalized state with independent complex normal amplitudes."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)
