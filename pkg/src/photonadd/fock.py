"""Truncated Fock-space linear algebra.

Everything is dense numpy. Single-mode operators are ``dim x dim``; two-mode
operators use the row index ``n_a * dim_b + m_b``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import gammaln

from .exceptions import TruncationWarning, ZeroTrace

TAIL_WARN = 1e-10


def _frozen(a, dtype=complex):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FockSpace:
    """Single bosonic mode truncated to levels ``|0>, ..., |dim-1>``."""

    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"FockSpace needs an integer dim >= 2, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))


@dataclass(frozen=True, eq=False)
class Ket:
    space: FockSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.shape != (self.space.dim,):
            raise ValueError(f"expected {self.space.dim} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> Ket:
        n2 = self.norm_squared()
        if n2 <= 1e-28:
            raise ZeroTrace("cannot normalize a zero vector")
        return Ket(self.space, self.amplitudes / np.sqrt(n2))

    def embed(self, space: FockSpace) -> Ket:
        """Zero-pad or cut the amplitude vector to fit ``space``."""
        out = np.zeros(space.dim, dtype=complex)
        k = min(space.dim, self.space.dim)
        out[:k] = self.amplitudes[:k]
        return Ket(space, out)

    def to_density(self) -> DensityOp:
        return DensityOp(self.space, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityOp:
    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        d = self.space.dim
        if m.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def populations(self) -> np.ndarray:
        return np.diagonal(self.matrix).real.copy()

    def embed(self, space: FockSpace) -> DensityOp:
        out = np.zeros((space.dim, space.dim), dtype=complex)
        k = min(space.dim, self.space.dim)
        out[:k, :k] = self.matrix[:k, :k]
        return DensityOp(space, out)

    def is_valid(self, tol=1e-10) -> bool:
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > tol:
            return False
        if abs(self.trace - 1.0) > tol:
            return False
        return bool(np.linalg.eigvalsh(m).min() >= -tol)


@dataclass(frozen=True, eq=False)
class TwoModeDensityOp:
    space_a: FockSpace
    space_b: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        d = self.space_a.dim * self.space_b.dim
        if m.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def index(self, n_a: int, m_b: int) -> int:
        return n_a * self.space_b.dim + m_b

    def marginal_populations(self):
        """Photon-number distributions of mode a and mode b."""
        da, db = self.space_a.dim, self.space_b.dim
        pops = np.diagonal(self.matrix).real.reshape(da, db)
        return pops.sum(axis=1), pops.sum(axis=0)


def annihilation_matrix(space: FockSpace) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, space.dim)), k=1).astype(complex)


def creation_matrix(space: FockSpace) -> np.ndarray:
    # truncated a^dagger sends |dim-1> to zero
    return annihilation_matrix(space).conj().T


def number_matrix(space: FockSpace) -> np.ndarray:
    return np.diag(np.arange(space.dim)).astype(complex)


def matrix_exponential(G) -> np.ndarray:
    """``exp(G)`` by Pade scaling and squaring (scipy's expm)."""
    G = np.asarray(G)
    if not np.all(np.isfinite(G)):
        raise ValueError("matrix_exponential needs a finite matrix")
    return scipy.linalg.expm(G)


def poisson_tail(mean: float, dim: int) -> float:
    """Poisson mass at levels ``>= dim``, summed directly from the top."""
    if mean == 0:
        return 0.0
    hi = int(max(dim, mean + 40 * np.sqrt(mean) + 60))
    n = np.arange(dim, hi + 1)
    logp = -mean + n * np.log(mean) - gammaln(n + 1)
    return float(np.exp(logp).sum())


def displacement_operator(space: FockSpace, alpha: complex) -> np.ndarray:
    """``D(alpha) = exp(alpha a^dagger - alpha^* a)`` on the truncated space."""
    alpha = complex(alpha)
    tail = poisson_tail(abs(alpha) ** 2, space.dim)
    if tail > TAIL_WARN:
        warnings.warn(
            f"coherent tail mass {tail:.3g} beyond level {space.dim - 1} for |alpha|={abs(alpha):.4g}",
            TruncationWarning,
            stacklevel=2,
        )
    a = annihilation_matrix(space)
    return matrix_exponential(alpha * a.conj().T - alpha.conjugate() * a)


def tensor_product(A, B) -> np.ndarray:
    return np.kron(np.asarray(A), np.asarray(B))


def apply_creation_sandwich(rho: DensityOp) -> DensityOp:
    """Return the unnormalized ``a^dagger rho a``."""
    top = float(rho.matrix[-1, -1].real)
    if top > TAIL_WARN:
        warnings.warn(
            f"level {rho.space.dim - 1} holds population {top:.3g}; a^dagger truncates it",
            TruncationWarning,
            stacklevel=2,
        )
    ad = creation_matrix(rho.space)
    return DensityOp(rho.space, ad @ rho.matrix @ ad.conj().T)


def normalize(rho: DensityOp) -> DensityOp:
    tr = rho.trace
    if tr <= 1e-14:
        raise ZeroTrace(f"trace {tr:.3g} is not positive")
    return DensityOp(rho.space, rho.matrix / tr)
