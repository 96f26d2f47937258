"""Entanglement potential: mix a single-mode state with vacuum on a 50:50
beam splitter, partially transpose, and take the logarithmic negativity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Tuple, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from .exceptions import DimensionMismatch, NotHermitian, ProblemTooLarge
from .fock import DensityOp, FockSpace, Ket, TwoModeDensityOp, matrix_exponential
from .states import HEADROOM, StateSpec, adaptive_dim, as_density, build_state

EP_TAIL = 1e-20
EP_MIN_DIM = 16
NEG_THRESHOLD = 1e-10
# largest two-mode dimension handed to the dense eigensolver
MAX_TWO_MODE_DIM = 4096


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", tuple(sorted((float(v) for v in self.eigenvalues), reverse=True)))

    def negative(self, threshold: float = NEG_THRESHOLD) -> Tuple[float, ...]:
        return tuple(v for v in self.eigenvalues if v <= -threshold)

    def nonzero(self, threshold: float = 1e-9) -> Tuple[float, ...]:
        return tuple(v for v in self.eigenvalues if abs(v) > threshold)

    @property
    def total(self) -> float:
        return math.fsum(self.eigenvalues)


@dataclass(frozen=True)
class EPResult:
    negativity: float
    trace_norm: float
    ep_bits: float

    @classmethod
    def from_negativity(cls, negativity: float) -> EPResult:
        tn = 1.0 + 2.0 * negativity
        return cls(negativity, tn, math.log2(tn))


def _sector(k: int, dim: int):
    """Basis ``(n, k-n)`` of the total-photon-number-k block of two dim-level modes."""
    return [(n, k - n) for n in range(max(0, k - dim + 1), min(k, dim - 1) + 1)]


@lru_cache(maxsize=4096)
def _sector_unitary(k: int, dim: int) -> np.ndarray:
    # generator a b^dag - a^dag b; this sign gives U a^dag U^dag = (a^dag + b^dag)/sqrt(2)
    basis = _sector(k, dim)
    pos = {s: i for i, s in enumerate(basis)}
    G = np.zeros((len(basis), len(basis)))
    for j, (n, m) in enumerate(basis):
        if n > 0 and (n - 1, m + 1) in pos:
            G[pos[(n - 1, m + 1)], j] += math.sqrt(n * (m + 1))
        if m > 0 and (n + 1, m - 1) in pos:
            G[pos[(n + 1, m - 1)], j] -= math.sqrt((n + 1) * m)
    U = np.real_if_close(matrix_exponential(math.pi / 4 * G))
    U.setflags(write=False)
    return U


def beam_splitter_unitary(space_a: FockSpace, space_b: FockSpace) -> np.ndarray:
    """50:50 beam splitter on two truncated modes, built block by block.

    The generator conserves total photon number, so each number sector is
    exponentiated on its own; sectors with total < dim are complete and exact.
    """
    if space_a.dim != space_b.dim:
        raise DimensionMismatch(f"beam splitter needs equal dims, got {space_a.dim} and {space_b.dim}")
    dim = space_a.dim
    U = np.zeros((dim * dim, dim * dim))
    for k in range(2 * dim - 1):
        idx = [n * dim + m for n, m in _sector(k, dim)]
        U[np.ix_(idx, idx)] = _sector_unitary(k, min(dim, k + 1))
    return U


def _split_column(n: int) -> np.ndarray:
    """Amplitudes of ``U |n, 0>`` on the sector basis ``|a, n-a>``, a = 0..n."""
    return _sector_unitary(n, n + 1)[:, n]


def _vacuum_isometry(dim: int, keep_a: int = None, keep_b: int = None) -> np.ndarray:
    """Columns ``U |n, 0>`` for n < dim, restricted to output levels
    ``a < keep_a``, ``b < keep_b``; shape ``(keep_a * keep_b, dim)``."""
    ka = dim if keep_a is None else keep_a
    kb = dim if keep_b is None else keep_b
    V = np.zeros((ka * kb, dim))
    for n in range(dim):
        col = _split_column(n)
        a = np.arange(max(0, n - kb + 1), min(n, ka - 1) + 1)
        V[a * kb + (n - a), n] = col[a]
    return V


def mix_with_vacuum(sigma: Union[DensityOp, Ket]) -> TwoModeDensityOp:
    """``U (sigma x |0><0|) U^dagger`` on two modes of sigma's dimension."""
    sigma = as_density(sigma)
    V = _vacuum_isometry(sigma.space.dim)
    return TwoModeDensityOp(sigma.space, sigma.space, V @ sigma.matrix @ V.T)


def _output_marginals(populations: np.ndarray):
    # U|n,0> lives in the total-n sector, so output populations only need sigma's diagonal
    dim = len(populations)
    pa = np.zeros(dim)
    pb = np.zeros(dim)
    for n in range(dim):
        w = populations[n] * _split_column(n) ** 2
        pa[: n + 1] += w
        pb[: n + 1] += w[::-1]
    return pa, pb


def _keep_levels(pops: np.ndarray, tail: float) -> int:
    tails = np.cumsum(pops[::-1])[::-1]
    over = np.nonzero(tails >= tail)[0]
    return max(int(over[-1]) + 1 if len(over) else 1, 2)


def _mixed_trimmed(sigma: DensityOp, tail: float) -> TwoModeDensityOp:
    """Mix with vacuum, keeping only output levels whose marginal tail mass is at least ``tail``."""
    dim = sigma.space.dim
    pa, pb = _output_marginals(np.diagonal(sigma.matrix).real)
    ka, kb = min(_keep_levels(pa, tail), dim), min(_keep_levels(pb, tail), dim)
    if ka * kb > MAX_TWO_MODE_DIM:
        raise ProblemTooLarge(
            f"two-mode dimension {ka}x{kb} exceeds the dense limit {MAX_TWO_MODE_DIM}; "
            "lower the truncation with an explicit dim"
        )
    V = _vacuum_isometry(dim, ka, kb)
    rho = V @ sigma.matrix @ V.T
    rho /= np.trace(rho).real
    return TwoModeDensityOp(FockSpace(ka), FockSpace(kb), rho)


def rho0_fixture(alpha: complex, dim: int) -> TwoModeDensityOp:
    """Beam-splitter output of the single-photon-added coherent state with the
    local displacements removed: support on ``|00>, |10>, |01>``."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    alpha = complex(alpha)
    s2 = math.sqrt(2.0)
    block = np.array(
        [
            [2 * abs(alpha) ** 2, s2 * alpha.conjugate(), s2 * alpha.conjugate()],
            [s2 * alpha, 1, 1],
            [s2 * alpha, 1, 1],
        ],
        dtype=complex,
    ) / (2 * (1 + abs(alpha) ** 2))
    idx = [0, 1 * dim + 0, 0 * dim + 1]
    M = np.zeros((dim * dim, dim * dim), dtype=complex)
    M[np.ix_(idx, idx)] = block
    space = FockSpace(dim)
    return TwoModeDensityOp(space, space, M)


def partial_transpose(rho: TwoModeDensityOp) -> np.ndarray:
    """Transpose on mode b: ``((n,m),(n',m')) -> ((n,m'),(n',m))``."""
    da, db = rho.space_a.dim, rho.space_b.dim
    t = np.asarray(rho.matrix).reshape(da, db, da, db).transpose(0, 3, 2, 1)
    return t.reshape(da * db, da * db)


def hermitian_spectrum(M) -> Spectrum:
    """All eigenvalues of a Hermitian matrix, descending.

    The matrix is split into its exact block-diagonal components first, which
    is free for Fock-diagonal inputs and harmless otherwise.
    """
    M = np.asarray(M)
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if M.size and np.max(np.abs(M - M.conj().T)) > 1e-10 * scale:
        raise NotHermitian("matrix is not Hermitian within 1e-10")
    if np.iscomplexobj(M) and not np.any(M.imag):
        M = M.real
    ncomp, labels = connected_components(M != 0, directed=False)
    eig = []
    for lab in range(ncomp):
        idx = np.nonzero(labels == lab)[0]
        if len(idx) == 1:
            eig.append(M[idx[0], idx[0]].real)
        else:
            eig.extend(np.linalg.eigvalsh(M[np.ix_(idx, idx)]))
    return Spectrum(tuple(eig))


def negativity_of(spectrum: Spectrum, threshold: float = NEG_THRESHOLD) -> float:
    return 0.0 - math.fsum(spectrum.negative(threshold))


def ep_of_two_mode(rho: TwoModeDensityOp) -> EPResult:
    return EPResult.from_negativity(negativity_of(hermitian_spectrum(partial_transpose(rho))))


def entanglement_potential(sigma: Union[DensityOp, Ket], tail: float = EP_TAIL) -> EPResult:
    """Logarithmic negativity of the state obtained by mixing ``sigma`` with vacuum."""
    return ep_of_two_mode(_mixed_trimmed(as_density(sigma), tail))


def ep_dim(spec: StateSpec) -> int:
    if spec.dim_override is not None:
        return spec.dim_override
    return max(adaptive_dim(spec, EP_TAIL, HEADROOM), EP_MIN_DIM)


def ep_state(spec: StateSpec):
    """State for ``spec`` at the truncation used for EP work."""
    return build_state(spec.replace(dim_override=ep_dim(spec)))


def entanglement_potential_of(spec: StateSpec) -> EPResult:
    return entanglement_potential(ep_state(spec))


def pt_spectrum_of(spec: StateSpec) -> Spectrum:
    return hermitian_spectrum(partial_transpose(_mixed_trimmed(as_density(ep_state(spec)), EP_TAIL)))


def ep_spacs_closed(alpha: complex) -> float:
    a2 = abs(complex(alpha)) ** 2
    return math.log2((2 + a2) / (1 + a2))


def schmidt_ep_pure(psi, dim_a: int, dim_b: int = None) -> float:
    """EP of a pure two-mode state from its Schmidt coefficients.

    For a pure state the partial-transpose trace norm is ``(sum_i s_i)^2``
    with ``s_i`` the singular values of the amplitude matrix.
    """
    dim_b = dim_a if dim_b is None else dim_b
    amps = np.asarray(psi, dtype=complex).reshape(dim_a, dim_b)
    s = np.linalg.svd(amps, compute_uv=False)
    s = s / np.sqrt(np.sum(s * s))
    return math.log2(max(float(np.sum(s)) ** 2, 1.0))


def split_pure(ket: Ket) -> np.ndarray:
    """Amplitudes of ``U (|psi> x |0>)`` as a flat two-mode vector."""
    return _vacuum_isometry(ket.space.dim) @ ket.amplitudes


def ep_sweep(template: StateSpec, param: str, values: Iterable) -> List[Tuple[float, EPResult]]:
    """EP for ``template`` with ``param`` ('alpha', 'x' or 'm') set to each value."""
    if param not in ("alpha", "x", "m"):
        raise ValueError(f"cannot sweep {param!r}")
    rows = []
    for v in values:
        v = int(v) if param == "m" else float(v)
        rows.append((v, entanglement_potential_of(template.replace(**{param: v}))))
    return rows
