"""Constructors for the state families: Fock, coherent, photon-added coherent,
thermal, photon-added thermal and its low-temperature approximants."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import gammaln

from .exceptions import DomainError, IndexOutOfSpace, TruncationWarning
from .fock import (
    TAIL_WARN,
    DensityOp,
    FockSpace,
    Ket,
    apply_creation_sandwich,
    creation_matrix,
    normalize,
)

DEFAULT_TAIL = 1e-12
HEADROOM = 4
LOW_T_X_MAX = 0.25


class Kind(str, enum.Enum):
    FOCK = "fock"
    COHERENT = "coherent"
    PACS = "pacs"
    THERMAL = "thermal"
    PA_THERMAL = "pa_thermal"
    PA_THERMAL_ORDER1 = "pa_thermal_order1"
    PA_THERMAL_ORDER2 = "pa_thermal_order2"

    @property
    def thermal_family(self) -> bool:
        return self in (Kind.THERMAL, Kind.PA_THERMAL, Kind.PA_THERMAL_ORDER1, Kind.PA_THERMAL_ORDER2)


@dataclass(frozen=True)
class StateSpec:
    """Parameters of one state family member.

    ``alpha`` is used by coherent/pacs, ``x`` by the thermal family, ``m`` is
    the number of added photons (pacs) and ``n`` the Fock level.
    """

    kind: Kind
    alpha: complex = 0j
    x: float = 0.0
    m: int = 1
    n: int = 0
    dim_override: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "x", float(self.x))
        if not (0.0 <= self.x < 1.0) or not math.isfinite(self.x):
            raise DomainError(f"x must lie in [0, 1), got {self.x}")
        if not np.isfinite(self.alpha):
            raise DomainError(f"alpha must be finite, got {self.alpha}")
        if self.m < 0 or (self.kind is Kind.PACS and self.m < 1):
            raise DomainError(f"photon-added coherent state needs m >= 1, got {self.m}")
        if self.n < 0:
            raise DomainError(f"Fock level must be >= 0, got {self.n}")
        if self.dim_override is not None and self.dim_override < 2:
            raise DomainError(f"dim must be >= 2, got {self.dim_override}")
        if self.kind is Kind.PA_THERMAL_ORDER1 and self.x > 0.5:
            raise DomainError("first-order approximant has a negative weight for x > 0.5")

    def replace(self, **changes) -> StateSpec:
        fields = dict(
            kind=self.kind, alpha=self.alpha, x=self.x, m=self.m, n=self.n,
            dim_override=self.dim_override,
        )
        fields.update(changes)
        return StateSpec(**fields)

    def label(self) -> str:
        k = self.kind
        if k is Kind.FOCK:
            return f"fock:n={self.n}"
        if k is Kind.COHERENT:
            return f"coherent:alpha={_fmt_complex(self.alpha)}"
        if k is Kind.PACS:
            return f"pacs:alpha={_fmt_complex(self.alpha)},m={self.m}"
        return f"{k.value}:x={self.x:g}"


def _fmt_complex(z: complex) -> str:
    if z.imag == 0:
        return f"{z.real:g}"
    return f"{z.real:g}{z.imag:+g}i"


def _first_below(tails: np.ndarray, tol: float) -> int:
    hits = np.nonzero(tails < tol)[0]
    if len(hits) == 0:
        raise DomainError("could not find a truncation meeting the tail tolerance")
    return int(hits[0])


def coherent_cutoff(mean: float, tol: float) -> int:
    """Smallest N with Poisson(mean) mass at levels >= N below ``tol``."""
    if mean == 0:
        return 1
    hi = int(mean + 40 * math.sqrt(mean) + 80)
    n = np.arange(hi + 1)
    p = np.exp(-mean + n * math.log(mean) - gammaln(n + 1))
    tails = np.append(np.cumsum(p[::-1])[::-1], 0.0)
    return _first_below(tails, tol)


def thermal_cutoff(x: float, tol: float, added: int = 0) -> int:
    """Smallest N whose thermal (added=0) or photon-added thermal (added=1) tail is below tol."""
    if x == 0:
        return 1 + added
    N = np.arange(1, 20000)
    if added == 0:
        tails = N * math.log(x)
    else:
        # sum_{k>=N} (1-x)^2 k x^(k-1) = x^(N-1) (N(1-x) + x)
        tails = (N - 1) * math.log(x) + np.log(N * (1 - x) + x)
    return int(N[_first_below(tails, math.log(tol))])


def adaptive_dim(spec: StateSpec, tail: float = DEFAULT_TAIL, headroom: int = HEADROOM) -> int:
    """Truncation for ``spec``: tail population below ``tail``, plus headroom levels."""
    if spec.dim_override is not None:
        return spec.dim_override
    k = spec.kind
    if k is Kind.FOCK:
        base = spec.n + 1
    elif k is Kind.COHERENT:
        base = coherent_cutoff(abs(spec.alpha) ** 2, tail)
    elif k is Kind.PACS:
        base = coherent_cutoff(abs(spec.alpha) ** 2, tail) + spec.m
    elif k is Kind.THERMAL:
        base = thermal_cutoff(spec.x, tail)
    elif k is Kind.PA_THERMAL:
        base = thermal_cutoff(spec.x, tail, added=1)
    elif k is Kind.PA_THERMAL_ORDER1:
        base = 3
    else:
        base = 4
    return max(2, base + headroom)


def fock_state(space: FockSpace, n: int) -> Ket:
    if not 0 <= n < space.dim:
        raise IndexOutOfSpace(f"level {n} is outside a space of dim {space.dim}")
    amps = np.zeros(space.dim, dtype=complex)
    amps[n] = 1.0
    return Ket(space, amps)


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Untruncated expansion coefficients ``e^{-|a|^2/2} a^n / sqrt(n!)`` for n < dim."""
    alpha = complex(alpha)
    out = np.zeros(dim, dtype=complex)
    r = abs(alpha)
    if r == 0:
        out[0] = 1.0
        return out
    n = np.arange(dim)
    mag = np.exp(-0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1))
    return mag * np.exp(1j * n * np.angle(alpha))


def coherent_state(space: FockSpace, alpha: complex) -> Ket:
    amps = coherent_amplitudes(alpha, space.dim)
    lost = 1.0 - float(np.sum(np.abs(amps) ** 2))
    if lost > TAIL_WARN:
        warnings.warn(
            f"coherent state |alpha|={abs(alpha):.4g} loses {lost:.3g} beyond level {space.dim - 1}",
            TruncationWarning,
            stacklevel=2,
        )
    return Ket(space, amps).normalized()


def add_photons(ket: Ket, m: int) -> Ket:
    """Unnormalized ``(a^dagger)^m |ket>`` in the same space."""
    ad = creation_matrix(ket.space)
    v = ket.amplitudes
    for _ in range(m):
        v = ad @ v
    return Ket(ket.space, v)


def pacs(space: FockSpace, alpha: complex, m: int) -> Ket:
    """Normalized m-photon-added coherent state."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    # build in a space m levels larger so the ladder products are exact, then cut back
    wide = FockSpace(space.dim + m)
    raw = add_photons(coherent_state(FockSpace(space.dim), alpha).embed(wide), m)
    total = raw.norm_squared()
    kept = raw.embed(space)
    lost = 1.0 - kept.norm_squared() / total
    if lost > TAIL_WARN:
        warnings.warn(
            f"photon-added state loses {lost:.3g} beyond level {space.dim - 1}",
            TruncationWarning,
            stacklevel=2,
        )
    return kept.normalized()


def _check_x(x: float):
    if not (0.0 <= x < 1.0):
        raise DomainError(f"x must lie in [0, 1), got {x}")


def thermal_state(space: FockSpace, x: float) -> DensityOp:
    _check_x(x)
    n = np.arange(space.dim)
    p = (1 - x) * x ** n
    lost = 1.0 - p.sum()
    if lost > TAIL_WARN:
        warnings.warn(
            f"thermal state x={x:g} loses {lost:.3g} beyond level {space.dim - 1}",
            TruncationWarning,
            stacklevel=2,
        )
    return DensityOp(space, np.diag(p / p.sum()))


def pa_thermal(space: FockSpace, x: float) -> DensityOp:
    return normalize(apply_creation_sandwich(thermal_state(space, x)))


def low_t_populations(x: float, order: int) -> np.ndarray:
    """Literal low-temperature expansion weights on levels 0..3 (not renormalized)."""
    if order == 1:
        return np.array([0.0, 1 - 2 * x, 2 * x, 0.0])
    if order == 2:
        return np.array([0.0, 1 - 2 * x, 2 * x * (1 - 2 * x), 3 * x * x]) / (1 - x * x)
    raise DomainError(f"order must be 1 or 2, got {order}")


def low_t_trace_defect(x: float, order: int) -> float:
    return float(low_t_populations(x, order).sum() - 1.0)


def pa_thermal_low_t(space: FockSpace, x: float, order: int, x_max: float = LOW_T_X_MAX) -> DensityOp:
    """Photon-added thermal state expanded to first or second order in x, renormalized."""
    _check_x(x)
    if order == 1 and x > 0.5:
        raise DomainError("first-order approximant has a negative weight for x > 0.5")
    if x > x_max:
        raise DomainError(f"low-temperature expansion used outside x <= {x_max}: x={x}")
    p = low_t_populations(x, order)
    if space.dim < order + 2:
        raise IndexOutOfSpace(f"order {order} needs dim >= {order + 2}")
    diag = np.zeros(space.dim)
    diag[:4] = p[: min(4, space.dim)]
    diag /= diag.sum()
    return DensityOp(space, np.diag(diag))


def build_state(spec: StateSpec, tail: float = DEFAULT_TAIL, headroom: int = HEADROOM) -> Union[Ket, DensityOp]:
    """Construct the state described by ``spec`` at its adaptive truncation."""
    space = FockSpace(adaptive_dim(spec, tail, headroom))
    k = spec.kind
    if k is Kind.FOCK:
        return fock_state(space, spec.n)
    if k is Kind.COHERENT:
        return coherent_state(space, spec.alpha)
    if k is Kind.PACS:
        return pacs(space, spec.alpha, spec.m)
    if k is Kind.THERMAL:
        return thermal_state(space, spec.x)
    if k is Kind.PA_THERMAL:
        return pa_thermal(space, spec.x)
    order = 1 if k is Kind.PA_THERMAL_ORDER1 else 2
    return pa_thermal_low_t(space, spec.x, order)


def as_density(state: Union[Ket, DensityOp]) -> DensityOp:
    return state.to_density() if isinstance(state, Ket) else state


def trace_distance(rho: DensityOp, sigma: DensityOp) -> float:
    d = max(rho.space.dim, sigma.space.dim)
    space = FockSpace(d)
    diff = rho.embed(space).matrix - sigma.embed(space).matrix
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())
