"""The acceptance checks behind ``photonadd validate``.

Each ``check_*`` function returns a list of :class:`Check` rows. Rows marked
``report_only`` carry a number for the record and never fail.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from . import entpot, states, wigner
from .fock import FockSpace
from .states import Kind, StateSpec

ALPHAS_FIG = (0.1, 0.9, 3.0)
XS_FIG = (0.1, 0.5, 0.9)


@dataclass(frozen=True)
class Check:
    name: str
    target: float
    actual: float
    tolerance: float
    passed: bool
    report_only: bool = False


def _close(name, target, actual, tol) -> Check:
    return Check(name, float(target), float(actual), float(tol), bool(abs(actual - target) <= tol))


def _flag(name, ok: bool) -> Check:
    return Check(name, 1.0, 1.0 if ok else 0.0, 0.0, bool(ok))


def check_spacs_ep_closed_form() -> List[Check]:
    rows = []
    for a in np.arange(13) * 0.25:
        ep = entpot.entanglement_potential_of(StateSpec(Kind.PACS, alpha=a, m=1)).ep_bits
        rows.append(_close(f"ep_spacs_closed alpha={a:g}", entpot.ep_spacs_closed(a), ep, 1e-6))
    ep0 = entpot.entanglement_potential_of(StateSpec(Kind.PACS, alpha=0.0, m=1)).ep_bits
    rows.append(_close("ep_spacs alpha=0 equals 1", 1.0, ep0, 1e-9))
    ep1 = entpot.entanglement_potential_of(StateSpec(Kind.PACS, alpha=1.0, m=1)).ep_bits
    rows.append(_close("ep_spacs alpha=1 equals log2(3/2)", math.log2(1.5), ep1, 1e-6))
    return rows


def check_pt_spectrum_fixture() -> List[Check]:
    s3 = math.sqrt(3.0)
    expected = sorted([(2 + s3) / 4, 0.25, -0.25, (2 - s3) / 4], reverse=True)
    spec = entpot.hermitian_spectrum(entpot.partial_transpose(entpot.rho0_fixture(1.0, 4)))
    got = spec.nonzero()
    ok_len = len(got) == 4
    rows = [_flag("pt_fixture alpha=1 has four nonzero eigenvalues", ok_len)]
    if ok_len:
        for e, g in zip(expected, got):
            rows.append(_close(f"pt_fixture alpha=1 eigenvalue {e:.6f}", e, g, 1e-10))
    for a in list(np.arange(13) * 0.25) + [1 + 1j, 0.5j, -2.0]:
        sp = entpot.hermitian_spectrum(entpot.partial_transpose(entpot.rho0_fixture(a, 4)))
        n_neg = len(sp.negative())
        rows.append(Check(f"pt_fixture alpha={a} negative count", 1.0, float(n_neg), 0.0, n_neg == 1))
    return rows


def _max_diff(spec: StateSpec, grid: wigner.PhaseGrid) -> float:
    # raw arrays, so a broken closed form shows up as a difference rather than a bound violation
    Q, P = grid.mesh()
    closed = wigner.closed_form(spec, Q, P)
    numeric = wigner.wigner_numeric_grid(states.build_state(spec, tail=wigner.NUMERIC_TAIL), Q, P)
    return float(np.max(np.abs(closed - numeric)))


def check_wigner_cross_validation() -> List[Check]:
    grid = wigner.PhaseGrid.square(4.0, 81)
    rows = []
    for m in (1, 2):
        for a in ALPHAS_FIG:
            spec = StateSpec(Kind.PACS, alpha=a, m=m)
            rows.append(_close(f"wigner closed-vs-numeric {spec.label()}", 0.0, _max_diff(spec, grid), 1e-8))
    for kind in (Kind.THERMAL, Kind.PA_THERMAL):
        for x in XS_FIG:
            spec = StateSpec(kind, x=x)
            rows.append(_close(f"wigner closed-vs-numeric {spec.label()}", 0.0, _max_diff(spec, grid), 1e-8))
    return rows


def check_spacs_negativity_predicate() -> List[Check]:
    rows = []
    for a in ALPHAS_FIG:
        spec = StateSpec(Kind.PACS, alpha=a, m=1)
        field = wigner.evaluate_field(spec, wigner.default_grid(spec), "closed")
        rep = wigner.negativity_region_report(a, field)
        rows.append(Check(f"spacs sign predicate alpha={a:g}", 1.0, rep.agreement, 0.0, rep.agreement == 1.0))
    return rows


def check_pa_thermal_origin_dip() -> List[Check]:
    rows = []
    for x in XS_FIG:
        b = (1 - x) / (1 + x)
        target = -b * b / math.pi
        rows.append(_close(f"pa_thermal origin closed x={x:g}", target, wigner.wigner_pa_thermal_closed(x, 0.0, 0.0), 1e-10))
        rho = states.build_state(StateSpec(Kind.PA_THERMAL, x=x))
        rows.append(_close(f"pa_thermal origin numeric x={x:g}", target, wigner.wigner_numeric(rho, 0.0, 0.0), 1e-10))
    return rows


def normalization_specs() -> List[StateSpec]:
    out = [StateSpec(Kind.FOCK, n=1), StateSpec(Kind.FOCK, n=3), StateSpec(Kind.COHERENT, alpha=1.0)]
    out += [StateSpec(Kind.PACS, alpha=a, m=m) for m in (1, 2) for a in ALPHAS_FIG]
    out += [StateSpec(k, x=x) for k in (Kind.THERMAL, Kind.PA_THERMAL) for x in XS_FIG]
    out += [StateSpec(k, x=0.1) for k in (Kind.PA_THERMAL_ORDER1, Kind.PA_THERMAL_ORDER2)]
    return out


def check_normalization() -> List[Check]:
    rows = []
    for spec in normalization_specs():
        ev = "closed" if wigner.has_closed_form(spec) else "numeric"
        field = wigner.evaluate_field(spec, wigner.default_grid(spec), ev)
        rows.append(_close(f"normalization {spec.label()} ({ev})", 1.0, wigner.integrate_field(field), 1e-3))
    return rows


def check_monotonicity() -> List[Check]:
    sweep = entpot.ep_sweep(StateSpec(Kind.PACS, m=1), "alpha", np.linspace(0.0, 3.0, 61))
    eps = [r.ep_bits for _, r in sweep]
    rows = [_flag("ep spacs strictly decreasing on alpha in [0,3] (61 pts)", all(a > b for a, b in zip(eps, eps[1:])))]
    at = {m: entpot.entanglement_potential_of(StateSpec(Kind.PACS, alpha=0.2, m=m)).ep_bits for m in (1, 2, 3)}
    rows.append(_flag("ep ordering m=3 > m=2 > m=1 at alpha=0.2", at[3] > at[2] > at[1]))
    far = {m: entpot.entanglement_potential_of(StateSpec(Kind.PACS, alpha=3.0, m=m)).ep_bits for m in (1, 3)}
    gap = abs(far[3] - far[1])
    rows.append(Check("ep convergence |m=3 - m=1| < 0.05 at alpha=3", 0.0, gap, 0.05, gap < 0.05))
    th = entpot.ep_sweep(StateSpec(Kind.PA_THERMAL), "x", np.linspace(0.0, 0.25, 26))
    eps = [r.ep_bits for _, r in th]
    rows.append(_flag("ep pa_thermal strictly decreasing on x in [0,0.25] (26 pts)", all(a > b for a, b in zip(eps, eps[1:]))))
    return rows


def check_classicality() -> List[Check]:
    rows = []
    specs = [StateSpec(Kind.COHERENT, alpha=a) for a in (0.0, 0.5, 1.0, 2.0, 3.0, 1 + 1j)]
    specs += [StateSpec(Kind.THERMAL, x=x) for x in (0.0, 0.1, 0.3, 0.5)]
    for spec in specs:
        ep = entpot.entanglement_potential_of(spec).ep_bits
        rows.append(_close(f"classical ep {spec.label()}", 0.0, ep, 1e-9))
    return rows


def check_fock_oracle() -> List[Check]:
    rows = [_close("ep fock n=1", 1.0, entpot.entanglement_potential_of(StateSpec(Kind.FOCK, n=1)).ep_bits, 1e-9)]
    target = math.log2((6 + 4 * math.sqrt(2)) / 4)
    ket = states.fock_state(FockSpace(8), 2)
    schmidt = entpot.schmidt_ep_pure(entpot.split_pure(ket), 8)
    rows.append(_close("schmidt oracle fock n=2", target, schmidt, 1e-12))
    rows.append(_close("ep fock n=2 vs schmidt oracle", schmidt, entpot.entanglement_potential_of(StateSpec(Kind.FOCK, n=2)).ep_bits, 1e-8))
    return rows


def low_t_slopes():
    xs = np.arange(1, 11) * 0.02
    dists = {1: [], 2: []}
    for x in xs:
        exact = states.build_state(StateSpec(Kind.PA_THERMAL, x=x))
        for order in (1, 2):
            approx = states.pa_thermal_low_t(FockSpace(8), x, order)
            dists[order].append(states.trace_distance(exact, approx))
    return {o: float(np.polyfit(np.log(xs), np.log(d), 1)[0]) for o, d in dists.items()}


def check_low_t_approximants() -> List[Check]:
    slopes = low_t_slopes()
    rows = [
        _close("low-T order 1 trace-distance slope", 2.0, slopes[1], 0.3),
        _close("low-T order 2 trace-distance slope", 3.0, slopes[2], 0.3),
    ]
    for x in (0.1, 0.25):
        d = states.low_t_trace_defect(x, 2)
        rows.append(Check(f"low-T order 2 trace defect x={x:g} (report)", 0.0, d, math.nan, True, report_only=True))
    return rows


CRITERIA: Dict[str, Callable[[], List[Check]]] = {
    "1_spacs_ep_closed_form": check_spacs_ep_closed_form,
    "2_pt_spectrum_fixture": check_pt_spectrum_fixture,
    "3_wigner_cross_validation": check_wigner_cross_validation,
    "4_spacs_negativity_predicate": check_spacs_negativity_predicate,
    "5_pa_thermal_origin_dip": check_pa_thermal_origin_dip,
    "6_normalization": check_normalization,
    "7_monotonicity": check_monotonicity,
    "8_classicality": check_classicality,
    "9_fock_oracle": check_fock_oracle,
    "10_low_t_approximants": check_low_t_approximants,
}


def run_all() -> List[Check]:
    """Every criterion in order; a criterion that raises becomes one failed row."""
    rows = []
    for key, fn in CRITERIA.items():
        try:
            rows.extend(fn())
        except Exception as exc:  # noqa: BLE001 - reported, not swallowed
            rows.append(Check(f"{key} raised {type(exc).__name__}: {exc}", math.nan, math.nan, math.nan, False))
    return rows


def _num(v: float) -> str:
    return "" if math.isnan(v) else f"{v:.17g}"


def report_csv(rows: List[Check]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "target", "actual", "tolerance", "pass"])
    for r in rows:
        w.writerow([r.name, _num(r.target), _num(r.actual), _num(r.tolerance), "report" if r.report_only else str(r.passed).lower()])
    return buf.getvalue()
