"""Command-line front end.

Verbs::

    photonadd wigner SPEC [--grid Q P] [--evaluator closed|numeric|both]
    photonadd ep SPEC [--sweep PARAM=a:b:n] [--compare-orders]
    photonadd spectrum SPEC
    photonadd validate

SPEC follows ``kind[:key=value,...]``, e.g. ``pacs:alpha=0.9,m=1`` or
``thermal:x=0.5``. Data goes to ``--out`` or to standard output; all
diagnostics go to standard error.

Exit codes: 0 success, 1 validation failure, 2 usage or domain error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import re
import sys
import warnings
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import entpot, validation, wigner
from .exceptions import (
    DomainError,
    NotHermitian,
    ParseError,
    ProblemTooLarge,
    TruncationWarning,
    UnsupportedClosedForm,
    ZeroTrace,
)
from .states import LOW_T_X_MAX, Kind, StateSpec, low_t_trace_defect
from .svg import heatmap, line_plot

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

KINDS = {
    "fock": Kind.FOCK,
    "coherent": Kind.COHERENT,
    "pacs": Kind.PACS,
    "thermal": Kind.THERMAL,
    "pa_thermal": Kind.PA_THERMAL,
    "pa_thermal_o1": Kind.PA_THERMAL_ORDER1,
    "pa_thermal_o2": Kind.PA_THERMAL_ORDER2,
    "pa_thermal_order1": Kind.PA_THERMAL_ORDER1,
    "pa_thermal_order2": Kind.PA_THERMAL_ORDER2,
}

_THERMAL_KEYS = {"x", "dim"}
ALLOWED_KEYS = {
    Kind.FOCK: {"n", "dim"},
    Kind.COHERENT: {"alpha", "dim"},
    Kind.PACS: {"alpha", "m", "dim"},
    Kind.THERMAL: _THERMAL_KEYS,
    Kind.PA_THERMAL: _THERMAL_KEYS,
    Kind.PA_THERMAL_ORDER1: _THERMAL_KEYS,
    Kind.PA_THERMAL_ORDER2: _THERMAL_KEYS,
}
ALL_KEYS = {"alpha", "x", "m", "n", "dim"}

_COMPLEX_RE = re.compile(r"^[0-9eE.+\-i]+$")


class UsageError(Exception):
    pass


def _parse_alpha(text: str, pos: int) -> complex:
    if not _COMPLEX_RE.match(text):
        raise ParseError(f"invalid alpha {text!r}", pos)
    t = text
    if t.endswith("i"):
        t = t[:-1] + "j"
        # bare "i", "+i", "1-i" mean a unit imaginary part
        if t[-2:-1] in ("", "+", "-"):
            t = t[:-1] + "1j"
    if "i" in t:
        raise ParseError(f"invalid alpha {text!r}", pos)
    try:
        z = complex(t)
    except ValueError:
        raise ParseError(f"invalid alpha {text!r}; expected real or re+imi", pos) from None
    return z


def _parse_value(key: str, text: str, pos: int):
    if key == "alpha":
        return _parse_alpha(text, pos)
    if key == "x":
        try:
            v = float(text)
        except ValueError:
            raise ParseError(f"invalid number {text!r} for x", pos) from None
        if not math.isfinite(v):
            raise ParseError(f"x must be finite, got {text!r}", pos)
        return v
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{key} must be an integer, got {text!r}", pos) from None


def parse_state_spec(text: str) -> StateSpec:
    """Parse ``kind[:key=value,...]`` into a :class:`StateSpec`.

    Raises
    ------
    ParseError
        Malformed text, unknown kind or key, or a key that does not apply
        to the kind. ``position`` points at the offending character.
    DomainError
        Well-formed but out-of-range values (``x >= 1``, ``m < 1`` for pacs).
    """
    head, sep, rest = text.partition(":")
    if head not in KINDS:
        raise ParseError(f"unknown state kind {head!r}", 0)
    kind = KINDS[head]
    values = {}
    if sep:
        if not rest:
            raise ParseError("expected key=value after ':'", len(text))
        pos = len(head) + 1
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not key:
                raise ParseError("empty key", pos)
            if not eq:
                raise ParseError(f"expected '=' after {key!r}", pos + len(item))
            if key not in ALL_KEYS:
                raise ParseError(f"unknown key {key!r}", pos)
            if key not in ALLOWED_KEYS[kind]:
                raise ParseError(f"key {key!r} does not apply to {head}", pos)
            if key in values:
                raise ParseError(f"duplicate key {key!r}", pos)
            vpos = pos + len(key) + 1
            if not val:
                raise ParseError(f"missing value for {key!r}", vpos)
            values[key] = _parse_value(key, val, vpos)
            pos += len(item) + 1
    if "dim" in values:
        values["dim_override"] = values.pop("dim")
    return StateSpec(kind, **values)


def parse_axis(text: str) -> Tuple[float, float, int]:
    """``min:max:count`` for one grid axis."""
    parts = text.strip().split(":")
    if len(parts) != 3:
        raise UsageError(f"grid axis {text.strip()!r} must look like min:max:count")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid axis {text.strip()!r} must look like min:max:count") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise UsageError(f"grid axis {text.strip()!r} needs finite min < max")
    if n < 2:
        raise UsageError(f"grid axis {text.strip()!r} needs count >= 2")
    return lo, hi, n


def parse_sweep(text: str) -> Tuple[str, np.ndarray]:
    """``param=a:b:n`` into the parameter name and its values."""
    param, eq, rng = text.strip().partition("=")
    if param not in ("alpha", "x", "m") or not eq:
        raise UsageError(f"sweep {text.strip()!r} must look like alpha|x|m=start:stop:count")
    parts = rng.split(":")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError):
        raise UsageError(f"sweep range {rng!r} must look like start:stop:count") from None
    if len(parts) != 3 or not (math.isfinite(a) and math.isfinite(b)) or n < 1:
        raise UsageError(f"sweep range {rng!r} needs finite bounds and count >= 1")
    if n == 1 and a != b:
        raise UsageError("a single-point sweep needs start == stop")
    values = np.linspace(a, b, n)
    if param == "m":
        if not np.allclose(values, np.round(values)):
            raise UsageError("m sweep must land on integers")
        values = np.round(values).astype(int)
    return param, values


def _num(v: float) -> str:
    return f"{float(v):.17g}"


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def wigner_csv(field: wigner.WignerField) -> str:
    Q, P = field.grid.mesh()
    rows = ((_num(q), _num(p), _num(v)) for q, p, v in zip(Q.ravel(), P.ravel(), field.values.ravel()))
    return _csv_text(["q", "p", "w"], rows)


def _stem(out: Optional[str], default: str) -> Path:
    if out is None:
        return Path(default)
    path = Path(out)
    return path.with_suffix("") if path.suffix in (".csv", ".svg") else path


def _write(path: Path, text: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {path}", file=sys.stderr)


def _emit(args, csv_text: str, svg_text: Optional[str], default_stem: str, suffix: str = "") -> None:
    """Route CSV/SVG output: stdout for a lone CSV without ``--out``, files otherwise."""
    if args.format == "csv" and args.out is None and not suffix:
        sys.stdout.write(csv_text)
        return
    stem = _stem(args.out, default_stem)
    stem = stem.with_name(stem.name + suffix)
    if args.format in ("csv", "both"):
        _write(stem.with_name(stem.name + ".csv"), csv_text)
    if args.format in ("svg", "both") and svg_text is not None:
        _write(stem.with_name(stem.name + ".svg"), svg_text)


def _with_dim(spec: StateSpec, dim: Optional[int]) -> StateSpec:
    return spec if dim is None else spec.replace(dim_override=dim)


def cmd_wigner(args) -> int:
    spec = _with_dim(parse_state_spec(args.spec), args.dim)
    if args.grid is None:
        grid = wigner.default_grid(spec)
    else:
        (q0, q1, nq), (p0, p1, np_) = (parse_axis(t) for t in args.grid)
        grid = wigner.PhaseGrid(q0, q1, p0, p1, nq, np_)
    evaluators = ["closed", "numeric"] if args.evaluator == "both" else [args.evaluator]
    if "closed" in evaluators and not wigner.has_closed_form(spec):
        raise UnsupportedClosedForm(f"no closed-form Wigner function for {spec.kind.value}; use --evaluator numeric")

    fields = {ev: wigner.evaluate_field(spec, grid, ev) for ev in evaluators}
    for ev, field in fields.items():
        svg_text = None
        if args.format in ("svg", "both"):
            svg_text = heatmap(field.values, grid.q_values(), grid.p_values(), f"W {spec.label()} ({ev})")
        suffix = f".{ev}" if len(fields) > 1 else ""
        _emit(args, wigner_csv(field), svg_text, "wigner", suffix)
    if len(fields) > 1:
        diff = float(np.max(np.abs(fields["closed"].values - fields["numeric"].values)))
        print(f"max |closed - numeric| = {diff:.3e} over {grid.nq * grid.np} points", file=sys.stderr)
    return EXIT_OK


def _ep_specs(args):
    template = _with_dim(parse_state_spec(args.spec), args.dim)
    if args.sweep is None:
        return template, None, [template]
    param, values = parse_sweep(args.sweep)
    if param == "alpha" and template.kind not in (Kind.COHERENT, Kind.PACS):
        raise UsageError(f"{template.kind.value} has no alpha to sweep")
    if param == "x" and not template.kind.thermal_family:
        raise UsageError(f"{template.kind.value} has no x to sweep")
    if param == "m" and template.kind is not Kind.PACS:
        raise UsageError("only pacs has m to sweep")
    specs = [template.replace(**{param: int(v) if param == "m" else float(v)}) for v in values]
    return template, (param, values), specs


def cmd_ep(args) -> int:
    template, sweep, specs = _ep_specs(args)
    if args.compare_orders:
        if template.kind is not Kind.PA_THERMAL:
            raise UsageError("--compare-orders needs a pa_thermal template")
        if sweep is not None and sweep[0] != "x":
            raise UsageError("--compare-orders sweeps x")
        if max(s.x for s in specs) > LOW_T_X_MAX:
            raise DomainError(f"low-temperature approximants are limited to x <= {LOW_T_X_MAX}")

    params = [_num(v) for v in sweep[1]] if sweep else [""]
    xaxis = list(sweep[1]) if sweep else [0.0]
    if args.compare_orders:
        rows, series = [], {"exact": [], "order 1": [], "order 2": []}
        for label, spec in zip(params, specs):
            exact = entpot.entanglement_potential_of(spec).ep_bits
            o1 = entpot.entanglement_potential_of(spec.replace(kind=Kind.PA_THERMAL_ORDER1)).ep_bits
            o2 = entpot.entanglement_potential_of(spec.replace(kind=Kind.PA_THERMAL_ORDER2)).ep_bits
            rows.append((label, _num(exact), _num(o1), _num(o2), _num(low_t_trace_defect(spec.x, 2))))
            for k, v in zip(series, (exact, o1, o2)):
                series[k].append(v)
        text = _csv_text(["param", "ep_exact", "ep_order1", "ep_order2", "order2_trace_defect"], rows)
    else:
        rows, series = [], {"ep_bits": []}
        for label, spec in zip(params, specs):
            r = entpot.entanglement_potential_of(spec)
            rows.append((label, _num(r.negativity), _num(r.trace_norm), _num(r.ep_bits)))
            series["ep_bits"].append(r.ep_bits)
        text = _csv_text(["param", "negativity", "trace_norm", "ep_bits"], rows)
    svg_text = None
    if args.format in ("svg", "both"):
        xlabel = sweep[0] if sweep else "point"
        svg_text = line_plot(xaxis, series, xlabel, "EP (bits)", f"EP {template.label()}")
    _emit(args, text, svg_text, "ep")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    spec = _with_dim(parse_state_spec(args.spec), args.dim)
    spectrum = entpot.pt_spectrum_of(spec)
    rows = [(str(i), _num(v)) for i, v in enumerate(spectrum.eigenvalues)]
    rows.append(("negativity", _num(entpot.negativity_of(spectrum))))
    text = _csv_text(["index", "eigenvalue"], rows)
    svg_text = None
    if args.format in ("svg", "both"):
        ev = spectrum.eigenvalues
        svg_text = line_plot(range(len(ev)), {"eigenvalue": ev}, "index", "eigenvalue", f"PT spectrum {spec.label()}")
    _emit(args, text, svg_text, "spectrum")
    return EXIT_OK


def cmd_validate(args) -> int:
    rows = validation.run_all()
    text = validation.report_csv(rows)
    if args.out is None:
        sys.stdout.write(text)
    else:
        _write(Path(args.out), text)
    failed = [r for r in rows if not r.passed]
    for r in failed:
        print(f"FAIL {r.name}: target {r.target:.10g}, actual {r.actual:.10g}, tolerance {r.tolerance:g}", file=sys.stderr)
    print(f"{len(rows) - len(failed)}/{len(rows)} checks passed", file=sys.stderr)
    return EXIT_VALIDATION if failed else EXIT_OK


def _range_checked_dim(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--dim expects an integer, got {text!r}") from None
    if v < 2:
        raise argparse.ArgumentTypeError(f"--dim must be >= 2, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="photonadd", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, plots=True):
        p.add_argument("spec", help="state, e.g. 'pacs:alpha=0.9,m=1'")
        p.add_argument("--dim", type=_range_checked_dim, help="Fock truncation override")
        p.add_argument("--out", help="output path; the extension is replaced per format")
        p.add_argument("--format", choices=("csv", "svg", "both"), default="csv")

    w = sub.add_parser("wigner", help="sample the Wigner function on a grid")
    common(w)
    w.add_argument("--grid", nargs=2, metavar=("Q", "P"), help="min:max:count for q and for p")
    w.add_argument("--evaluator", choices=("closed", "numeric", "both"), default="numeric")
    w.set_defaults(func=cmd_wigner)

    e = sub.add_parser("ep", help="entanglement potential, optionally swept")
    common(e)
    e.add_argument("--sweep", help="param=start:stop:count with param alpha, x or m")
    e.add_argument("--compare-orders", action="store_true", help="add low-temperature approximant columns")
    e.set_defaults(func=cmd_ep)

    s = sub.add_parser("spectrum", help="partial-transpose spectrum after vacuum mixing")
    common(s)
    s.set_defaults(func=cmd_spectrum)

    v = sub.add_parser("validate", help="run the acceptance checks")
    v.add_argument("--out", help="report path (default: standard output)")
    v.set_defaults(func=cmd_validate)
    return parser


def _protect(argv: Sequence[str]) -> List[str]:
    # "-4:4:161" would otherwise be read as an option
    return [" " + a if re.match(r"^-[\d.][^ ]*:", a) else a for a in argv]


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_protect(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", TruncationWarning)
            return args.func(args)
    except (ParseError, DomainError, UnsupportedClosedForm, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TruncationWarning, ProblemTooLarge, NotHermitian, ZeroTrace, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
