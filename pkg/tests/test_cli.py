import csv
import io
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from photonadd import cli, validation, wigner
from photonadd.entpot import ep_spacs_closed
from photonadd.exceptions import DomainError, ParseError
from photonadd.states import Kind
from photonadd.svg import diverging_color


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


class TestParseStateSpec:
    def test_examples(self):
        s = cli.parse_state_spec("pacs:alpha=0.9,m=1")
        assert (s.kind, s.alpha, s.m) == (Kind.PACS, 0.9, 1)
        assert cli.parse_state_spec("thermal:x=0.5").x == 0.5
        assert cli.parse_state_spec("pa_thermal").kind is Kind.PA_THERMAL
        assert cli.parse_state_spec("pa_thermal_o2:x=0.1").kind is Kind.PA_THERMAL_ORDER2
        assert cli.parse_state_spec("fock:n=3,dim=9").dim_override == 9

    @pytest.mark.parametrize(
        "text,value", [("1+2i", 1 + 2j), ("-0.5i", -0.5j), ("i", 1j), ("2-i", 2 - 1j), ("1e-1", 0.1)]
    )
    def test_complex_alpha(self, text, value):
        assert cli.parse_state_spec(f"coherent:alpha={text}").alpha == value

    @pytest.mark.parametrize(
        "text,pos",
        [
            ("pacs:alpha=", 11),
            ("squeezed:r=1", 0),
            ("pacs:beta=1", 5),
            ("pacs:alpha=1,x=0.1", 13),
            ("pacs:m=1,m=2", 9),
            ("pacs:", 5),
            ("pacs:alpha", 10),
            ("pacs:m=1.5", 7),
            ("coherent:alpha=1j", 15),
            ("coherent:alpha=nan", 15),
            ("thermal:x=inf", 10),
        ],
    )
    def test_parse_errors_carry_position(self, text, pos):
        with pytest.raises(ParseError) as exc:
            cli.parse_state_spec(text)
        assert exc.value.position == pos
        assert f"position {pos}" in str(exc.value)

    @pytest.mark.parametrize("text", ["thermal:x=1", "pacs:m=0", "pa_thermal_o1:x=0.7", "fock:n=1,dim=1"])
    def test_domain_errors(self, text):
        with pytest.raises(DomainError):
            cli.parse_state_spec(text)


def test_wigner_csv_format(capsys):
    code, out, err = run(capsys, "wigner", "pacs:alpha=0.1,m=1", "--grid", "-4:4:5", "-2:2:3")
    assert code == 0 and err == ""
    table = rows(out)
    assert table[0] == ["q", "p", "w"] and len(table) == 16
    assert "\r" not in out and out.endswith("\n")
    q = [float(r[0]) for r in table[1:]]
    p = [float(r[1]) for r in table[1:]]
    # q-major: p varies fastest
    assert q[:3] == [q[0]] * 3 and p[:3] == sorted(p[:3])
    # 17 significant digits round-trip exactly
    grid = wigner.PhaseGrid(-4, 4, -2, 2, 5, 3)
    Q, P = grid.mesh()
    expected = wigner.closed_form(cli.parse_state_spec("pacs:alpha=0.1,m=1"), Q, P).ravel()
    np.testing.assert_allclose([float(r[2]) for r in table[1:]], expected, atol=1e-12)
    assert all(float(f"{float(r[2]):.17g}") == float(r[2]) for r in table[1:])


def test_wigner_is_deterministic(capsys):
    argv = ("wigner", "pa_thermal:x=0.5", "--grid", "-3:3:7", "-3:3:7")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_wigner_closed_unsupported(capsys):
    code, out, err = run(capsys, "wigner", "coherent:alpha=1", "--evaluator", "closed")
    assert code == 2 and out == "" and "closed-form" in err
    assert run(capsys, "wigner", "coherent:alpha=1", "--grid", "-1:1:3", "-1:1:3")[0] == 0


def test_wigner_both_writes_two_files(capsys, tmp_path):
    out = tmp_path / "field.csv"
    code, _, err = run(capsys, "wigner", "pa_thermal:x=0.9", "--evaluator", "both", "--grid", "-5:5:21", "-5:5:21", "--out", str(out))
    assert code == 0
    closed = rows((tmp_path / "field.closed.csv").read_text())
    numeric = rows((tmp_path / "field.numeric.csv").read_text())
    assert len(closed) == len(numeric) == 442
    line = [l for l in err.splitlines() if l.startswith("max |closed - numeric|")]
    assert len(line) == 1 and float(line[0].split("=")[1].split()[0]) < 1e-12


def test_wigner_svg_is_valid_xml(capsys, tmp_path):
    code, _, _ = run(capsys, "wigner", "pacs:alpha=0.9,m=1", "--grid", "-3:3:9", "-3:3:9", "--format", "both", "--out", str(tmp_path / "w"))
    assert code == 0
    root = ET.parse(tmp_path / "w.svg").getroot()
    rects = [r for r in root.iter("{http://www.w3.org/2000/svg}rect") if r.get("width") == r.get("height")]
    assert len(rects) >= 81
    assert (tmp_path / "w.csv").exists()


def test_diverging_scale_is_white_at_zero():
    assert diverging_color(0.0) == "#ffffff"
    assert diverging_color(1.0) != diverging_color(-1.0)
    assert diverging_color(5.0) == diverging_color(1.0)


@pytest.mark.parametrize(
    "argv",
    [
        ("wigner", "pacs:alpha=0.1", "--grid", "4:-4:9", "-4:4:9"),
        ("wigner", "pacs:alpha=0.1", "--grid", "-4:4:1", "-4:4:9"),
        ("wigner", "pacs:alpha=0.1", "--grid", "-4:4", "-4:4:9"),
        ("wigner", "pacs:alpha=0.1", "--dim", "1"),
        ("wigner", "pacs:alpha="),
        ("ep", "pacs:m=1", "--sweep", "beta=0:1:3"),
        ("ep", "pacs:m=1", "--sweep", "alpha=0:1:0"),
        ("ep", "pacs:m=1", "--sweep", "x=0:0.5:3"),
        ("ep", "thermal", "--sweep", "x=0:1:3"),
        ("ep", "pa_thermal", "--sweep", "x=0:0.3:4", "--compare-orders"),
        ("ep", "pacs:alpha=1", "--compare-orders"),
        ("ep", "pacs:m=1", "--sweep", "m=1:2:3"),
        ("spectrum", "thermal:x=1"),
        ("frobnicate",),
    ],
)
def test_usage_and_domain_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err


def test_too_small_dim_is_numerical_failure(capsys):
    code, _, err = run(capsys, "ep", "pacs:alpha=1", "--dim", "3")
    assert code == 3 and "TruncationWarning" in err


def test_ep_single_classical_row(capsys):
    code, out, _ = run(capsys, "ep", "coherent:alpha=2")
    table = rows(out)
    assert code == 0 and table[0] == ["param", "negativity", "trace_norm", "ep_bits"]
    assert len(table) == 2 and abs(float(table[1][3])) < 1e-9


def test_ep_sweep_matches_closed_form(capsys, tmp_path):
    code, _, _ = run(capsys, "ep", "pacs:m=1", "--sweep", "alpha=0:3:7", "--format", "both", "--out", str(tmp_path / "ep"))
    assert code == 0
    table = rows((tmp_path / "ep.csv").read_text())[1:]
    for a, _, tn, ep in table:
        assert float(ep) == pytest.approx(ep_spacs_closed(float(a)), abs=1e-6)
        assert float(tn) == pytest.approx(2 ** float(ep))
    ET.parse(tmp_path / "ep.svg")


def test_ep_compare_orders(capsys):
    code, out, _ = run(capsys, "ep", "pa_thermal", "--sweep", "x=0:0.25:3", "--compare-orders")
    table = rows(out)
    assert code == 0
    assert table[0] == ["param", "ep_exact", "ep_order1", "ep_order2", "order2_trace_defect"]
    assert [float(v) for v in table[1][1:4]] == pytest.approx([1.0, 1.0, 1.0])
    exact = [float(r[1]) for r in table[1:]]
    assert exact[0] > exact[1] > exact[2]
    assert all(abs(float(r[4])) < 1e-15 for r in table[1:])


def test_spectrum_spacs_alpha_one(capsys):
    code, out, _ = run(capsys, "spectrum", "pacs:alpha=1")
    table = rows(out)
    assert code == 0 and table[0] == ["index", "eigenvalue"]
    assert table[-1][0] == "negativity" and float(table[-1][1]) == pytest.approx(0.25)
    ev = [float(v) for _, v in table[1:-1]]
    assert ev == sorted(ev, reverse=True)
    assert min(ev) == pytest.approx(-0.25) and any(abs(v - 0.25) < 1e-9 for v in ev)


def test_spectrum_thermal_is_separable(capsys):
    code, out, _ = run(capsys, "spectrum", "thermal:x=0.5")
    table = rows(out)
    assert code == 0 and min(float(v) for _, v in table[1:-1]) > -1e-10
    assert float(table[-1][1]) == 0.0


def test_validate_exit_code_follows_rows(capsys, monkeypatch, tmp_path):
    monkeypatch.setattr(validation, "CRITERIA", {"5": validation.check_pa_thermal_origin_dip})
    out = tmp_path / "report.csv"
    code, _, err = run(capsys, "validate", "--out", str(out))
    assert code == 0 and "6/6 checks passed" in err
    assert rows(out.read_text())[0] == ["name", "target", "actual", "tolerance", "pass"]

    def broken():
        return [validation.Check("always off", 0.0, 1.0, 0.1, False)]

    monkeypatch.setattr(validation, "CRITERIA", {"x": broken})
    assert run(capsys, "validate")[0] == 1

    def crashing():
        raise RuntimeError("boom")

    monkeypatch.setattr(validation, "CRITERIA", {"9_crash": crashing})
    code, out, _ = run(capsys, "validate")
    assert code == 1 and "9_crash raised RuntimeError: boom" in out


def test_laguerre_sign_mutation_is_caught(capsys, monkeypatch):
    """A sign slip inside L_2 must break the closed-vs-numeric check."""
    original = wigner.laguerre

    def mutated(k, z):
        # L_2(z) = 1 - 2z + z^2/2 with the linear sign flipped
        return 1 + 2 * np.asarray(z) + np.asarray(z) ** 2 / 2 if k == 2 else original(k, z)

    monkeypatch.setattr(wigner, "laguerre", mutated)
    results = validation.check_wigner_cross_validation()
    failed = {r.name for r in results if not r.passed}
    assert failed == {f"wigner closed-vs-numeric pacs:alpha={a:g},m=2" for a in validation.ALPHAS_FIG}
    monkeypatch.setattr(validation, "CRITERIA", {"3": validation.check_wigner_cross_validation})
    code, _, err = run(capsys, "validate")
    assert code == 1 and "FAIL wigner closed-vs-numeric" in err


def test_report_row_for_trace_defect():
    text = validation.report_csv(validation.check_low_t_approximants())
    line = [r for r in rows(text) if r[0].startswith("low-T order 2 trace defect x=0.1")]
    assert len(line) == 1 and line[0][4] == "report" and abs(float(line[0][2])) < 1e-15
    assert math.isfinite(float(line[0][2]))
