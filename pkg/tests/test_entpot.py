import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from photonadd import entpot
from photonadd.exceptions import DimensionMismatch, NotHermitian, ProblemTooLarge
from photonadd.fock import FockSpace, Ket, TwoModeDensityOp, annihilation_matrix, creation_matrix
from photonadd.states import Kind, StateSpec, coherent_state, fock_state, thermal_state


def test_beam_splitter_is_unitary_on_complete_sectors():
    d = 6
    U = entpot.beam_splitter_unitary(FockSpace(d), FockSpace(d))
    np.testing.assert_allclose(U @ U.T, np.eye(d * d), atol=1e-12)


def test_beam_splitter_action_on_creation():
    # U a^dag U^dag = (a^dag + b^dag)/sqrt(2), checked on the complete low sectors
    d = 8
    s = FockSpace(d)
    U = entpot.beam_splitter_unitary(s, s)
    eye = np.eye(d)
    ad, bd = np.kron(creation_matrix(s), eye), np.kron(eye, creation_matrix(s))
    lhs = U @ ad @ U.T
    low = [n * d + m for n in range(d) for m in range(d) if n + m < d - 2]
    np.testing.assert_allclose(lhs[np.ix_(low, low)], ((ad + bd) / math.sqrt(2))[np.ix_(low, low)], atol=1e-12)
    v = U[:, 1 * d + 0]
    assert v[1 * d] == pytest.approx(1 / math.sqrt(2)) and v[1] == pytest.approx(1 / math.sqrt(2))


def test_beam_splitter_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        entpot.beam_splitter_unitary(FockSpace(3), FockSpace(4))


def test_vacuum_isometry_matches_full_unitary():
    d = 7
    U = entpot.beam_splitter_unitary(FockSpace(d), FockSpace(d))
    np.testing.assert_allclose(entpot._vacuum_isometry(d), U[:, [n * d for n in range(d)]], atol=1e-14)


def test_mix_coherent_gives_product_of_halves():
    alpha = 1.2 + 0.4j
    s = FockSpace(30)
    mixed = entpot.mix_with_vacuum(coherent_state(s, alpha))
    half = coherent_state(s, alpha / math.sqrt(2)).amplitudes
    expected = np.kron(half, half)
    np.testing.assert_allclose(mixed.matrix[:, 0] / expected[0].conjugate(), expected, atol=1e-9)
    assert mixed.trace == pytest.approx(1.0)
    pa, pb = mixed.marginal_populations()
    np.testing.assert_allclose(pa, pb, atol=1e-12)


@given(st.integers(2, 6), st.integers(0, 10_000))
def test_partial_transpose_involution_and_trace(d, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(d * d, d * d)) + 1j * rng.normal(size=(d * d, d * d))
    rho = TwoModeDensityOp(FockSpace(d), FockSpace(d), g @ g.conj().T)
    pt = entpot.partial_transpose(rho)
    back = entpot.partial_transpose(TwoModeDensityOp(rho.space_a, rho.space_b, pt))
    np.testing.assert_allclose(back, rho.matrix)
    assert np.trace(pt) == pytest.approx(np.trace(rho.matrix))
    np.testing.assert_allclose(pt, pt.conj().T, atol=1e-12)


def test_partial_transpose_element_mapping():
    d = 3
    m = np.zeros((9, 9))
    m[1 * d + 2, 0 * d + 1] = 1.0
    pt = entpot.partial_transpose(TwoModeDensityOp(FockSpace(d), FockSpace(d), m))
    assert pt[1 * d + 1, 0 * d + 2] == 1.0 and pt.sum() == 1.0


@given(st.integers(2, 12), st.integers(0, 10_000), st.floats(0, 1))
def test_hermitian_spectrum_matches_dense(n, seed, sparsity):
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(n, n)) * (rng.random((n, n)) < sparsity)
    h = h + h.T
    spec = entpot.hermitian_spectrum(h)
    np.testing.assert_allclose(spec.eigenvalues, np.sort(np.linalg.eigvalsh(h))[::-1], atol=1e-10)


def test_hermitian_spectrum_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        entpot.hermitian_spectrum(np.array([[0, 1], [0, 0]]))


def test_spectrum_helpers():
    s = entpot.Spectrum((0.1, -0.3, 1e-12, 1.2))
    assert s.eigenvalues == (1.2, 0.1, 1e-12, -0.3)
    assert s.negative() == (-0.3,) and s.nonzero() == (1.2, 0.1, -0.3)
    assert s.total == pytest.approx(1.0)
    r = entpot.EPResult.from_negativity(0.5)
    assert (r.trace_norm, r.ep_bits) == (2.0, 1.0)


@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_fixture_spectrum(alpha):
    """PT of the fixture: {1/2 +- sqrt(1/4 + ...)} pattern with one negative eigenvalue."""
    a2 = abs(alpha) ** 2
    sp = entpot.hermitian_spectrum(entpot.partial_transpose(entpot.rho0_fixture(alpha, 3)))
    assert len(sp.negative()) == 1
    assert sp.negative()[0] == pytest.approx(-1 / (2 * (1 + a2)), abs=1e-12)
    assert sp.total == pytest.approx(1.0)


def test_fixture_at_one():
    s3 = math.sqrt(3)
    got = entpot.hermitian_spectrum(entpot.partial_transpose(entpot.rho0_fixture(1.0, 4))).nonzero()
    np.testing.assert_allclose(got, [(2 + s3) / 4, 0.25, (2 - s3) / 4, -0.25], atol=1e-12)
    with pytest.raises(ValueError):
        entpot.rho0_fixture(1.0, 1)


@given(st.integers(2, 7), st.integers(0, 10_000))
def test_pure_state_ep_matches_schmidt_oracle(d, seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=d) + 1j * rng.normal(size=d)
    ket = Ket(FockSpace(d), amps).normalized()
    schmidt = entpot.schmidt_ep_pure(entpot.split_pure(ket), d)
    assert entpot.entanglement_potential(ket).ep_bits == pytest.approx(schmidt, abs=1e-10)


def test_fock_two_schmidt_value():
    ket = fock_state(FockSpace(4), 2)
    assert entpot.schmidt_ep_pure(entpot.split_pure(ket), 4) == pytest.approx(math.log2((6 + 4 * math.sqrt(2)) / 4))


@given(st.floats(0, 3), st.floats(0, 2 * math.pi))
def test_spacs_ep_matches_closed_form(r, phi):
    alpha = r * complex(math.cos(phi), math.sin(phi))
    ep = entpot.entanglement_potential_of(StateSpec(Kind.PACS, alpha=alpha, m=1)).ep_bits
    assert ep == pytest.approx(entpot.ep_spacs_closed(alpha), abs=1e-9)


@pytest.mark.parametrize("x", [0.0, 0.2, 0.5])
def test_thermal_output_is_separable(x):
    assert entpot.pt_spectrum_of(StateSpec(Kind.THERMAL, x=x)).negative() == ()
    sigma = thermal_state(FockSpace(20), x) if x <= 0.2 else None
    if sigma is not None:
        assert entpot.entanglement_potential(sigma).negativity == 0.0


def test_fock_one_spectrum_pattern():
    ev = entpot.pt_spectrum_of(StateSpec(Kind.FOCK, n=1)).nonzero()
    np.testing.assert_allclose(ev, [0.5, 0.5, 0.5, -0.5], atol=1e-12)


def test_trimmed_pipeline_matches_full_mixing():
    ket = coherent_state(FockSpace(14), 0.8)
    from photonadd.states import add_photons

    sigma = add_photons(ket, 1).normalized().to_density()
    full = entpot.ep_of_two_mode(entpot.mix_with_vacuum(sigma))
    assert entpot.entanglement_potential(sigma).ep_bits == pytest.approx(full.ep_bits, abs=1e-9)


def test_problem_too_large(monkeypatch):
    monkeypatch.setattr(entpot, "MAX_TWO_MODE_DIM", 10)
    with pytest.raises(ProblemTooLarge):
        entpot.entanglement_potential_of(StateSpec(Kind.PACS, alpha=1.0))


def test_ep_sweep():
    rows = entpot.ep_sweep(StateSpec(Kind.PACS, alpha=0.2), "m", [1, 2, 3])
    eps = [r.ep_bits for _, r in rows]
    assert eps[0] < eps[1] < eps[2]
    with pytest.raises(ValueError):
        entpot.ep_sweep(StateSpec(Kind.PACS), "n", [1])


def test_ep_dim_override():
    spec = StateSpec(Kind.COHERENT, alpha=0.5)
    assert entpot.ep_dim(spec) >= entpot.EP_MIN_DIM
    assert entpot.ep_dim(spec.replace(dim_override=9)) == 9
    assert annihilation_matrix(FockSpace(2)).shape == (2, 2)
