import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toeplitz_chains import bdi
from toeplitz_chains.errors import DegenerateRoots, OddMultiplicity
from toeplitz_chains.symbol import (
    RationalSymbol,
    efp_sampler,
    efp_symbol,
    fft_coefficients,
    fourier_coefficients,
    residue_convention,
    string_sampler,
    string_symbol,
    two_point_coefficients,
)
from toeplitz_chains.toeplitz_engine import (
    day_determinant,
    day_with_limit,
    numeric_toeplitz_det,
    toeplitz_matrix,
)

MODELS = [
    bdi(n_P=2, inside=[0.5], outside=[3.0]),
    bdi(sigma=-1, n_P=1, inside=[0.3 + 0.4j, 0.3 - 0.4j], outside=[-2.0]),
    bdi(n_P=0, outside=[1.5, -2.5]),
    bdi(n_P=3, inside=[0.2, -0.7]),
]


def test_residue_convention_resolved():
    assert residue_convention() == -1.0


@pytest.mark.parametrize("m", MODELS)
def test_residue_route_matches_fft(m):
    res = fourier_coefficients(m, -6, 6, method="residue").values
    fft = fourier_coefficients(m, -6, 6, method="fft").values
    assert np.max(np.abs(res - fft)) < 1e-12


@pytest.mark.parametrize("m", MODELS)
def test_two_point_coefficients_are_those_of_f_over_abs_f(m):
    direct = fft_coefficients(lambda z: m(z) / np.abs(m(z)), -5, 5).values
    assert np.max(np.abs(two_point_coefficients(m, -5, 5).values - direct)) < 1e-12


@pytest.mark.parametrize("m", MODELS)
@pytest.mark.parametrize("alpha", [-1, 0, 1, 2])
def test_rational_string_symbol_agrees_with_sampler(m, alpha):
    z = np.exp(1j * np.linspace(0.05, 6.2, 11))
    sym = string_symbol(m, alpha)
    # a transposed symbol stands for t(1/z), which has the same Toeplitz determinant
    w = 1 / z if sym.transposed else z
    assert np.allclose(sym(z), string_sampler(m, alpha)(w), atol=1e-12)


def test_efp_symbol_agrees_with_sampler():
    m = bdi(n_P=2, inside=[0.5], outside=[4.0])
    z = np.exp(1j * np.linspace(0.05, 6.2, 11))
    sym = efp_symbol(m)
    w = 1 / z if sym.transposed else z
    assert np.allclose(sym(z), efp_sampler(m)(w), atol=1e-12)


def test_multiplicity_one_rejected():
    with pytest.raises(OddMultiplicity):
        fourier_coefficients(bdi(n_P=1, inside=[0.5], multiplicity=1), 0, 2)


inner = st.floats(-0.8, 0.8).filter(lambda x: abs(x) > 0.05)
outer = st.floats(1.3, 4.0) | st.floats(-4.0, -1.3)
roots = st.floats(-3.0, 3.0).filter(lambda x: abs(x) > 0.1 and abs(abs(x) - 1) > 0.1)


@st.composite
def rational_symbols(draw):
    p = draw(st.integers(0, 2))
    q = draw(st.integers(0, 2))
    s = draw(st.integers(p + q, p + q + 2))
    tau = draw(st.lists(roots, min_size=s, max_size=s, unique=True).filter(
        lambda xs: all(abs(a - b) > 0.1 for i, a in enumerate(xs) for b in xs[i + 1:])))
    delta = draw(st.lists(inner, min_size=p, max_size=p, unique=True))
    gamma = draw(st.lists(outer, min_size=q, max_size=q, unique=True))
    return RationalSymbol(draw(st.floats(0.5, 2.0)), tuple(tau), tuple(delta), tuple(gamma))


@given(rational_symbols(), st.integers(1, 10))
@settings(max_examples=80, deadline=None)
def test_day_formula_matches_lu_determinant(sym, N):
    day = day_determinant(sym, N).value
    T = np.linalg.det(toeplitz_matrix(sym, N))
    assert abs(day - T) <= 1e-8 * max(1.0, abs(T))


def test_origin_roots_need_the_limit_for_small_N():
    sym = RationalSymbol(1.0, (0.5, -2.0), (0.3,), (), epsilon_roots=2)
    with pytest.raises(DegenerateRoots):
        day_determinant(sym, 1)
    for N in (1, 2, 3, 5):
        assert abs(day_with_limit(sym, N).value - numeric_toeplitz_det(sym, N).value) < 1e-9


def test_numeric_determinant_of_identity_symbol():
    r = numeric_toeplitz_det(lambda z: np.ones_like(z), 4)
    assert abs(r.value - 1) < 1e-14 and not r.ill_conditioned
