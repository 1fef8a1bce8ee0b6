import cmath

import numpy as np
import pytest

from toeplitz_chains import aiii, bdi
from toeplitz_chains.correlation_matrix import correlation_matrix
from toeplitz_chains.errors import (
    DegenerateQuartic,
    NotStronglyGeneric,
    OddWindingUnsupported,
    SubsetExplosion,
    ValidationError,
)
from toeplitz_chains.transfer_spectrum import (
    bond_dimension_bounds,
    effective_hamiltonian,
    quartic_transfer_decomposition,
    rM_coverage_check,
    transfer_eigenvalues,
)

QUARTIC = bdi(n_P=2, inside=[0.5], outside=[3.0])


def test_quartic_spectrum_and_phase():
    rep = transfer_eigenvalues(QUARTIC)
    mu = sorted((v.real for v in rep.values), reverse=True)
    assert np.allclose(mu, [1, 1 / 6, -1 / 3, -0.5])
    assert rep.injective and rep.padding == 0
    assert rep.theta == pytest.approx(np.pi)
    assert transfer_eigenvalues(bdi(sigma=-1, n_P=2, inside=[0.5], outside=[3.0])).theta == 0.0


def test_empty_model_has_unit_spectrum():
    assert np.allclose(transfer_eigenvalues(bdi()).values, [1.0])


def test_pole_deficit_pads_with_zeros():
    m = bdi(n_P=0, inside=[0.5], outside=[3.0])  # n_P = n_z + n_Z - 2
    rep = transfer_eigenvalues(m)
    nonzero = sorted(v.real for v in rep.values if abs(v) > 1e-14)
    assert np.allclose(nonzero, sorted([1, -0.5, -1 / 3, 1 / 6]))
    assert len(rep.values) == 16 and rep.padding == 12


def test_effective_hamiltonian_reproduces_spectrum():
    for m in (QUARTIC, bdi(sigma=-1, n_P=4, inside=[0.3 + 0.2j, 0.3 - 0.2j], outside=[-2.0, 4.0])):
        rep = transfer_eigenvalues(m)
        h = effective_hamiltonian(m)
        assert np.allclose(np.sort_complex(h.spectrum()), np.sort_complex(np.array(rep.values)), atol=1e-12)


def test_preconditions():
    with pytest.raises(OddWindingUnsupported):
        transfer_eigenvalues(bdi(n_P=1, inside=[0.5]))
    with pytest.raises(NotStronglyGeneric):
        transfer_eigenvalues(bdi(n_P=2, inside=[0.5, -0.5]))
    with pytest.raises(ValidationError):
        transfer_eigenvalues(aiii(n_P=2, inside=[0.5j]))
    with pytest.raises(ValidationError):
        rM_coverage_check(bdi(n_P=0, inside=[0.5]))
    with pytest.raises(SubsetExplosion):
        rM_coverage_check(bdi(n_P=17, inside=list(np.linspace(-0.9, 0.9, 17))))


def test_coverage_examples():
    assert rM_coverage_check(QUARTIC)
    assert rM_coverage_check(bdi(n_P=2, inside=[0.3, -0.6]))
    assert rM_coverage_check(bdi())


@pytest.mark.parametrize("n_P, zeros, expected", [
    (0, 0, (1, 1)),
    (2, 2, (2, 2)),
    (3, 3, (3, 4)),
])
def test_bond_dimension_bounds(n_P, zeros, expected):
    inside = list(np.linspace(0.2, 0.6, zeros))
    b = bond_dimension_bounds(bdi(n_P=n_P, inside=inside))
    assert (b.chi_lower, b.chi_upper) == expected


def test_quartic_decomposition_errors():
    with pytest.raises(DegenerateQuartic):
        quartic_transfer_decomposition(0.4, 2.5)
    with pytest.raises(ValidationError):
        quartic_transfer_decomposition(2.0, 3.0)


def _wick_ztilde(a, b, N):
    """Connected <Ztilde_1 Ztilde_{N+1}> from the Majorana two-point matrix."""
    m = bdi(n_P=2, inside=[a], outside=[b])
    G = np.eye(2 * (N + 1)) - 1j * correlation_matrix(m, N + 1)  # G[j, k] = <a_j a_k>
    g = lambda j, k: G[j, k]  # noqa: E731
    i1, t1, iN, tN = 0, 1, 2 * N, 2 * N + 1
    four = g(t1, i1) * g(tN, iN) - g(t1, tN) * g(i1, iN) + g(t1, iN) * g(i1, tN)
    shift = (1j * g(t1, i1)).real
    return (-four - shift**2).real, shift


@pytest.mark.parametrize("a, b", [(0.5, 3.0), (-0.3, 2.0), (0.6, -1.7)])
def test_quartic_ztilde_channel_against_wick(a, b):
    dec = quartic_transfer_decomposition(a, b)
    for N in range(1, 7):
        conn, shift = _wick_ztilde(a, b, N)
        assert abs(abs(shift) - abs(dec.shift)) < 1e-12
        assert abs(conn - dec.channel_correlator("Ztilde", N)) < 1e-12
    assert dec.C["Ztilde"] == pytest.approx(-dec.C["X"] * dec.C["Y"])
    assert cmath.isclose(dec.eigenvalues["Ztilde"], dec.eigenvalues["X"] * dec.eigenvalues["Y"])
