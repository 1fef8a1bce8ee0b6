"""Acceptance suite: one test per numbered criterion.

Each test records PASS/FAIL in a shared ledger that is printed in the pytest
terminal summary (and by ``python tests/test_acceptance.py``).  The reference
formulas below are typed in independently of the package and act as oracles.
"""

import cmath
import functools
import math
import time

import numpy as np

from acceptance_report import RESULTS, criterion
from model_factory import random_aiii, random_bdi
from toeplitz_chains import aiii, bdi
from toeplitz_chains.approximation import (
    order_parameter_convergence,
    partial_sum_roots,
    quarter_root_identity_error,
)
from toeplitz_chains.model import classify_genericity
from toeplitz_chains.correlation_matrix import correlation_spectrum, det_identity_residual, fixture_char_poly
from toeplitz_chains.smith_fixtures import gorodetsky_ratio, load_fixture, smith_identity_residual
from toeplitz_chains.string_correlators import (
    correlation_lengths,
    correlator_window,
    emptiness_formation,
    evaluate_correlator,
    n_alpha,
    numeric_emptiness_formation,
    numeric_string_correlator,
    order_parameter,
)
from toeplitz_chains.transfer_spectrum import (
    QUARTIC_CHANNEL_ALPHA,
    bond_dimension_bounds,
    quartic_transfer_decomposition,
    rM_coverage_check,
    rM_identification,
    transfer_eigenvalues,
)

REL, ABS = 1e-8, 1e-10


def close(value, ref, rel=REL, abs_=ABS):
    err = abs(value - ref)
    return err <= abs_ or err <= rel * abs(ref)


@functools.lru_cache(maxsize=None)
def oracle_models(cls: str, count: int = 25, seed: int = 2024):
    rng = np.random.default_rng(seed)
    gen = random_bdi if cls == "BDI" else random_aiii
    return tuple(gen(rng) for _ in range(count))


def closed_vs_oracle(models):
    failures = []
    for i, m in enumerate(models):
        w = m.winding
        for a in range(w - m.n_z - 2, w + m.n_Z + 3):
            for N in range(n_alpha(m, a), 26):
                c = evaluate_correlator(m, a, N, strict=True).value
                o = numeric_string_correlator(m, a, N)
                if not close(c, o):
                    failures.append((i, a, N, c, o))
    return failures


# ---------------------------------------------------------------------------

@criterion(1, "BDI closed form vs numeric Toeplitz oracle, 25 random models")
def test_c01_bdi_oracle_equivalence():
    t0 = time.perf_counter()
    failures = closed_vs_oracle(oracle_models("BDI"))
    elapsed = time.perf_counter() - t0
    assert not failures, failures[:5]
    assert elapsed < 60, f"took {elapsed:.1f} s"


def _example1_formulas(a, b):
    """Displayed formulas for f = (z-a)^2 (z-b)^2, keyed by alpha, as ``(N_min, g(N))``."""
    s = lambda N: (-1) ** N  # noqa: E731
    if abs(a) < 1 < abs(b):
        return {
            1: (1, lambda N: s(N) * (b**2 - 1) * (a * b - 1) / (a * b**2 * (b - a)) * a**N),
            2: (1, lambda N: s(N) * ((1 - a**2) * (1 - b**-2) / (1 - a / b) ** 2
                                     + (1 - a * b) ** 2 / (b - a) ** 2 * (a / b) ** N)),
            3: (1, lambda N: s(N) * (1 - a**2) * (1 - a * b) * b / (b - a) * b**-N),
        }

    def inside(a, b):
        return {
            2: (1, lambda N: s(N) * (a * b) ** N),
            3: (1, lambda N: s(N) / (b - a) * (b * (1 - a**2) * (1 - a * b) * b**N
                                               - a * (1 - b**2) * (1 - a * b) * a**N)),
            4: (2, lambda N: s(N) * (1 - a**2) * (1 - b**2) * (1 - a * b) ** 2),
        }

    if abs(a) < 1 and abs(b) < 1:
        return inside(a, b)
    f = inside(1 / a, 1 / b)
    return {0: f[4], 1: f[3], 2: f[2]}


@criterion(2, "nine displayed correlator formulas")
def test_c02_example1_golden_values():
    cases = [(0.5, 3.0), (0.5, 1 / 3), (2.0, 3.0), (-0.4, 2.2), (0.5, -0.3), (-2.0, 3.0)]
    count = 0
    for a, b in cases:
        m = bdi(n_P=0, inside=[w for w in (a, b) if abs(w) < 1], outside=[w for w in (a, b) if abs(w) > 1])
        for alpha, (n_min, g) in _example1_formulas(a, b).items():
            for N in range(max(n_min, n_alpha(m, alpha)), 21):
                ref = g(N)
                closed = evaluate_correlator(m, alpha, N, strict=True).value
                oracle = numeric_string_correlator(m, alpha, N)
                assert abs(closed - ref) < 1e-10, (a, b, alpha, N, closed, ref)
                assert abs(oracle - ref) < 1e-10, (a, b, alpha, N, oracle, ref)
            count += 1
    assert count == 18


@criterion(3, "order parameter 0.96 and the mutually-inverse value 1")
def test_c03_order_parameter():
    m = bdi(n_P=0, inside=[0.5], outside=[3.0])
    assert abs(order_parameter(m) - 0.96) < 1e-12
    assert abs(abs(numeric_string_correlator(m, 2, 40)) - 0.96) < 1e-8
    inv = bdi(n_P=0, inside=[0.4], outside=[2.5])
    assert order_parameter(inv) == 1.0


def _separated_model(rng, ratio=0.2):
    """Real-zero models whose two leading ``|r_M|`` per channel differ by at least ``1/ratio``."""
    from toeplitz_chains.string_correlators import asymptotic_terms

    while True:
        m = random_bdi(rng, allow_pairs=False)
        lo, hi = correlator_window(m)
        ok = True
        for a in range(lo, hi + 1):
            g = asymptotic_terms(m, a, 2)
            if len(g) == 2 and g[1].modulus > ratio * g[0].modulus:
                ok = False
        if ok:
            return m


@criterion(4, "log-slope of correlators equals -1/xi")
def test_c04_correlation_lengths():
    rng = np.random.default_rng(44)
    Ns = np.arange(10, 26)
    checked = 0
    for _ in range(10):
        m = _separated_model(rng)
        table = correlation_lengths(m)
        for a in range(table.window[0], table.window[1] + 1):
            vals = np.array([abs(evaluate_correlator(m, a, int(N), strict=True).value) for N in Ns])
            slope = np.polyfit(Ns, np.log(vals), 1)[0]
            # the ordered channel tends to a constant
            inv_xi = 0.0 if a == table.ordered_channel else 1 / table[a]
            assert abs(slope + inv_xi) < 1e-6, (m.to_document(), a, slope, inv_xi)
            checked += 1
    assert checked >= 10


def _example3_quadratic(a, b, N):
    """Coefficients ``(p, q)`` of ``x^2 + p x + q`` with roots ``nu^2`` (n_P = 2 quartic)."""
    if abs(b) < 1:
        p = (a * b) ** N / (a - b) ** 2 * (2 * (1 - a**2) * (1 - b**2)
                                          - (1 - a * b) ** 2 * ((a / b) ** N + (b / a) ** N))
        q = (a * b) ** (2 * N)
    else:
        p = (2 * (1 - a**2) * (1 - b**2) - (1 - a * b) ** 2 * (a ** (2 * N) + b ** (-2 * N))) / (b - a) ** 2
        q = ((a**N * b**-N * (1 - a * b) ** 2 - (1 - a**2) * (1 - b**2)) / (b - a) ** 2) ** 2
    return p, q


@criterion(5, "correlation-matrix spectra of the quadratic and quartic examples")
def test_c05_correlation_matrix_examples():
    for b in (0.5, -0.5):
        m = bdi(n_P=1, inside=[b])
        for N in range(1, 13):
            nu = np.sort(correlation_spectrum(m, N).nu)
            ref = np.sort(np.r_[np.ones(N - 1), abs(b) ** N])
            assert np.max(np.abs(nu - ref)) < 1e-9, (b, N)
    bc = 0.5 * cmath.exp(1j * math.pi / 3)
    m = aiii(n_P=1, inside=[bc])
    for N in range(1, 13):
        nu = np.sort(correlation_spectrum(m, N).nu)
        assert np.max(np.abs(nu - np.r_[abs(bc) ** N, np.ones(N - 1)])) < 1e-9, N

    for a, b in [(0.5, 0.3), (-0.6, 0.4), (0.5, 3.0), (0.3, -2.0)]:
        m = bdi(n_P=2, inside=[w for w in (a, b) if abs(w) < 1], outside=[w for w in (a, b) if abs(w) > 1])
        for N in range(2, 13):
            p, q = _example3_quadratic(a, b, N)
            ref = np.sort(np.sqrt(np.abs(np.roots([1.0, p, q]).real)))
            nu = np.sort(correlation_spectrum(m, N).nu)[:2]
            assert np.max(np.abs(nu - ref)) < 1e-8, (a, b, N, nu, ref)

    for a, b in [(0.5, 3.0), (0.3, 3.0), (-0.4, 1.8)]:
        m = bdi(n_P=2, inside=[a], outside=[b])
        nu = np.sort(correlation_spectrum(m, 30).nu)[:2]
        limit = (1 - a**2) * (1 - b**-2) / (1 - a / b) ** 2
        assert abs(order_parameter(m) - limit) < 1e-12
        assert np.max(np.abs(nu**2 - order_parameter(m))) < 1e-6, (a, b, nu)


@criterion(6, "det A_N equals the squared O_0 correlator")
def test_c06_determinant_identity():
    rng = np.random.default_rng(66)
    for _ in range(10):
        while True:
            m = random_bdi(rng)
            if m.n_z > 0 or m.n_Z > 0:
                m = bdi(sigma=m.sigma, n_P=2 * m.n_z, inside=m.zeros_inside, outside=m.zeros_outside)
                break
        assert m.winding == 0
        for N in range(1, 21):
            assert det_identity_residual(m, N) < 1e-8, (m.to_document(), N)


@criterion(7, "shipped Smith-form fixtures")
def test_c07_gorodetsky_fixtures():
    rng = np.random.default_rng(7)
    for name in ("b_quartic_inside", "ab_sextic"):
        fix = load_fixture(name)
        lams = rng.uniform(-1.5, 1.5, 20) + 1j * rng.uniform(-0.5, 0.5, 20)
        for N in range(1, 13):
            for lam in lams:
                ref = fixture_char_poly(fix, N, lam)
                val = gorodetsky_ratio(fix, N, lam)
                assert abs(val - ref) <= 1e-8 * abs(ref), (name, N, lam, val, ref)
        res = smith_identity_residual(fix, samples=20, seed=7)
        assert res is not None and res.relative < 1e-8, (name, res)


@criterion(8, "AIII closed forms, order parameter and quadratic entanglement eigenvalue")
def test_c08_aiii():
    failures = closed_vs_oracle(oracle_models("AIII"))
    assert not failures, failures[:5]

    models = [
        aiii(n_P=0, inside=[0.4 * cmath.exp(0.7j)], outside=[2.5 * cmath.exp(-0.3j)]),
        aiii(theta=0.4, n_P=1, inside=[0.3j, -0.5], outside=[3.0 * cmath.exp(2j)]),
        aiii(theta=-1.0, n_P=3, inside=[0.2 + 0.1j], outside=[2.0j, -3.0 + 1.0j]),
    ]
    for m in models:
        w = m.winding
        assert abs(order_parameter(m) - numeric_string_correlator(m, w, 40)) < 1e-6, m.to_document()

    for b in (0.5 * cmath.exp(1j * math.pi / 3), 0.7j, -0.3 + 0.4j):
        m = aiii(n_P=1, inside=[b])
        for N in range(1, 13):
            nu = np.sort(correlation_spectrum(m, N).nu)
            assert abs(nu[0] ** 2 - abs(b) ** (2 * N)) < 1e-9
            assert np.allclose(nu[1:], 1.0, atol=1e-9)


@criterion(9, "emptiness formation probability")
def test_c09_efp():
    a, b = 0.5, 4.0
    m = bdi(n_P=2, inside=[a], outside=[b])
    for N in range(1, 16):
        ref = ((1 / b - a) / 2) ** N * ((1 - a) * (1 + b) / (2 * (b - a))
                                        + (-1) ** N * (1 + a) * (1 - b) / (2 * (a - b)))
        assert abs(emptiness_formation(m, N) - abs(ref)) < 1e-10
        assert abs(numeric_emptiness_formation(m, N) - abs(ref)) < 1e-10
    for N in range(1, 16):
        assert emptiness_formation(bdi(sigma=1), N) == 0.0
        assert emptiness_formation(bdi(sigma=-1), N) == 1.0
        assert emptiness_formation(bdi(n_P=1), N) == 2.0**-N
        assert emptiness_formation(bdi(n_P=-2), N) == 2.0**-N


@criterion(10, "transfer spectrum, ratio coverage and bond dimension")
def test_c10_transfer():
    for a, b in [(0.5, 3.0), (-0.3, 2.0), (0.7, -1.5), (0.2, 4.0), (-0.6, -2.5)]:
        ref = np.sort_complex(np.array([1, -a, -1 / b, a / b], dtype=complex))
        dec = quartic_transfer_decomposition(a, b)
        got = np.sort_complex(np.array(list(dec.eigenvalues.values()), dtype=complex))
        assert np.allclose(got, ref, atol=1e-12)
        m = bdi(n_P=2, inside=[a], outside=[b])
        mus = np.sort_complex(np.array([mu for _, mu in transfer_eigenvalues(m).spectrum]))
        assert np.allclose(mus, ref, atol=1e-12)
        ids = rM_identification(m)
        assert all(i.mask is not None for i in ids)
        assert {i.mask for i in ids} == {0, 1, 2, 3}
        for channel, alpha in QUARTIC_CHANNEL_ALPHA.items():
            for N in range(1, 8):
                assert abs(dec.channel_correlator(channel, N) - evaluate_correlator(m, alpha, N).value) < 1e-12
        bounds = bond_dimension_bounds(m)
        assert (bounds.chi_lower, bounds.chi_upper) == (2, 2)

    rng = np.random.default_rng(10)
    for _ in range(20):
        m0 = random_bdi(rng, max_zeros=6)
        n = m0.n_z + m0.n_Z
        m = bdi(sigma=m0.sigma, n_P=n, inside=m0.zeros_inside, outside=m0.zeros_outside)
        if classify_genericity(m).strongly_generic:
            assert rM_coverage_check(m), m.to_document()
    assert rM_coverage_check(bdi())


@criterion(11, "approximation sequence for generic models")
def test_c11_approximation():
    ms = [2, 4, 8, 16, 20]
    target = bdi(n_P=2, inside=[0.4], outside=[2.5], multiplicity=1)
    errs = [r.error for r in order_parameter_convergence(target, ms)]
    assert all(e2 <= e1 for e1, e2 in zip(errs, errs[1:])), errs
    assert errs[-1] < 1e-3

    generic = bdi(n_P=2, inside=[0.5], outside=[3.0], multiplicity=1)
    errs = [r.error for r in order_parameter_convergence(generic, ms)]
    assert all(e2 < e1 for e1, e2 in zip(errs, errs[1:])), errs
    assert errs[-1] < 1e-3

    q = [quarter_root_identity_error(m) for m in (1, 2, 4, 8)]
    assert all(e2 < e1 for e1, e2 in zip(q, q[1:])), q
    for m in range(1, 31):
        assert partial_sum_roots(m).max_abs < 1


@criterion(12, "correlators vanish outside the window")
def test_c12_window_law():
    extra = (bdi(n_P=0, inside=[0.5], outside=[3.0]), bdi(n_P=3, inside=[0.2, -0.6]), bdi(n_P=1, outside=[1.5, -2.2]))
    checked = 0
    for m in oracle_models("BDI") + extra:
        lo, hi = correlator_window(m)
        assert (lo, hi) == (m.winding - m.n_z, m.winding + m.n_Z)
        for a in [*range(lo - 4, lo), *range(hi + 1, hi + 5)]:
            for N in range(n_alpha(m, a), 26):
                assert abs(numeric_string_correlator(m, a, N)) < 1e-10, (m.to_document(), a, N)
                checked += 1
    assert checked > 0


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn()
            except Exception:  # the ledger records it
                pass
    for k in sorted(RESULTS):
        ok, title = RESULTS[k]
        print(f"{'PASS' if ok else 'FAIL'} criterion {k:>2}: {title}")
