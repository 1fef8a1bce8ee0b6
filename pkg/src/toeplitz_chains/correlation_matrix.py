"""Subsystem correlation matrices, entanglement spectra and characteristic polynomials.

For a BDI model the Majorana correlation matrix ``A_N`` is the block Toeplitz
matrix of ``[[0, s], [-1/s, 0]]`` with ``s = f/|f|``; it is real
antisymmetric with eigenvalues ``+-i nu_j``.  For AIII the Hermitian matrix
``Ahat_N = 1 - 2 C_N`` is the block Toeplitz matrix of ``[[0, -s], [-1/s, 0]]``
with eigenvalues ``+-nu_j``.  In both cases ``nu_j = 1`` is trivial and all
entanglement comes from the remaining ``d`` eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergent, StructureViolation, ValidationError
from .model import AIII, BDI, ModelSpec
from .parallel import ordered_map
from .smith_fixtures import SmithFixture, gorodetsky_ratio
from .string_correlators import string_correlator
from .symbol import block_symbol_sampler, fft_coefficients, two_point_coefficients

__all__ = [
    "NONTRIVIAL_TOL",
    "SpectralReport",
    "correlation_matrix",
    "correlation_spectrum",
    "char_poly",
    "char_poly_structure",
    "det_identity_residual",
    "gorodetsky_ratio",
    "fixture_char_poly",
    "widom_limit",
    "quartic_widom_constant",
    "entropies_from_nu",
    "reduced_density_spectrum",
]

NONTRIVIAL_TOL = 1e-9
DEFAULT_ORDERS = (1.0, 2.0)


# ---------------------------------------------------------------------------
# matrices

def _coefficients(m: ModelSpec, N: int):
    """``s_n`` for ``|n| < N`` as a dense array indexed by ``n + N - 1``."""
    if m.multiplicity == 2:
        return two_point_coefficients(m, -(N - 1), N - 1).values
    # no rational branch: FFT of the unit-modulus symbol
    return fft_coefficients(lambda z: block_symbol_sampler(m)(z)[..., 0, 1] * (1 if m.cls == BDI else -1),
                            -(N - 1), N - 1).values


def correlation_matrix(m: ModelSpec, N: int) -> np.ndarray:
    """``A_N`` (BDI, real) or ``Ahat_N`` (AIII, Hermitian), size ``2N x 2N``."""
    if N < 1:
        raise ValidationError("N must be positive")
    s = _coefficients(m, N)
    idx = np.arange(N)
    diff = idx[:, None] - idx[None, :] + N - 1  # m - n shifted
    upper = s[diff]
    lower = np.conj(s[diff.T])  # conj(s_{n-m}); real for BDI
    out = np.zeros((2 * N, 2 * N), dtype=complex)
    if m.cls == BDI:
        out[0::2, 1::2] = upper
        out[1::2, 0::2] = -lower
        return out.real.copy()
    out[0::2, 1::2] = -upper
    out[1::2, 0::2] = -lower
    return out


def _signed_spectrum(m: ModelSpec, N: int) -> np.ndarray:
    """Real eigenvalues of ``i A_N`` or ``Ahat_N``, ascending."""
    A = correlation_matrix(m, N)
    H = 1j * A if m.cls == BDI else A
    return np.linalg.eigvalsh(H)


# ---------------------------------------------------------------------------
# entropies

def _binary_entropy(p: np.ndarray) -> float:
    p = np.clip(p, 0.0, 1.0)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = -np.where(p > 0, p * np.log(p), 0.0) - np.where(q > 0, q * np.log(q), 0.0)
    return float(np.sum(terms))


def _renyi(p: np.ndarray, order: float) -> float:
    p = np.clip(p, 0.0, 1.0)
    return float(np.sum(np.log(p**order + (1 - p) ** order)) / (1 - order))


def entropies_from_nu(nu, orders=DEFAULT_ORDERS, weight: int = 1) -> dict[float, float]:
    """Renyi entropies ``{order: S}`` from correlation eigenvalues; order 1 is von Neumann.

    Each ``nu`` contributes the binary entropy of ``(1 + nu)/2``; ``weight``
    counts how many fermionic modes share it (2 for AIII).
    """
    p = (1 + np.asarray(nu, dtype=float)) / 2
    out = {}
    for a in orders:
        a = float(a)
        if a <= 0:
            raise ValidationError("Renyi orders must be positive")
        out[a] = weight * (_binary_entropy(p) if a == 1.0 else _renyi(p, a))
    return out


def reduced_density_spectrum(nu) -> np.ndarray:
    """The ``2**len(nu)`` eigenvalues ``prod_j (1 + (-1)**x_j nu_j)/2`` of the reduced density matrix."""
    nu = np.asarray(nu, dtype=float)
    if len(nu) > 20:
        raise ValidationError("reduced spectrum limited to 20 eigenvalues")
    lam = np.ones(1)
    for v in nu:
        lam = np.concatenate([lam * (1 + v) / 2, lam * (1 - v) / 2])
    return lam


@dataclass(frozen=True)
class SpectralReport:
    """Entanglement data of an ``N``-site block.

    ``nu`` holds the ``N`` non-negative eigenvalues in ascending order; ``d``
    counts those with ``|nu - 1| > NONTRIVIAL_TOL``.  ``entropies`` maps the
    Renyi order to its value, order ``1.0`` being von Neumann.
    """

    N: int
    nu: tuple[float, ...]
    d: int
    entropies: dict = field(default_factory=dict)
    cls: str = BDI

    @property
    def nontrivial(self) -> tuple[float, ...]:
        return tuple(v for v in self.nu if abs(v - 1) > NONTRIVIAL_TOL)

    def csv_row(self, width: int | None = None) -> list:
        nu = list(self.nu) + [""] * ((width or len(self.nu)) - len(self.nu))
        return [self.N, *nu, self.d, self.entropies.get(1.0), self.entropies.get(2.0)]

    def to_json(self) -> dict:
        return {"N": self.N, "nu": list(self.nu), "d": self.d,
                "entropies": {str(k): v for k, v in self.entropies.items()}}


def correlation_spectrum(m: ModelSpec, N: int, orders=DEFAULT_ORDERS) -> SpectralReport:
    """Correlation eigenvalues and entropies of an ``N``-site block.

    Examples
    --------
    >>> from toeplitz_chains import bdi
    >>> r = correlation_spectrum(bdi(n_P=1, inside=[0.5]), 4)
    >>> [round(v, 12) for v in r.nu], r.d
    ([0.0625, 1.0, 1.0, 1.0], 1)
    """
    ev = _signed_spectrum(m, N)
    nu = np.clip(ev[N:], 0.0, None)
    trivial_gap = np.abs(nu - 1)
    d = int(np.sum(trivial_gap > NONTRIVIAL_TOL))
    weight = 2 if m.cls == AIII else 1
    ent = entropies_from_nu(nu, orders, weight)
    return SpectralReport(N, tuple(float(v) for v in nu), d, ent, m.cls)


# ---------------------------------------------------------------------------
# characteristic polynomial

def char_poly(m: ModelSpec, N: int, lam: complex) -> complex:
    """``det(i lam - A_N)`` for BDI, ``det(lam - Ahat_N)`` for AIII."""
    if N == 0:
        return 1 + 0j
    A = correlation_matrix(m, N)
    shift = 1j * lam if m.cls == BDI else lam
    sign, logabs = np.linalg.slogdet(shift * np.eye(2 * N) - A)
    return complex(sign * math.exp(logabs)) if np.isfinite(logabs) else 0j


def fixture_char_poly(fix: SmithFixture, N: int, lam: complex) -> complex:
    """Numeric characteristic polynomial of the fixture's model, for comparison."""
    return char_poly(fix.model, N, lam)


@dataclass(frozen=True)
class CharPolyStructure:
    """``d`` and the table ``x_j(N) = nu_j**2`` of non-trivial eigenvalues per ``N``."""

    d: int
    counts: dict
    x_table: dict

    def to_json(self) -> dict:
        return {"d": self.d, "counts": {str(k): v for k, v in self.counts.items()},
                "x": {str(k): list(v) for k, v in self.x_table.items()}}


def char_poly_structure(m: ModelSpec, N_list) -> CharPolyStructure:
    """Check ``det(i lam - A_N) = (1 - lam**2)**(N - d) prod (x_j(N) - lam**2)``.

    ``d`` is the largest non-trivial count seen; every ``N`` must show
    ``min(N, d)`` of them.

    Raises
    ------
    StructureViolation
        If the count is not of that form over ``N_list``.
    """
    N_list = sorted(set(int(n) for n in N_list))
    if not N_list or N_list[0] < 1:
        raise ValidationError("N_list must contain positive integers")
    reports = ordered_map(lambda n: correlation_spectrum(m, n), N_list)
    counts = {r.N: r.d for r in reports}
    d = max(counts.values())
    bad = {n: c for n, c in counts.items() if c != min(n, d)}
    if bad:
        raise StructureViolation(f"non-trivial count varies with N: {bad} (expected min(N, {d}))")
    table = {r.N: tuple(v * v for v in r.nontrivial) for r in reports}
    return CharPolyStructure(d, counts, table)


# ---------------------------------------------------------------------------
# determinant identity

def det_identity_residual(m: ModelSpec, N: int) -> float:
    """Relative gap between ``det A_N`` and the squared closed-form ``<O_0 O_0>``."""
    if m.cls != BDI:
        raise ValidationError("the determinant identity is stated for BDI models")
    sign, logabs = np.linalg.slogdet(correlation_matrix(m, N))
    lhs = sign * math.exp(logabs) if np.isfinite(logabs) else 0.0
    rhs = string_correlator(m, 0, N) ** 2
    scale = max(abs(lhs), abs(rhs))
    return 0.0 if scale == 0 else abs(lhs - rhs) / scale


# ---------------------------------------------------------------------------
# Widom constant

@dataclass(frozen=True)
class WidomEstimate:
    value: complex
    converged: bool
    history: tuple[complex, ...]
    warnings: tuple[str, ...] = ()


def _aitken(x0, x1, x2):
    den = x2 - 2 * x1 + x0
    if abs(den) <= 1e-14 * max(abs(x0), abs(x1), abs(x2), 1e-300):
        return x2
    return x2 - (x2 - x1) ** 2 / den


WIDOM_TOL = 1e-4


def widom_limit(m: ModelSpec, lam: complex, N_max: int = 40, *, strict: bool = False) -> WidomEstimate:
    """Large-``N`` limit of ``char_poly / (1 - lam**2)**N`` (``(lam**2 - 1)**N`` for AIII).

    The sequence is Aitken-accelerated; the estimate is flagged as not
    converged when the last two accelerated values differ by more than
    ``1e-4``.  With ``strict`` that raises :class:`NonConvergent`.
    """
    if N_max < 4:
        raise ValidationError("N_max must be at least 4")
    lam = complex(lam)
    trivial = (1 - lam**2) if m.cls == BDI else (lam**2 - 1)
    if trivial == 0:
        raise ValidationError("lambda = +-1 makes the normalisation vanish")
    Ns = range(max(1, N_max - 3), N_max + 1)
    seq = ordered_map(lambda n: char_poly(m, n, lam) / trivial**n, Ns)
    acc = [_aitken(*seq[i:i + 3]) for i in range(len(seq) - 2)]
    gap = abs(acc[-1] - acc[-2])
    converged = gap <= WIDOM_TOL
    warnings = () if converged else (f"accelerated estimates differ by {gap:.3g}",)
    if strict and not converged:
        raise NonConvergent(warnings[0])
    return WidomEstimate(complex(acc[-1]), converged, tuple(complex(v) for v in seq), warnings)


def quartic_widom_constant(a: float, b: float, lam: complex) -> complex:
    """Closed-form Widom constant for ``f = (z - a)**2 (z - b)**2 / z**2``, ``|a| < 1 < |b|``."""
    if not (abs(a) < 1 < abs(b)):
        raise ValidationError("needs |a| < 1 < |b|")
    op = (1 - a * a) * (1 - 1 / (b * b)) / (1 - a / b) ** 2
    return (lam**2 - op) ** 2 / (1 - lam**2) ** 2
