"""Toeplitz determinants: Day's closed form and brute-force oracles.

Day's formula writes the determinant of the ``N x N`` Toeplitz matrix of a
rational symbol

    t(z) = rho * prod_{j<=s} (z - tau_j) / (prod_{j<=q} (1 - z/gamma_j) prod_{j<=p} (z - delta_j))

with ``|delta| < 1 < |gamma|`` and ``s >= p + q`` as a finite sum over the
``p``-element subsets ``M`` of the roots::

    D_N = sum_M C_M r_M**N,   r_M = (-1)**(s-p) rho prod_{k not in M} tau_k,
    C_M = prod_{k not in M, m} (tau_k - delta_m) prod_{l, j in M} (gamma_l - tau_j)
          / (prod_{l, m} (gamma_l - delta_m) prod_{k not in M, j in M} (tau_k - tau_j)).

Roots at the origin (a ``z**k`` factor) make the formula singular.  For
``N >= k`` every subset leaving such a root outside ``M`` carries a positive
power of the regulator and drops out, and the surviving terms can be
evaluated with the roots placed exactly at zero.  Below that size the
regulated formula is evaluated at several regulator values and the
polynomial dependence on the regulator is interpolated back to zero.
"""

from __future__ import annotations

import cmath
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateRoots,
    ExtrapolationUnstable,
    StructureViolation,
    SubsetExplosion,
    UnitCircleRoot,
)
from .symbol import FourierSlice, RationalSymbol, fft_coefficients

log = logging.getLogger(__name__)

TERM_RETENTION_CAP = 10**5
SUBSET_ENUMERATION_CAP = 2**21
DEGENERACY_TOL = 1e-9
CONDITION_GUARD = 1e12


@dataclass(frozen=True)
class SubsetTerm:
    """One contribution ``C * r**N`` to a determinant."""

    M: tuple[int, ...]
    r: complex
    C: complex

    def value(self, N: int) -> complex:
        if self.C == 0:
            return 0j
        if self.r == 0:
            return 0j if N > 0 else self.C
        return cmath.exp(cmath.log(self.C) + N * cmath.log(self.r))

    def to_json(self) -> dict:
        return {"M": list(self.M), "r_re": self.r.real, "r_im": self.r.imag,
                "C_re": self.C.real, "C_im": self.C.imag}


@dataclass(frozen=True)
class DeterminantResult:
    value: complex
    log_abs: float
    phase: complex
    n_terms: int = 0
    terms: tuple[SubsetTerm, ...] | None = None
    method: str = "day"
    ill_conditioned: bool = False
    warnings: tuple[str, ...] = field(default=())

    @classmethod
    def from_value(cls, value: complex, **kw) -> "DeterminantResult":
        value = complex(value)
        if value == 0:
            return cls(0j, -math.inf, 1 + 0j, **kw)
        return cls(value, math.log(abs(value)), value / abs(value), **kw)

    def to_json(self) -> dict:
        return {"value_re": self.value.real, "value_im": self.value.imag,
                "log_abs": self.log_abs, "phase": [self.phase.real, self.phase.imag],
                "n_terms": self.n_terms}


def _clog(x: complex) -> complex:
    # a vanishing factor makes the whole product vanish
    return complex(-math.inf) if x == 0 else cmath.log(x)


def _check_structure(sym: RationalSymbol):
    for d in sym.inner_poles:
        if abs(d) >= 1:
            raise UnitCircleRoot(f"inner pole {d} is not inside the unit disk")
    for g in sym.outer_poles:
        if abs(g) <= 1:
            raise UnitCircleRoot(f"outer pole {g} is not outside the unit disk")
    if sym.s < sym.p + sym.q:
        raise StructureViolation(f"Day's formula needs s >= p + q (s={sym.s}, p={sym.p}, q={sym.q})")


def _check_distinct(roots):
    scale = max([1.0] + [abs(t) for t in roots])
    for a, b in itertools.combinations(roots, 2):
        if abs(a - b) < DEGENERACY_TOL * scale:
            raise DegenerateRoots(f"roots {a} and {b} coincide")
    if any(abs(t) < DEGENERACY_TOL * scale for t in roots):
        raise DegenerateRoots("a numerator root sits at the origin")


def _day_terms(rho, sign, roots, n_zero, inner, outer) -> list[SubsetTerm]:
    """Subset terms with ``n_zero`` exact roots at the origin forced into M.

    Indices ``len(roots) .. len(roots)+n_zero-1`` label the origin roots.
    Products are accumulated as sums of complex logarithms so that neither
    over- nor underflow occurs for long root lists.
    """
    n = len(roots)
    s = n + n_zero
    p = len(inner)
    free = p - n_zero
    if free < 0 or free > n:
        return []
    if math.comb(n, free) > SUBSET_ENUMERATION_CAP:
        raise SubsetExplosion(f"{math.comb(n, free)} subsets exceed the enumeration cap")
    base = _clog((-1) ** (s - p) * rho * sign)
    const = -sum(_clog(g - d) for g in outer for d in inner)
    # the origin roots sit in M: gamma_l - 0 for each, and tau_k - 0 pairs
    const += n_zero * sum(_clog(g) for g in outer)
    terms = []
    for M in itertools.combinations(range(n), free):
        Mset = set(M)
        comp = [k for k in range(n) if k not in Mset]
        logC = const
        for k in comp:
            tk = roots[k]
            for d in inner:
                logC += _clog(tk - d)
            for j in M:
                logC -= _clog(tk - roots[j])
            logC -= n_zero * _clog(tk)
        for g in outer:
            for j in M:
                logC += _clog(g - roots[j])
        logr = base + sum(_clog(roots[k]) for k in comp)
        full_M = tuple(M) + tuple(range(n, n + n_zero))
        terms.append(SubsetTerm(full_M, cmath.exp(logr), cmath.exp(logC)))
    return terms


def day_terms(sym: RationalSymbol) -> list[SubsetTerm]:
    """N-independent subset terms of Day's formula for ``sym``.

    With roots at the origin the list is valid for ``N >= sym.epsilon_roots``.
    """
    _check_structure(sym)
    _check_distinct(sym.numerator_roots)
    return _day_terms(sym.rho, sym.sign, list(sym.numerator_roots), sym.epsilon_roots,
                      list(sym.inner_poles), list(sym.outer_poles))


def sum_terms(terms, N: int) -> complex:
    """Sum ``C_M r_M**N`` in the fixed order of the term list."""
    total = 0j
    for t in terms:
        total += t.value(N)
    return total


def _result_from_terms(terms, N, method="day") -> DeterminantResult:
    value = sum_terms(terms, N)
    keep = tuple(terms) if len(terms) <= TERM_RETENTION_CAP else None
    return DeterminantResult.from_value(value, n_terms=len(terms), terms=keep, method=method)


def day_determinant(sym: RationalSymbol, N: int) -> DeterminantResult:
    """Exact determinant by Day's formula.

    Roots at the origin are accepted only when ``N`` is large enough for the
    subsets that leave them out of ``M`` to vanish; otherwise callers must
    use :func:`day_with_limit`.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if sym.epsilon_roots and N < sym.epsilon_roots:
        raise DegenerateRoots(
            f"{sym.epsilon_roots} roots at the origin need N >= {sym.epsilon_roots}; use day_with_limit")
    return _result_from_terms(day_terms(sym), N)


def _regulated_value(sym: RationalSymbol, delta: complex, N: int) -> complex:
    """Day's formula with the origin roots replaced by the roots of z**k = delta."""
    k = sym.epsilon_roots
    mod = abs(delta) ** (1.0 / k)
    arg = cmath.phase(delta)
    reg = [mod * cmath.exp(1j * (arg + 2 * math.pi * j) / k) for j in range(k)]
    roots = list(sym.numerator_roots) + reg
    terms = _day_terms(sym.rho, sym.sign, roots, 0, list(sym.inner_poles), list(sym.outer_poles))
    return sum_terms(terms, N)


def _interpolate_at_zero(nodes, values) -> complex:
    # Lagrange interpolation evaluated at the origin
    total = 0j
    for i, (xi, yi) in enumerate(zip(nodes, values)):
        w = 1.0
        for j, xj in enumerate(nodes):
            if j != i:
                w *= (0 - xj) / (xi - xj)
        total += w * yi
    return total


def day_with_limit(sym: RationalSymbol, N: int, *, rel_tol: float = 1e-6) -> DeterminantResult:
    """Day's formula for symbols with roots at the origin, any ``N >= 1``.

    For ``N`` at or above the number of origin roots the suppressed subsets
    are dropped exactly.  Below it, the ``z**k`` factor is regulated as
    ``z**k - delta``; the Toeplitz entries are then affine in ``delta``, so
    the determinant is a polynomial of degree at most ``N`` in ``delta``.  It is
    evaluated on Chebyshev nodes at two regulator scales and interpolated to
    ``delta = 0``; the two estimates must agree to ``rel_tol``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    k = sym.epsilon_roots
    if k == 0 or N >= k:
        return day_determinant(sym, N)
    _check_structure(sym)
    _check_distinct(sym.numerator_roots)
    scale = min([1.0] + [abs(t) for t in sym.numerator_roots])
    estimates = []
    for eps in (0.5 * scale, 0.25 * scale):
        d0 = eps**k
        nodes = [d0 * math.cos((2 * i + 1) * math.pi / (2 * (N + 1))) for i in range(N + 1)]
        values = [_regulated_value(sym, x, N) for x in nodes]
        estimates.append(_interpolate_at_zero(nodes, values))
    a, b = estimates
    if abs(a - b) > rel_tol * max(1.0, abs(a)):
        raise ExtrapolationUnstable(f"regulated estimates {a} and {b} disagree")
    return DeterminantResult.from_value(a, method="day_limit")


# ---------------------------------------------------------------------------
# brute-force oracles

def _coefficients_from(provider, N: int) -> FourierSlice:
    if isinstance(provider, FourierSlice):
        return provider
    return fft_coefficients(provider, -(N - 1), N - 1)


def toeplitz_matrix(provider, N: int) -> np.ndarray:
    """``T[m, n] = t_{m-n}`` from a FourierSlice or a circle sampler."""
    c = _coefficients_from(provider, N)
    col = np.array([c[n] for n in range(0, N)])
    row = np.array([c[-n] for n in range(0, N)])
    return scipy.linalg.toeplitz(col, row)


def _lu_det(T: np.ndarray, method: str) -> DeterminantResult:
    lu, piv = scipy.linalg.lu_factor(T, check_finite=False)
    diag = np.diag(lu)
    swaps = int(np.sum(piv != np.arange(len(piv))))
    if np.any(diag == 0):
        return DeterminantResult(0j, -math.inf, 1 + 0j, method=method)
    log_abs = float(np.sum(np.log(np.abs(diag))))
    phase = complex(np.prod(diag / np.abs(diag))) * (-1) ** swaps
    phase /= abs(phase)
    value = phase * math.exp(log_abs) if log_abs > -745 else 0j
    cond = np.linalg.cond(T)
    flagged = bool(cond > CONDITION_GUARD)
    warn = (f"condition number {cond:.3g} exceeds {CONDITION_GUARD:.0e}",) if flagged else ()
    return DeterminantResult(value, log_abs, phase, method=method,
                             ill_conditioned=flagged, warnings=warn)


def numeric_toeplitz_det(provider, N: int) -> DeterminantResult:
    """Determinant of ``T_N`` by LU with partial pivoting.

    ``provider`` is a FourierSlice covering ``[-(N-1), N-1]`` or a callable
    sampling the symbol on the unit circle.
    """
    if N < 1:
        raise ValueError("N must be positive")
    return _lu_det(toeplitz_matrix(provider, N), "numeric")


def block_toeplitz_matrix(sampler, N: int) -> np.ndarray:
    """``2N x 2N`` matrix with blocks ``Phi_{m-n}`` of a 2x2 symbol."""
    coeffs = fft_coefficients(sampler, -(N - 1), N - 1)
    out = np.zeros((2 * N, 2 * N), dtype=complex)
    for m in range(N):
        for n in range(N):
            out[2 * m:2 * m + 2, 2 * n:2 * n + 2] = coeffs[m - n]
    return out


def block_toeplitz_eigen(sampler, N: int) -> np.ndarray:
    """Eigenvalues of the block Toeplitz matrix of a 2x2 symbol."""
    return np.linalg.eigvals(block_toeplitz_matrix(sampler, N))
