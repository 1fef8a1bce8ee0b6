"""Symbols of the Toeplitz determinants and their Fourier coefficients.

Two independent representations are provided for every symbol:

* a :class:`RationalSymbol` in the canonical form consumed by Day's formula,
  ``rho * z**k * prod(z - tau) / (prod(1 - z/gamma) * prod(z - delta))``;
* a plain sampler on the unit circle built from ``f/|f|``, which feeds the
  FFT oracle and the numeric determinant routes.

For a model with doubled zeros the branch of ``sqrt(f(z)/f(1/z))`` that is
continuous on the circle and equals ``sign f(1)`` at ``z = 1`` is the rational
function ``phase * z**(-n_P) * prod (z - w)/(1/z - conj(w))``, so no branch
bookkeeping is ever needed beyond the sign ``sigma``.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import OddMultiplicity, ValidationError
from .model import BDI, ModelSpec

log = logging.getLogger(__name__)

FFT_START = 2**14
FFT_MAX = 2**22
FFT_TOL = 1e-12
POLE_SEPARATION = 1e-6


@dataclass(frozen=True)
class RationalSymbol:
    """Rational symbol in Day's canonical form.

    ``sign`` multiplies every entry of the Toeplitz matrix, so determinants
    acquire a factor ``sign**N``; it carries ``sigma`` for BDI models.
    ``epsilon_roots`` counts the roots at the origin (the ``z**k`` factor),
    which Day's formula only admits through a limit.
    """

    rho: complex
    numerator_roots: tuple[complex, ...]
    inner_poles: tuple[complex, ...]
    outer_poles: tuple[complex, ...]
    epsilon_roots: int = 0
    sign: complex = 1.0
    transposed: bool = False

    @property
    def s(self) -> int:
        return len(self.numerator_roots) + self.epsilon_roots

    @property
    def p(self) -> int:
        return len(self.inner_poles)

    @property
    def q(self) -> int:
        return len(self.outer_poles)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.sign * self.rho * z**self.epsilon_roots
        for t in self.numerator_roots:
            out = out * (z - t)
        for g in self.outer_poles:
            out = out / (1 - z / g)
        for d in self.inner_poles:
            out = out / (z - d)
        return out


def _require_doubled(m: ModelSpec):
    if m.multiplicity != 2:
        raise OddMultiplicity("operation needs a model with doubled zeros")


def string_exponent(m: ModelSpec, alpha: int) -> int:
    """Power of ``z`` left over in the string symbol, ``n_z + n_Z - n_P - alpha``."""
    return m.n_z + m.n_Z - m.n_P - alpha


def string_symbol(m: ModelSpec, alpha: int) -> RationalSymbol:
    """Symbol ``sqrt(f/fbar(1/z)) * z**(-alpha)`` of the string correlator.

    Returns the ``t(z)`` form when the leftover power of ``z`` is non-negative
    and the transposed ``t(1/z)`` form otherwise; both have the same Toeplitz
    determinant.  Conjugates are taken throughout, which is a no-op on the
    conjugate-closed zero sets of the BDI class.
    """
    _require_doubled(m)
    zs, Zs = m.zeros_inside, m.zeros_outside
    e = string_exponent(m, alpha)
    sign = m.phase
    if e >= 0:
        rho = 1.0 / complex(np.prod([-Z.conjugate() for Z in Zs]))
        return RationalSymbol(
            rho=rho,
            numerator_roots=tuple(zs) + tuple(Zs),
            inner_poles=tuple(1 / Z.conjugate() for Z in Zs),
            outer_poles=tuple(1 / z.conjugate() for z in zs),
            epsilon_roots=e,
            sign=sign,
        )
    rho = complex(np.prod([-z for z in zs])) * complex(np.prod([Z / Z.conjugate() for Z in Zs]))
    return RationalSymbol(
        rho=rho,
        numerator_roots=tuple(1 / z for z in zs) + tuple(1 / Z for Z in Zs),
        inner_poles=tuple(z.conjugate() for z in zs),
        outer_poles=tuple(Z.conjugate() for Z in Zs),
        epsilon_roots=-e,
        sign=sign,
        transposed=True,
    )


def bdi_string_symbol(m: ModelSpec, alpha: int) -> RationalSymbol:
    if m.cls != BDI:
        raise ValidationError("bdi_string_symbol needs a BDI model")
    return string_symbol(m, alpha)


def aiii_string_symbol(m: ModelSpec, alpha: int) -> RationalSymbol:
    return string_symbol(m, alpha)


def efp_symbol(m: ModelSpec) -> RationalSymbol:
    """Symbol ``(1 - f/|f|)/2`` of the emptiness formation probability.

    Numerator and denominator are cleared to polynomials; the numerator is
    the difference of the two products and its roots are found numerically.
    """
    _require_doubled(m)
    if m.cls != BDI:
        raise ValidationError("emptiness formation is implemented for BDI models")
    if m.n_z == 0 and m.n_Z == 0:
        raise ValidationError("trivial model: use emptiness_formation directly")
    sigma = m.sigma
    zs, Zs = m.zeros_inside, m.zeros_outside
    k = m.n_z + m.n_Z - m.n_P
    low = max(0, -k)  # poles at the origin after clearing z**k
    denom = P.polyfromroots([1 / Z for Z in Zs]) if Zs else np.array([1.0 + 0j])
    for z in zs:
        denom = P.polymul(denom, np.array([1.0, -z]))
    first = P.polymul(np.r_[np.zeros(low), 1.0], denom)
    second = np.r_[np.zeros(max(k, 0)), 1.0] + 0j
    for z in zs:
        second = P.polymul(second, np.array([-z, 1.0]))
    for Z in Zs:
        second = P.polymul(second, np.array([1.0, -1 / Z]))
    numer = P.polysub(first, sigma * second)
    numer = np.trim_zeros(numer, "b")
    rho = 0.5 * numer[-1]
    roots = np.roots(numer[::-1]) if len(numer) > 1 else np.array([])
    roots = _polish(numer, roots)
    return RationalSymbol(
        rho=complex(rho),
        numerator_roots=tuple(complex(r) for r in roots),
        inner_poles=tuple(1 / Z for Z in Zs) + (0.0,) * low,
        outer_poles=tuple(1 / z for z in zs),
    )


def _polish(coeffs, roots, steps=2):
    d = P.polyder(coeffs)
    out = []
    for r in roots:
        for _ in range(steps):
            dv = P.polyval(r, d)
            if dv == 0:
                break
            r = r - P.polyval(r, coeffs) / dv
        out.append(r)
    # snap roots that are real up to rounding
    return [complex(r.real, 0.0) if abs(r.imag) < 1e-13 * max(1, abs(r)) else r for r in out]


# ---------------------------------------------------------------------------
# samplers on the unit circle

def unit_phase(m: ModelSpec):
    """Sampler of ``f/|f|`` evaluated from the polynomial itself."""

    def sample(z):
        f = m(z)
        return f / np.abs(f)

    return sample


def string_sampler(m: ModelSpec, alpha: int):
    base = unit_phase(m)
    return lambda z: base(z) * np.asarray(z, dtype=complex) ** (-alpha)


def efp_sampler(m: ModelSpec):
    base = unit_phase(m)
    return lambda z: 0.5 * (1 - base(z))


def block_symbol_sampler(m: ModelSpec, lam: complex = 0.0):
    """2x2 symbol of the correlation matrix, sampled on the unit circle.

    BDI: ``[[i lam, s], [-1/s, i lam]]``; AIII: ``[[lam, -s], [-1/s, lam]]``
    with ``s = f/|f|``.
    """
    base = unit_phase(m)
    bdi_class = m.cls == BDI

    def sample(z):
        s = base(z)
        out = np.empty(s.shape + (2, 2), dtype=complex)
        if bdi_class:
            out[..., 0, 0] = out[..., 1, 1] = 1j * lam
            out[..., 0, 1] = s
            out[..., 1, 0] = -1 / s
        else:
            out[..., 0, 0] = out[..., 1, 1] = lam
            out[..., 0, 1] = -s
            out[..., 1, 0] = -1 / s
        return out

    return sample


# ---------------------------------------------------------------------------
# Fourier coefficients

@dataclass(frozen=True)
class FourierSlice:
    """Coefficients ``values[i]`` of ``z**(offset + i)``."""

    offset: int
    values: np.ndarray
    method: str

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.values))

    def __getitem__(self, n: int) -> complex:
        i = n - self.offset
        if not 0 <= i < len(self.values):
            raise IndexError(f"coefficient {n} outside the slice")
        v = self.values[i]
        return complex(v) if np.ndim(v) == 0 else v

    def to_rows(self):
        return [(int(n), float(v.real), float(v.imag), self.method)
                for n, v in zip(self.n, self.values)]


def fft_coefficients(sampler, n_lo: int, n_hi: int, *, start: int = FFT_START,
                     tol: float = FFT_TOL, block: bool = False) -> FourierSlice:
    """Fourier coefficients of a smooth sampler on the unit circle.

    The grid is doubled until two successive resolutions agree to ``tol``.
    With ``block=True`` the sampler returns ``(..., 2, 2)`` arrays.
    """
    width = max(abs(n_lo), abs(n_hi))
    L = start
    while L < 4 * width + 16:
        L *= 2
    prev = None
    while True:
        z = np.exp(2j * np.pi * np.arange(L) / L)
        vals = sampler(z)
        coeffs = np.fft.fft(vals, axis=0) / L
        idx = np.arange(n_lo, n_hi + 1) % L
        cur = coeffs[idx]
        if prev is not None and np.max(np.abs(cur - prev)) <= tol:
            return FourierSlice(n_lo, cur, "fft")
        if L >= FFT_MAX:
            log.warning("FFT coefficients did not settle below %g at L=%d", tol, L)
            return FourierSlice(n_lo, cur, "fft")
        prev = cur
        L *= 2


def tilde_sampler(m: ModelSpec):
    """Sampler of the two-point symbol with the ``z**k`` factor removed."""
    _require_doubled(m)
    zs, Zs = m.zeros_inside, m.zeros_outside

    def sample(z):
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for w in zs + Zs:
            out = out * (z - w) / (1 - w.conjugate() * z)
        return out

    return sample


def _residue_sums(m: ModelSpec, n: int) -> complex:
    """Residue sums as printed for the two-point coefficients (without sign)."""
    zs, Zs = m.zeros_inside, m.zeros_outside
    if n > 0:
        total = 0j
        for k, zk in enumerate(zs):
            num = np.prod([1 - zj * zk.conjugate() for zj in zs]) * np.prod(
                [1 - Zj * zk.conjugate() for Zj in Zs])
            den = np.prod([zj.conjugate() - zk.conjugate() for j, zj in enumerate(zs) if j != k]) * np.prod(
                [Zj.conjugate() - zk.conjugate() for Zj in Zs])
            total += num / den * zk.conjugate() ** (n - 1)
        return -total
    total = 0j
    for k, Zk in enumerate(Zs):
        num = np.prod([1 - zj * Zk.conjugate() for zj in zs]) * np.prod(
            [1 - Zj * Zk.conjugate() for Zj in Zs])
        den = np.prod([zj.conjugate() - Zk.conjugate() for zj in zs]) * np.prod(
            [Zj.conjugate() - Zk.conjugate() for j, Zj in enumerate(Zs) if j != k])
        total += num / den * Zk.conjugate() ** (n - 1)
    return total


def _residue_coefficient(m: ModelSpec, n: int, convention: float) -> complex:
    value = convention * _residue_sums(m, n)
    if n == 0:
        value += complex(np.prod([-w for w in m.zeros_inside + m.zeros_outside]))
    return value


@functools.lru_cache(maxsize=1)
def residue_convention() -> float:
    """Sign multiplying the residue sums, fixed once against the FFT oracle.

    The sums as printed hold up to a factor ``(-1)**(n_z + n_Z)``; the
    reference model ``(z - 0.5)**2`` has ``n_z + n_Z = 1`` and so resolves
    the convention.
    """
    ref = ModelSpec(BDI, 1, 0, (0.5,), ())
    fft = fft_coefficients(tilde_sampler(ref), 1, 2)
    printed = np.array([_residue_coefficient(ref, n, 1.0) for n in (1, 2)])
    if np.allclose(printed, fft.values, atol=1e-12):
        return 1.0
    if np.allclose(-printed, fft.values, atol=1e-12):
        log.debug("residue sums adopt the sign of the FFT oracle")
        return -1.0
    raise RuntimeError("residue formulas disagree with the FFT oracle")


def _poles_separated(m: ModelSpec) -> bool:
    poles = [1 / w.conjugate() for w in m.zeros_inside + m.zeros_outside]
    for i in range(len(poles)):
        for j in range(i + 1, len(poles)):
            if abs(poles[i] - poles[j]) <= POLE_SEPARATION:
                return False
    return True


def fourier_coefficients(m: ModelSpec, n_lo: int, n_hi: int,
                         method: str = "auto") -> FourierSlice:
    """Coefficients of the two-point symbol with the ``z**k`` factor removed.

    For ``sqrt(f/fbar(1/z)) = phase * z**k * t(z)`` this returns ``t_n``.
    The residue route is used when all poles are separated by more than
    ``1e-6`` and falls back to the FFT otherwise.
    """
    if method not in ("auto", "residue", "fft"):
        raise ValidationError(f"unknown method {method!r}")
    _require_doubled(m)
    if method == "fft" or (method == "auto" and not _poles_separated(m)):
        return fft_coefficients(tilde_sampler(m), n_lo, n_hi)
    if m.n_z + m.n_Z == 0:
        vals = np.array([1.0 + 0j if n == 0 else 0j for n in range(n_lo, n_hi + 1)])
        return FourierSlice(n_lo, vals, "residue")
    sign = residue_convention() ** (m.n_z + m.n_Z)
    vals = np.array([_residue_coefficient(m, n, sign) for n in range(n_lo, n_hi + 1)])
    return FourierSlice(n_lo, vals, "residue")


def two_point_coefficients(m: ModelSpec, n_lo: int, n_hi: int,
                           method: str = "auto") -> FourierSlice:
    """Fourier coefficients ``s_n`` of the full symbol ``f/|f|``."""
    k = m.n_z + m.n_Z - m.n_P
    t = fourier_coefficients(m, n_lo - k, n_hi - k, method)
    return FourierSlice(n_lo, m.phase * t.values, t.method)


def branch_value_at_one(m: ModelSpec) -> complex:
    """Value of the rational branch at ``z = 1`` (equals ``sign f(1)`` for BDI)."""
    return complex(string_symbol(m, 0)(1.0)) if m.n_z + m.n_Z else m.phase


def one_sided_cutoff(m: ModelSpec, alpha: int) -> float:
    """Index below which string-symbol coefficients vanish when ``n_Z = 0``."""
    return m.n_z - m.n_P - alpha if m.n_Z == 0 else -math.inf
