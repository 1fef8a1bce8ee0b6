"""Spectrum-level statements about the MPS transfer matrix.

With ``S = {z_j} u {1/Z_k}`` the decay ratios of all string correlators are
subset products of ``S``.  When ``n_P`` is even and the zeros are strongly
generic, the transfer matrix has eigenvalues
``mu(s) = (-sigma)**|s| prod_{tau in s} tau`` for ``s`` a subset of ``S``,
padded with zeros when ``n_P != n_z + n_Z``.  No MPS tensor is built.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateQuartic,
    NotStronglyGeneric,
    OddWindingUnsupported,
    SubsetExplosion,
    ValidationError,
)
from .model import BDI, SUBSET_CAP, ModelSpec, classify_genericity, coefficients, coupling_range, inverse_set
from .string_correlators import correlator_series

__all__ = [
    "BondBounds",
    "TransferReport",
    "EffectiveHamiltonian",
    "QuarticDecomposition",
    "bond_dimension_bounds",
    "transfer_eigenvalues",
    "rM_identification",
    "rM_coverage_check",
    "effective_hamiltonian",
    "quartic_transfer_decomposition",
]

COVERAGE_TOL = 1e-10


@dataclass(frozen=True)
class BondBounds:
    """``chi_lower <= chi <= chi_upper``.

    ``lower_verified`` is false when the model is not strongly generic, in
    which case the lower bound is not established.  ``upper_conjectured_optimal``
    records that the upper bound is only conjectured to be attained when the
    two bounds differ.
    """

    chi_lower: int
    chi_upper: int
    lower_verified: bool
    range_H: int

    @property
    def optimal(self) -> int | None:
        return self.chi_upper if self.lower_verified and self.chi_lower == self.chi_upper else None

    @property
    def upper_conjectured_optimal(self) -> bool:
        return self.optimal is None

    def to_json(self) -> dict:
        return {"chi_lower": self.chi_lower, "chi_upper": self.chi_upper,
                "lower_verified": self.lower_verified, "range_H": self.range_H,
                "optimal": self.optimal, "upper_conjectured_optimal": self.upper_conjectured_optimal}


def bond_dimension_bounds(m: ModelSpec) -> BondBounds:
    """Bounds ``ceil(2**((n_z + n_Z)/2)) <= chi <= 2**ceil(range(H)/2)``.

    Examples
    --------
    >>> from toeplitz_chains import bdi
    >>> b = bond_dimension_bounds(bdi(n_P=2, inside=[0.5], outside=[3]))
    >>> b.chi_lower, b.chi_upper, b.optimal
    (2, 2, 2)
    """
    n = m.n_z + m.n_Z
    # exact integer ceiling of 2**(n/2)
    lower = 2 ** (n // 2) if n % 2 == 0 else math.isqrt(2**n - 1) + 1
    rng = coupling_range(coefficients(m))
    upper = 2 ** math.ceil(rng / 2)
    verified = classify_genericity(m).strongly_generic
    return BondBounds(lower, upper, verified, rng)


# ---------------------------------------------------------------------------
# spectrum

@dataclass(frozen=True)
class TransferReport:
    """Transfer-matrix eigenvalues keyed by subset bit masks.

    Bit ``i`` of a mask selects ``S[i]`` for ``i < n_z + n_Z``; higher bits
    select the auxiliary zeros of the limiting construction, whose
    eigenvalues vanish.
    """

    spectrum: tuple[tuple[int, complex], ...]
    injective: bool
    chi_lower: int
    chi_upper: int
    eps_levels: tuple[complex, ...]
    theta: float
    padding: int = 0

    @property
    def values(self) -> np.ndarray:
        return np.array([mu for _, mu in self.spectrum])

    def to_json(self) -> dict:
        return {
            "spectrum": [{"subset_mask": k, "mu_re": mu.real, "mu_im": mu.imag} for k, mu in self.spectrum],
            "chi_lower": self.chi_lower,
            "chi_upper": self.chi_upper,
            "theta": self.theta,
            "injective": self.injective,
        }


def _theta(m: ModelSpec) -> float:
    # phase of the dominant string-correlator oscillation (-1)**(n_P+1) sigma
    return 0.0 if (-1) ** (m.n_P + 1) * m.sigma == 1 else math.pi


def _require_transfer_preconditions(m: ModelSpec):
    if m.cls != BDI:
        raise ValidationError("transfer spectra are derived for BDI models")
    if m.multiplicity != 2:
        raise ValidationError("transfer spectra need doubled zeros")
    if m.n_P % 2:
        raise OddWindingUnsupported("no transfer spectrum is available for odd n_P (odd winding)")
    if not classify_genericity(m).strongly_generic:
        raise NotStronglyGeneric("the transfer spectrum needs strongly generic zeros")


def transfer_eigenvalues(m: ModelSpec) -> TransferReport:
    """Full transfer spectrum ``mu(s) = (-sigma)**|s| prod tau``.

    For ``n_P = n_z + n_Z + k`` with ``k != 0`` the ``2**(n + |k|) - 2**n``
    extra eigenvalues from the limiting construction are zero.

    Raises
    ------
    OddWindingUnsupported
        If ``n_P`` is odd.
    NotStronglyGeneric
        If subset products of ``S`` collide in modulus.
    """
    _require_transfer_preconditions(m)
    S = inverse_set(m)
    n = len(S)
    k = abs(m.n_P - n)
    if n + k > SUBSET_CAP:
        raise SubsetExplosion(f"2**{n + k} transfer eigenvalues exceed the cap")
    sign = -m.sigma
    spectrum = []
    for mask in range(1 << (n + k)):
        if mask >> n:
            spectrum.append((mask, 0j))
            continue
        mu = 1 + 0j
        for i in range(n):
            if mask >> i & 1:
                mu *= sign * S[i]
        spectrum.append((mask, complex(mu)))
    bounds = bond_dimension_bounds(m)
    eps = tuple(-cmath.log(t) for t in S)
    return TransferReport(tuple(spectrum), True, bounds.chi_lower, bounds.chi_upper, eps, _theta(m),
                          (1 << (n + k)) - (1 << n))


# ---------------------------------------------------------------------------
# identification with correlator ratios

@dataclass(frozen=True)
class RatioIdentification:
    """Decay ratio ``r_M`` of channel ``alpha`` matched to a subset of ``S``."""

    alpha: int
    r: complex
    coefficient: complex
    mask: int | None


def _match_mask(r: complex, products: np.ndarray, tol: float) -> int | None:
    dist = np.abs(products - r)
    j = int(np.argmin(dist))
    return j if dist[j] <= tol * max(1.0, abs(r)) else None


def rM_identification(m: ModelSpec, tol: float = COVERAGE_TOL) -> list[RatioIdentification]:
    """All ``r_M`` of the in-window channels, each matched to a subset mask of ``S``."""
    from .model import subset_products
    from .string_correlators import correlator_window

    products = subset_products(inverse_set(m))
    lo, hi = correlator_window(m)
    out = []
    for alpha in range(lo, hi + 1):
        for t in correlator_series(m, alpha).terms:
            if t.C != 0:
                out.append(RatioIdentification(alpha, t.r, t.C, _match_mask(t.r, products, tol)))
    return out


def rM_coverage_check(m: ModelSpec, tol: float = COVERAGE_TOL) -> bool:
    """True iff the correlator ratios are exactly the subset products of ``S``.

    Needs ``n_P = n_z + n_Z`` and at most 16 zeros.
    """
    n = m.n_z + m.n_Z
    if m.n_P != n:
        raise ValidationError("coverage is stated for n_P = n_z + n_Z")
    if n > 16:
        raise SubsetExplosion("coverage check limited to n_z + n_Z <= 16")
    ids = rM_identification(m, tol)
    if any(i.mask is None for i in ids):
        return False
    return {i.mask for i in ids} == set(range(1 << n))


# ---------------------------------------------------------------------------
# effective Hamiltonian

@dataclass(frozen=True)
class EffectiveHamiltonian:
    """Single-particle levels of a free-fermion ``H_eff`` with ``e**-H_eff`` iso-spectral to the transfer matrix."""

    eps: tuple[complex, ...]
    theta: float

    def spectrum(self) -> np.ndarray:
        """``exp(-sum_j n_j (eps_j + i theta))`` indexed by occupation mask."""
        levels = [e + 1j * self.theta for e in self.eps]
        out = np.ones(1, dtype=complex)
        for lv in levels:
            out = np.concatenate([out, out * np.exp(-lv)])
        return out

    def to_json(self) -> dict:
        return {"eps": [[e.real, e.imag] for e in self.eps], "theta": self.theta}


def effective_hamiltonian(m: ModelSpec) -> EffectiveHamiltonian:
    """``eps_j = -log tau_j`` on the principal branch, with ``e**(i theta) = -sigma``."""
    _require_transfer_preconditions(m)
    return EffectiveHamiltonian(tuple(-cmath.log(t) for t in inverse_set(m)), _theta(m))


# ---------------------------------------------------------------------------
# quartic example

@dataclass(frozen=True)
class QuarticDecomposition:
    """Diagonal form of the transfer matrix of ``z**-2 (z-a)**2 (z-b)**2``.

    ``eigenvalues`` maps each channel (``I``, ``Y``, ``X``, ``Ztilde``) to its
    eigenvalue; ``C`` holds the normalizers with
    ``<W_1 W_{N+1}> = C[W] mu_W**(N-1)``.  ``shift`` defines
    ``Ztilde = Z - shift``.
    """

    a: float
    b: float
    eigenvalues: dict
    C: dict
    shift: float

    def channel_correlator(self, channel: str, N: int) -> float:
        if N < 1:
            raise ValidationError("N must be positive")
        return self.C[channel] * self.eigenvalues[channel] ** (N - 1)

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "eigenvalues": self.eigenvalues, "C": self.C, "shift": self.shift}


#: channel of each transfer eigenvalue as a string-correlator index (n_P = 2)
QUARTIC_CHANNEL_ALPHA = {"Y": -1, "X": 1}


def quartic_transfer_decomposition(a: float, b: float) -> QuarticDecomposition:
    """Eigenvalues ``{1, -a, -1/b, a/b}`` and normalizers for ``|a| < 1 < |b|``.

    Examples
    --------
    >>> q = quartic_transfer_decomposition(0.5, 3.0)
    >>> [round(q.eigenvalues[k], 12) for k in ("I", "Y", "X", "Ztilde")]
    [1.0, -0.5, -0.333333333333, 0.166666666667]
    """
    a, b = float(a), float(b)
    if not (0 < abs(a) < 1 < abs(b)):
        raise ValidationError("needs real 0 < |a| < 1 < |b|")
    if abs(a * b - 1) <= 1e-12:
        raise DegenerateQuartic("b = 1/a removes both zeros (mutually inverse pair)")
    C_Y = (b * b - 1) * (a * b - 1) / (b * b * (a - b))
    C_X = (1 - a * a) * (1 - a * b) / (a - b)
    C_Z = (1 - a * a) * (1 - b**-2) * (a * b - 1) ** 2 / (a - b) ** 2
    shift = ((a * a - 1) * b * b - a * b + 1) / (b * (a - b))
    eig = {"I": 1.0, "Y": -a, "X": -1 / b, "Ztilde": a / b}
    return QuarticDecomposition(a, b, eig, {"Y": C_Y, "X": C_X, "Ztilde": C_Z}, shift)
