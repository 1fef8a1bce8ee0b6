"""String correlators, order parameters, correlation lengths and the EFP.

For a model with doubled zeros the string correlator
``<O_alpha(1) O_alpha(N+1)>`` is, for ``N >= N_alpha``, a finite sum of
geometric terms ``C_M r_M**N`` over subsets ``M`` of the zeros (BDI) or the
squared modulus of such a sum (AIII).  The window
``omega - n_z <= alpha <= omega + n_Z`` contains every non-vanishing channel.

Two labellings of the terms are used.  Case 1 indexes zeros
``tau = (z_1..z_nz, Z_1..Z_nZ)`` and holds for
``alpha <= omega + n_Z - n_z``; Case 2 indexes inverse zeros and holds for
``alpha >= omega + n_Z - n_z``.  When ``n_z = 0`` (``n_Z = 0``) the limiting
procedure that removes the missing zero collapses onto Case 1 (Case 2) with
the empty products set to one, which covers the whole window in one branch.
"""

from __future__ import annotations

import cmath
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateRoots, NonGenericNeedsLimit, ValidationError
from .model import AIII, BDI, ModelSpec
from .symbol import _require_doubled, efp_sampler, efp_symbol, string_sampler, string_symbol
from .toeplitz_engine import (
    SubsetTerm,
    day_determinant,
    day_with_limit,
    numeric_toeplitz_det,
    sum_terms,
)

log = logging.getLogger(__name__)

DEFAULT_PERTURBATION = 1e-6
COINCIDENCE_TOL = 1e-9
MODULUS_TIE_TOL = 1e-9


def _log(x: complex) -> complex:
    x = complex(x)
    return complex(-math.inf) if x == 0 else cmath.log(x)


def n_alpha(m: ModelSpec, alpha: int) -> int:
    """Smallest ``N`` from which the closed form applies."""
    return max(abs(m.n_z + m.n_Z - m.n_P - alpha), 1)


def correlator_window(m: ModelSpec) -> tuple[int, int]:
    """Inclusive range of ``alpha`` with non-vanishing correlators."""
    w = m.winding
    return w - m.n_z, w + m.n_Z


@dataclass(frozen=True)
class CorrelatorSeries:
    """``<O_alpha(1) O_alpha(N+1)>`` as a sum of subset terms, ``N >= N_alpha``.

    BDI values are ``oscillation**N * sum_M C_M r_M**N``; AIII values are
    ``|sum_M C_M r_M**N|**2`` and ``oscillation`` is one.
    """

    cls: str
    alpha: int
    N_alpha: int
    oscillation: complex
    terms: tuple[SubsetTerm, ...]
    case: str

    def complex_sum(self, N: int) -> complex:
        return sum_terms(self.terms, N)

    def evaluate(self, N: int) -> float:
        if N < self.N_alpha:
            raise ValueError(f"closed form needs N >= {self.N_alpha}")
        total = self.complex_sum(N)
        if self.cls == AIII:
            return abs(total) ** 2
        return (self.oscillation**N * total).real

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "N_alpha": self.N_alpha,
            "osc": [self.oscillation.real, self.oscillation.imag],
            "case": self.case,
            "terms": [t.to_json() for t in self.terms],
        }


def _check_distinct_zeros(m: ModelSpec, tol: float = COINCIDENCE_TOL):
    zeros = list(m.zeros_inside) + list(m.zeros_outside)
    for a, b in itertools.combinations(zeros, 2):
        if abs(a - b) <= tol * max(1.0, abs(a)):
            raise NonGenericNeedsLimit(f"zeros {a} and {b} coincide; the closed form needs a limit")


def _case1_terms(zs, Zs, alpha, n_P, bar) -> list[SubsetTerm]:
    nz, nZ = len(zs), len(Zs)
    tau = list(zs) + list(Zs)
    e = nz + nZ - n_P - alpha
    size = alpha + n_P - nz
    inv_Zb = [1 / bar(Z) for Z in Zs]
    inv_zb = [1 / bar(z) for z in zs]
    const = -sum(_log(u - v) for u in inv_zb for v in inv_Zb)
    const += -e * sum(_log(bar(z)) for z in zs)
    r_base = -sum(_log(bar(Z)) for Z in Zs)
    out = []
    for M in itertools.combinations(range(nz + nZ), size):
        comp = [k for k in range(nz + nZ) if k not in M]
        logC = const
        for k in comp:
            logC += sum(_log(tau[k] - v) for v in inv_Zb)
            logC -= sum(_log(tau[k] - tau[j]) for j in M)
            logC -= e * _log(tau[k])
        for j in M:
            logC += sum(_log(u - tau[j]) for u in inv_zb)
        logr = r_base + sum(_log(tau[k]) for k in comp)
        out.append(SubsetTerm(M, cmath.exp(logr), cmath.exp(logC)))
    return out


def _case2_terms(zs, Zs, alpha, n_P, bar) -> list[SubsetTerm]:
    nz, nZ = len(zs), len(Zs)
    tau = [1 / z for z in zs] + [1 / Z for Z in Zs]
    e2 = n_P + alpha - nz - nZ
    size = 2 * nz + nZ - n_P - alpha
    zb = [bar(z) for z in zs]
    Zb = [bar(Z) for Z in Zs]
    const = e2 * sum(_log(u) for u in Zb)
    const -= sum(_log(u - v) for u in Zb for v in zb)
    r_base = sum(_log(z) for z in zs) + sum(_log(Z / bar(Z)) for Z in Zs)
    out = []
    for M in itertools.combinations(range(nz + nZ), size):
        comp = [k for k in range(nz + nZ) if k not in M]
        logC = const
        for k in comp:
            logC += sum(_log(tau[k] - v) for v in zb)
            logC -= sum(_log(tau[k] - tau[j]) for j in M)
            logC -= e2 * _log(tau[k])
        for j in M:
            logC += sum(_log(u - tau[j]) for u in Zb)
        logr = r_base + sum(_log(tau[k]) for k in comp)
        out.append(SubsetTerm(M, cmath.exp(logr), cmath.exp(logC)))
    return out


def correlator_series(m: ModelSpec, alpha: int) -> CorrelatorSeries:
    """Closed-form series of the string correlator in channel ``alpha``.

    Raises
    ------
    NonGenericNeedsLimit
        If two zeros coincide, so that some ``C_M`` diverges.
    """
    _require_doubled(m)
    alpha = int(alpha)
    nz, nZ, nP = m.n_z, m.n_Z, m.n_P
    osc = complex((-1) ** (nP + 1) * m.phase) if m.cls == BDI else 1 + 0j
    Na = n_alpha(m, alpha)
    lo, hi = correlator_window(m)
    if nz == 0 and nZ == 0:
        terms = (SubsetTerm((), 1 + 0j, 1 + 0j),) if alpha == -nP else ()
        return CorrelatorSeries(m.cls, alpha, Na, osc, terms, "trivial")
    if alpha < lo or alpha > hi:
        return CorrelatorSeries(m.cls, alpha, Na, osc, (), "zero")
    _check_distinct_zeros(m)
    bar = np.conj if m.cls == AIII else (lambda x: x)
    zs, Zs = m.zeros_inside, m.zeros_outside
    if alpha <= m.winding + nZ - nz:
        terms, case = _case1_terms(zs, Zs, alpha, nP, bar), "case1"
    else:
        terms, case = _case2_terms(zs, Zs, alpha, nP, bar), "case2"
    return CorrelatorSeries(m.cls, alpha, Na, osc, tuple(terms), case)


# ---------------------------------------------------------------------------
# point evaluation

@dataclass(frozen=True)
class CorrelatorValue:
    value: float
    method: str
    perturbed: bool = False
    warnings: tuple[str, ...] = field(default=())


def _from_determinant(m: ModelSpec, alpha: int, N: int, det: complex) -> float:
    if m.cls == AIII:
        return abs(det) ** 2
    return ((-1) ** (N * (alpha - 1)) * det).real


def _exact_value(m: ModelSpec, alpha: int, N: int) -> tuple[float, str]:
    series = correlator_series(m, alpha)
    if series.case == "trivial":
        # the symbol is a pure power of z, so the series holds for every N
        total = series.complex_sum(N)
        value = abs(total) ** 2 if m.cls == AIII else (series.oscillation**N * total).real
        return value, "trivial"
    if N >= series.N_alpha:
        return series.evaluate(N), series.case
    det = day_with_limit(string_symbol(m, alpha), N).value
    return _from_determinant(m, alpha, N, det), "day_limit"


def _split_coincident(m: ModelSpec, eps: float) -> ModelSpec:
    """Separate coincident zeros by real rescalings ``w -> w (1 + j eps)``."""

    def spread(ws):
        out = []
        for w in ws:
            j = sum(1 for u in ws[: len(out)] if abs(u - w) <= COINCIDENCE_TOL * max(1.0, abs(w)))
            out.append(w * (1 + j * eps))
        return out

    return ModelSpec(m.cls, m.phase, m.n_P, tuple(spread(list(m.zeros_inside))),
                     tuple(spread(list(m.zeros_outside))), m.multiplicity)


def evaluate_correlator(m: ModelSpec, alpha: int, N: int, *, strict: bool = False,
                        perturbation: float = DEFAULT_PERTURBATION) -> CorrelatorValue:
    """String correlator with its provenance.

    Coincident zeros are split by a relative ``perturbation`` and the value
    is extrapolated linearly from ``eps`` and ``eps/2``, unless ``strict``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    try:
        value, method = _exact_value(m, alpha, N)
        return CorrelatorValue(value, method)
    except NonGenericNeedsLimit:
        if strict:
            raise
    v1, _ = _exact_value(_split_coincident(m, perturbation), alpha, N)
    v2, method = _exact_value(_split_coincident(m, perturbation / 2), alpha, N)
    msg = f"coincident zeros split by eps={perturbation:g} and extrapolated"
    log.info(msg)
    return CorrelatorValue(2 * v2 - v1, method + "+perturbed", True, (msg,))


def string_correlator(m: ModelSpec, alpha: int, N: int, *, strict: bool = False,
                      perturbation: float = DEFAULT_PERTURBATION) -> float:
    """``<O_alpha(1) O_alpha(N+1)>`` for a BDI model with doubled zeros.

    Examples
    --------
    >>> from toeplitz_chains import bdi
    >>> round(string_correlator(bdi(inside=[0.5], outside=[3]), 2, 40), 12)
    0.96
    """
    if m.cls != BDI:
        raise ValidationError("string_correlator needs a BDI model; use aiii_string_correlator")
    return evaluate_correlator(m, alpha, N, strict=strict, perturbation=perturbation).value


def aiii_string_correlator(m: ModelSpec, alpha: int, N: int, *, strict: bool = False,
                           perturbation: float = DEFAULT_PERTURBATION) -> float:
    """AIII string correlator ``|D_N|**2`` for a model with doubled zeros."""
    if m.cls != AIII:
        raise ValidationError("aiii_string_correlator needs an AIII model")
    return evaluate_correlator(m, alpha, N, strict=strict, perturbation=perturbation).value


def numeric_string_correlator(m: ModelSpec, alpha: int, N: int) -> float:
    """Brute-force correlator from the FFT Toeplitz determinant of ``f/|f| z**-alpha``."""
    det = numeric_toeplitz_det(string_sampler(m, alpha), N).value
    return _from_determinant(m, alpha, N, det)


# ---------------------------------------------------------------------------
# order parameter, lengths, asymptotics

def remove_mutually_inverse(m: ModelSpec, tol: float = COINCIDENCE_TOL) -> ModelSpec:
    """Drop pairs ``z_j``, ``Z_k`` with ``z_j Z_k = 1`` (``z_j conj(Z_k) = 1`` for AIII).

    The pole degree is shifted so the winding number is unchanged.
    """
    bar = np.conj if m.cls == AIII else (lambda x: x)
    inside, outside = list(m.zeros_inside), list(m.zeros_outside)
    removed = 0
    for z in list(inside):
        for Z in outside:
            if abs(z * bar(Z) - 1) <= tol:
                inside.remove(z)
                outside.remove(Z)
                removed += 1
                break
    if not removed:
        return m
    return ModelSpec(m.cls, m.phase, m.n_P - m.multiplicity * removed, tuple(inside),
                     tuple(outside), m.multiplicity)


def _repeated(ws, k):
    return [w for w in ws for _ in range(k)]


def order_parameter(m: ModelSpec) -> float:
    """Limit of ``|<O_omega(1) O_omega(N+1)>|`` as ``N -> infinity``.

    With the zeros listed with their multiplicity, BDI uses the fourth root
    and AIII the square root (conjugating the second factor of each pair) of

        prod (1 - z z') prod (1 - 1/(Z Z')) / prod (1 - z/Z)**2.

    For doubled zeros the BDI value reduces to the same expression over the
    distinct zeros without the root.

    Examples
    --------
    >>> from toeplitz_chains import bdi
    >>> round(order_parameter(bdi(inside=[0.5], outside=[3])), 12)
    0.96
    >>> order_parameter(bdi(inside=[0.5], outside=[2]))
    1.0
    """
    m = remove_mutually_inverse(m)
    zs = _repeated(m.zeros_inside, m.multiplicity)
    Zs = _repeated(m.zeros_outside, m.multiplicity)
    bar = np.conj if m.cls == AIII else (lambda x: x)
    logv = 0j
    logv += sum(_log(1 - a * bar(b)) for a in zs for b in zs)
    logv += sum(_log(1 - 1 / (a * bar(b))) for a in Zs for b in Zs)
    if m.cls == AIII:
        logv -= sum(2 * math.log(abs(1 - z / Z)) for z in zs for Z in Zs)
        power = 0.5
    else:
        logv -= sum(2 * _log(1 - z / Z) for z in zs for Z in Zs)
        power = 0.25
    if not zs and not Zs:
        return 1.0
    return math.exp(power * logv.real)


INFINITE_LENGTH = math.inf


@dataclass(frozen=True)
class LengthTable:
    """Correlation lengths ``xi_alpha`` of the string channels.

    ``lengths`` maps each ``alpha`` in the window other than ``omega`` to a
    finite positive length; channels outside the window map to ``inf``.  The
    order-parameter channel is kept apart in ``ordered_channel``.
    """

    omega: int
    window: tuple[int, int]
    lengths: dict[int, float]
    ordered_channel: int

    def __getitem__(self, alpha: int) -> float:
        if alpha == self.ordered_channel:
            raise KeyError(f"alpha={alpha} is the ordered channel; it has no decay length")
        return self.lengths.get(alpha, INFINITE_LENGTH)


def inverse_length(m: ModelSpec, alpha: int) -> float:
    """Decay rate ``1/xi_alpha``; ``inf`` outside the window, ``0`` at ``omega``.

    AIII correlators are squared moduli, so their rate is twice the BDI rate.
    """
    _require_doubled(m)
    lo, hi = correlator_window(m)
    if alpha < lo or alpha > hi:
        return math.inf
    w = m.winding
    if alpha < w:
        rate = sum(-math.log(abs(z)) for z in m.zeros_inside[: w - alpha])
    else:
        rate = sum(math.log(abs(Z)) for Z in m.zeros_outside[: alpha - w])
    return 2 * rate if m.cls == AIII else rate


def correlation_lengths(m: ModelSpec) -> LengthTable:
    """Correlation length of every channel in the window, from the zeros."""
    lo, hi = correlator_window(m)
    w = m.winding
    lengths = {}
    for a in range(lo, hi + 1):
        if a == w:
            continue
        rate = inverse_length(m, a)
        lengths[a] = 1.0 / rate if rate > 0 else INFINITE_LENGTH
    return LengthTable(w, (lo, hi), lengths, w)


@dataclass(frozen=True)
class TermGroup:
    """Terms sharing the modulus ``|r_M|``; ``coefficient`` sums their ``C_M``."""

    modulus: float
    terms: tuple[SubsetTerm, ...]

    @property
    def coefficient(self) -> complex:
        return sum((t.C for t in self.terms), 0j)


def asymptotic_terms(m: ModelSpec, alpha: int, k: int = 1) -> list[TermGroup]:
    """The ``k`` slowest-decaying groups of terms, ranked by ``|r_M|``."""
    series = correlator_series(m, alpha)
    live = sorted((t for t in series.terms if t.C != 0), key=lambda t: -abs(t.r))
    groups: list[list[SubsetTerm]] = []
    for t in live:
        if groups and abs(abs(groups[-1][0].r) - abs(t.r)) <= MODULUS_TIE_TOL * abs(t.r):
            groups[-1].append(t)
        else:
            groups.append([t])
    return [TermGroup(abs(g[0].r), tuple(g)) for g in groups[:k]]


# ---------------------------------------------------------------------------
# emptiness formation probability

def emptiness_formation(m: ModelSpec, N: int) -> float:
    """Probability that ``N`` consecutive sites are empty, ``|D_N[(1 - f/|f|)/2]|``.

    Examples
    --------
    >>> from toeplitz_chains import bdi
    >>> round(emptiness_formation(bdi(n_P=2, inside=[0.5], outside=[4]), 1), 12)
    0.035714285714
    """
    _require_doubled(m)
    if m.cls != BDI:
        raise ValidationError("emptiness formation is implemented for BDI models")
    if N < 1:
        raise ValueError("N must be positive")
    if m.n_z == 0 and m.n_Z == 0:
        if m.n_P != 0:
            return 2.0**-N
        return 0.0 if m.sigma == 1 else 1.0
    try:
        return abs(day_determinant(efp_symbol(m), N).value)
    except DegenerateRoots:
        log.warning("EFP symbol has degenerate roots; using the numeric determinant")
        return abs(numeric_toeplitz_det(efp_sampler(m), N).value)


def numeric_emptiness_formation(m: ModelSpec, N: int) -> float:
    return abs(numeric_toeplitz_det(efp_sampler(m), N).value)
