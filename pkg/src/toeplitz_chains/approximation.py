"""Approximating a generic model by models with doubled zeros.

With ``s_m(z) = sum_{l<=m} (-1)**l binom(1/2, l) z**l = prod_l (1 - lam_l z)``
the truncations ``g_m`` of ``g(z) = prod sqrt(1 - z_j/z) prod sqrt(1 - z/Z_k)``
define models ``f_m ~ z**(N_z - N_P) g_m(z)**2`` whose zeros are all double
and which converge to the generic target on an annulus around the unit
circle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import ValidationError
from .model import AIII, BDI, ModelSpec
from .string_correlators import order_parameter

__all__ = [
    "PartialSumFactorization",
    "binomial_half",
    "partial_sum_roots",
    "approximate_model",
    "g_squared_error",
    "generic_order_parameter",
    "order_parameter_convergence",
    "quarter_root_identity_error",
    "disk_grid",
]


def binomial_half(m: int) -> np.ndarray:
    """``binom(1/2, l)`` for ``l = 0..m`` by the ratio recurrence."""
    out = np.empty(m + 1)
    out[0] = 1.0
    for l in range(m):
        out[l + 1] = out[l] * (0.5 - l) / (l + 1)
    return out


@dataclass(frozen=True)
class PartialSumFactorization:
    """``s_m(z) = prod_l (1 - lambda_l z)``."""

    m: int
    lambda_roots: tuple[complex, ...]
    max_abs: float

    @property
    def coefficients(self) -> np.ndarray:
        return binomial_half(self.m) * (-1.0) ** np.arange(self.m + 1)

    def s(self, z):
        return P.polyval(np.asarray(z, dtype=complex), self.coefficients)

    def product(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for lam in self.lambda_roots:
            out = out * (1 - lam * z)
        return out

    def residual(self, z) -> float:
        return float(np.max(np.abs(self.s(z) - self.product(z))))


def partial_sum_roots(m: int) -> PartialSumFactorization:
    """Factor the ``m``-th partial sum of ``sqrt(1 - z)``.

    Examples
    --------
    >>> partial_sum_roots(1).lambda_roots
    (0.5,)
    >>> sorted(round(x.real, 4) for x in partial_sum_roots(2).lambda_roots)
    [-0.183, 0.683]
    """
    if int(m) != m or m < 1:
        raise ValidationError("order m must be a positive integer")
    m = int(m)
    coeffs = binomial_half(m) * (-1.0) ** np.arange(m + 1)
    roots = P.polyroots(coeffs)
    lam = 1 / roots.astype(complex)
    # real roots are returned as real numbers; conjugate pairs stay paired
    lam = [complex(x.real, 0.0) if abs(x.imag) <= 1e-14 else complex(x) for x in lam]
    lam.sort(key=lambda x: (-abs(x), x.real, x.imag))
    vals = tuple(x.real if x.imag == 0 else x for x in lam)
    return PartialSumFactorization(m, vals, float(max(abs(x) for x in lam)))


def _check_target(target: ModelSpec):
    if target.multiplicity != 1:
        raise ValidationError("the target must be a multiplicity-1 model")


def approximate_model(target: ModelSpec, m: int) -> ModelSpec:
    """Doubled-zero model ``f_m`` with zeros ``lambda_l z_j`` and ``Z_k / lambda_p``.

    ``n_P = 2 N_z m - N_z + N_P`` so the winding number equals the target's.
    """
    _check_target(target)
    lam = [complex(x) for x in partial_sum_roots(m).lambda_roots]
    inside = [l * z for z in target.zeros_inside for l in lam]
    outside = [Z / l for Z in target.zeros_outside for l in lam]
    # f_m = phase * prod(-Z_k) * prod (lam_p / Z_k)**2 * z**-n_P * prod(...)**2
    const = target.phase * np.prod([-Z for Z in target.zeros_outside])
    const *= np.prod([(l / Z) ** 2 for Z in target.zeros_outside for l in lam])
    const = complex(const)
    phase = const / abs(const)
    if target.cls == BDI:
        phase = complex(np.sign(phase.real))
    n_P = 2 * target.n_z * m - target.n_z + target.n_P
    return ModelSpec(target.cls, phase, n_P, tuple(inside), tuple(outside), 2)


def _g(target: ModelSpec, z):
    out = np.ones_like(z)
    for w in target.zeros_inside:
        out = out * np.sqrt(1 - w / z)
    for W in target.zeros_outside:
        out = out * np.sqrt(1 - z / W)
    return out


def g_squared_error(target: ModelSpec, m: int, samples: int = 1024) -> float:
    """``sup |g_m**2 - g**2|`` sampled on the unit circle."""
    _check_target(target)
    z = np.exp(2j * np.pi * np.arange(samples) / samples)
    fac = partial_sum_roots(m)
    gm = np.ones_like(z)
    for w in target.zeros_inside:
        gm = gm * fac.s(w / z)
    for W in target.zeros_outside:
        gm = gm * fac.s(z / W)
    return float(np.max(np.abs(gm**2 - _g(target, z) ** 2)))


def generic_order_parameter(target: ModelSpec) -> float:
    """Order parameter of a multiplicity-1 BDI model from the fourth-root product formula."""
    _check_target(target)
    if target.cls != BDI:
        raise ValidationError("the generic formula is stated for BDI models")
    zs, Zs = target.zeros_inside, target.zeros_outside
    num = np.prod([1 - a * b for a in zs for b in zs]) * np.prod([1 - 1 / (a * b) for a in Zs for b in Zs])
    den = np.prod([(1 - z / Z) ** 2 for z in zs for Z in Zs])
    return float(abs(complex(num / den)) ** 0.25)


@dataclass(frozen=True)
class ConvergenceRow:
    m: int
    value: float
    target: float
    error: float

    @property
    def log_error(self) -> float:
        return float(np.log10(self.error)) if self.error > 0 else -np.inf


def order_parameter_convergence(target: ModelSpec, m_list) -> list[ConvergenceRow]:
    """``|order_parameter(f_m) - generic formula|`` for each ``m``."""
    ref = generic_order_parameter(target)
    rows = []
    for m in m_list:
        v = order_parameter(approximate_model(target, int(m)))
        rows.append(ConvergenceRow(int(m), v, ref, abs(v - ref)))
    return rows


def disk_grid(R: float = 0.9, n_r: int = 10, n_theta: int = 32) -> np.ndarray:
    """Polar grid on ``|z| <= R`` including the origin."""
    r = np.linspace(0, R, n_r + 1)[1:]
    t = 2 * np.pi * np.arange(n_theta) / n_theta
    return np.concatenate([[0j], (r[:, None] * np.exp(1j * t)[None, :]).ravel()])


def quarter_root_identity_error(m: int, z_samples=None) -> float:
    """``max |(1 - z)**(1/4) - prod_{a,b} (1 - lam_a lam_b z)|`` over the samples.

    Examples
    --------
    >>> round(quarter_root_identity_error(1, [0.5]), 6)
    0.034104
    """
    z = disk_grid() if z_samples is None else np.asarray(z_samples, dtype=complex)
    if np.any(np.abs(z) >= 1):
        raise ValidationError("samples must satisfy |z| < 1")
    lam = np.array([complex(x) for x in partial_sum_roots(m).lambda_roots])
    prod = np.ones_like(z)
    for c in (lam[:, None] * lam[None, :]).ravel():
        prod = prod * (1 - c * z)
    return float(np.max(np.abs((1 - z) ** 0.25 - prod)))
