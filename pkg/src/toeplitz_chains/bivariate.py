"""Bivariate polynomials in ``(z, lam)`` stored as dense coefficient tables.

``coeffs[i, j]`` multiplies ``z**i * lam**j``.  Only the arithmetic needed to
transcribe closed-form matrix entries is provided.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.signal import convolve2d


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.argwhere(c != 0)
    if len(nz) == 0:
        return np.zeros((1, 1), dtype=complex)
    i, j = nz.max(axis=0)
    return c[: i + 1, : j + 1]


@dataclass(frozen=True, eq=False)
class Poly2:
    coeffs: np.ndarray

    @classmethod
    def const(cls, c) -> "Poly2":
        return cls(np.array([[complex(c)]]))

    @classmethod
    def z(cls) -> "Poly2":
        return cls(np.array([[0j], [1 + 0j]]))

    @classmethod
    def lam(cls) -> "Poly2":
        return cls(np.array([[0j, 1 + 0j]]))

    @classmethod
    def from_table(cls, rows) -> "Poly2":
        """Inverse of :meth:`to_table`."""
        arr = np.array([[complex(re, im) for re, im in row] for row in rows])
        return cls(_trim(arr))

    def to_table(self) -> list:
        return [[[float(c.real), float(c.imag)] for c in row] for row in self.coeffs]

    @staticmethod
    def _lift(other) -> "Poly2":
        return other if isinstance(other, Poly2) else Poly2.const(other)

    def __add__(self, other):
        o = self._lift(other)
        a, b = self.coeffs, o.coeffs
        out = np.zeros((max(a.shape[0], b.shape[0]), max(a.shape[1], b.shape[1])), dtype=complex)
        out[: a.shape[0], : a.shape[1]] += a
        out[: b.shape[0], : b.shape[1]] += b
        return Poly2(_trim(out))

    __radd__ = __add__

    def __neg__(self):
        return Poly2(-self.coeffs)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return Poly2(_trim(convolve2d(self.coeffs, o.coeffs)))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly2.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, z, lam):
        return P.polyval2d(z, lam, self.coeffs)

    def dz(self) -> "Poly2":
        if self.coeffs.shape[0] == 1:
            return Poly2.const(0)
        return Poly2(_trim(P.polyder(self.coeffs, axis=0)))

    @property
    def z_degree(self) -> int:
        return self.coeffs.shape[0] - 1
