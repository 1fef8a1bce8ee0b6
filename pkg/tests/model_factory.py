"""Seeded random model generators used by several test modules."""

import cmath

import numpy as np

from toeplitz_chains import aiii, bdi
from toeplitz_chains.model import classify_genericity

INSIDE = (0.15, 0.85)
OUTSIDE = (1.25, 4.0)


def _modulus(rng, inside):
    lo, hi = INSIDE if inside else OUTSIDE
    return rng.uniform(lo, hi)


def _real_closed_zeros(rng, count, inside, allow_pairs=True):
    zs = []
    while len(zs) < count:
        r = _modulus(rng, inside)
        if allow_pairs and count - len(zs) >= 2 and rng.random() < 0.4:
            phi = rng.uniform(0.3, np.pi - 0.3)
            w = cmath.rect(r, phi)
            zs += [w, w.conjugate()]
        else:
            zs.append(r * rng.choice([-1.0, 1.0]))
    return zs


def random_bdi(rng, max_zeros=4, n_P=None, allow_pairs=True, strongly=True):
    """A BDI model with at most ``max_zeros`` doubled zeros, off the unit circle."""
    while True:
        n = int(rng.integers(1, max_zeros + 1))
        n_z = int(rng.integers(0, n + 1))
        zi = _real_closed_zeros(rng, n_z, True, allow_pairs)
        zo = _real_closed_zeros(rng, n - n_z, False, allow_pairs)
        p = int(rng.integers(0, n + 3)) if n_P is None else n_P
        m = bdi(sigma=int(rng.choice([-1, 1])), n_P=p, inside=zi, outside=zo)
        g = classify_genericity(m)
        if (g.strongly_generic if strongly else g.generic) and _separated(zi + zo):
            return m


def random_aiii(rng, max_zeros=4):
    """An AIII model with complex zeros in general position."""
    while True:
        n = int(rng.integers(1, max_zeros + 1))
        n_z = int(rng.integers(0, n + 1))
        zi = [cmath.rect(_modulus(rng, True), rng.uniform(-np.pi, np.pi)) for _ in range(n_z)]
        zo = [cmath.rect(_modulus(rng, False), rng.uniform(-np.pi, np.pi)) for _ in range(n - n_z)]
        m = aiii(theta=rng.uniform(-np.pi, np.pi), n_P=int(rng.integers(0, n + 3)), inside=zi, outside=zo)
        if classify_genericity(m).generic and _separated(zi + zo):
            return m


def _separated(ws, gap=0.05):
    return all(abs(a - b) > gap for i, a in enumerate(ws) for b in ws[i + 1:])
