"""Smith canonical forms for the worked correlation-matrix examples.

A fixture holds, for one model with ``n_P = n_z + n_Z``, the matrix
polynomial ``a(z, lam)`` of the block symbol, unimodular ``y`` and ``w`` with
``y a w = diag(1, q)``, and the data entering the Gorodetsky matrix
``M(n, lam)``: the polynomials ``g``, ``h`` and the double roots ``tau`` of
``q``.  Every entry is a :class:`Poly2`; ``w`` entries are stored as
numerator/denominator pairs because they are rational in ``lam``.

Three families are available:

``b_quartic_inside``
    ``f = (z - b)**2 / z`` with ``|b| < 1``.
``ab_sextic``
    ``f = (z - a)**2 (z - b)**2 / z**2`` with ``|a| < 1`` and either
    ``|b| < 1`` or ``|b| > 1``; the second regime divides ``a`` by ``b**2``.
``aiii_b_quartic``
    the AIII chain with ``f = (z - b)**2 / z``, ``|b| < 1``, ``b`` complex.

Reference instances are shipped as JSON coefficient tables in ``data/``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .bivariate import Poly2
from .errors import SingularM0, ValidationError
from .model import ModelSpec, aiii, bdi, parse_model

FAMILIES = ("b_quartic_inside", "ab_sextic", "aiii_b_quartic")
REFERENCE_FILES = {
    "b_quartic_inside": "b_quartic_inside.json",
    "ab_sextic": "ab_sextic_inside.json",
    "ab_sextic_mixed": "ab_sextic_mixed.json",
    "aiii_b_quartic": "aiii_b_quartic.json",
}
SCHEMA_VERSION = 1

Z = Poly2.z()
L = Poly2.lam()
I = 1j


@dataclass(frozen=True, eq=False)
class SmithFixture:
    """Smith canonical form data for one model.

    ``leading_factor`` is ``det(a_s) / (1 - lam**2)`` for BDI and
    ``det(a_s) / (lam**2 - 1)`` for AIII; its ``N``-th power multiplies the
    determinant ratio.
    """

    family: str
    params: dict
    model: ModelSpec
    a: tuple[tuple[Poly2, Poly2], tuple[Poly2, Poly2]]
    y: tuple[tuple[Poly2, Poly2], tuple[Poly2, Poly2]]
    w_num: tuple[tuple[Poly2, Poly2], tuple[Poly2, Poly2]] | None
    w_den: tuple[tuple[Poly2, Poly2], tuple[Poly2, Poly2]] | None
    g: Poly2
    h: Poly2
    tau: tuple[complex, ...]
    leading_factor: complex

    @property
    def y21(self) -> Poly2:
        return self.y[1][0]

    @property
    def y22(self) -> Poly2:
        return self.y[1][1]

    @property
    def K(self) -> int:
        return self.model.n_z + self.model.n_Z

    @property
    def trivial_factor_sign(self) -> int:
        """``+1`` when the ratio multiplies ``(1 - lam**2)**N``, ``-1`` for ``(lam**2 - 1)**N``."""
        return 1 if self.model.cls == "BDI" else -1

    def smith_diagonal(self, z):
        q = np.ones_like(np.asarray(z, dtype=complex))
        for t in self.tau:
            q = q * (z - t) ** 2
        return q

    def to_document(self) -> dict:
        def grid(mat):
            return [[e.to_table() for e in row] for row in mat] if mat is not None else None

        return {
            "schema": SCHEMA_VERSION,
            "family": self.family,
            "params": {k: [v.real, v.imag] for k, v in self.params.items()},
            "model": self.model.to_document(),
            "a": grid(self.a),
            "y": grid(self.y),
            "w_num": grid(self.w_num),
            "w_den": grid(self.w_den),
            "g": self.g.to_table(),
            "h": self.h.to_table(),
            "tau": [[t.real, t.imag] for t in self.tau],
            "leading_factor": [self.leading_factor.real, self.leading_factor.imag],
        }


def _mat(rows):
    return tuple(tuple(r) for r in rows)


def _from_roots(roots) -> Poly2:
    out = Poly2.const(1)
    for r in roots:
        out = out * (Z - r)
    return out


def _block_matrix(m: ModelSpec):
    """``a(z, lam)`` from the zeros; requires ``n_P = n_z + n_Z``."""
    zs, Zs = m.zeros_inside, m.zeros_outside
    if m.cls == "BDI":
        pref = np.prod([-z for z in zs]) / np.prod([-W for W in Zs])
        diag = I * pref * L * _from_roots(list(zs) + [1 / z for z in zs] + list(Zs) + [1 / W for W in Zs])
        a12 = (1 / np.prod([W**2 for W in Zs])) * _from_roots([w for w in zs + Zs for _ in (0, 1)])
        a21 = -np.prod([z**2 for z in zs]) * _from_roots([1 / w for w in zs + Zs for _ in (0, 1)])
        return _mat([[diag, a12], [a21, diag]])
    zb = [np.conj(z) for z in zs]
    Zb = [np.conj(W) for W in Zs]
    mod2 = np.prod([abs(W) ** 2 for W in Zs])
    pref = np.prod([-u for u in zb + Zb]) / mod2
    diag = pref * L * _from_roots(list(zs) + [1 / u for u in zb] + list(Zs) + [1 / u for u in Zb])
    a12 = -(1 / mod2) * _from_roots([w for w in zs + Zs for _ in (0, 1)])
    a21 = -(np.prod([u**2 for u in zb + Zb]) / mod2) * _from_roots([1 / u for u in zb + Zb for _ in (0, 1)])
    return _mat([[diag, a12], [a21, diag]])


def _gh(m: ModelSpec):
    zs, Zs = m.zeros_inside, m.zeros_outside
    if m.cls == "BDI":
        g = _from_roots(list(zs) + [1 / W for W in Zs])
        h = Poly2.const(1)
        for w in list(zs) + [1 / W for W in Zs]:
            h = h * (1 - w * Z)
        tau = tuple(zs) + tuple(1 / z for z in zs) + tuple(Zs) + tuple(1 / W for W in Zs)
        lead = np.prod([z**2 for z in zs]) / np.prod([W**2 for W in Zs])
        return g, h, tau, complex(lead)
    g = _from_roots(list(zs) + [1 / np.conj(W) for W in Zs])
    h = Poly2.const(1)
    for w in [np.conj(z) for z in zs] + [1 / W for W in Zs]:
        h = h * (1 - w * Z)
    tau = (tuple(zs) + tuple(1 / np.conj(z) for z in zs) + tuple(Zs)
           + tuple(1 / np.conj(W) for W in Zs))
    lead = np.prod([np.conj(u) ** 2 for u in zs + Zs]) / np.prod([abs(W) ** 2 for W in Zs]) ** 2
    return g, h, tau, complex(lead)


def build_b_quartic_inside(b: complex) -> SmithFixture:
    """Smith form for ``f = (z - b)**2 / z``, ``|b| < 1`` real."""
    b = complex(b)
    if not 0 < abs(b) < 1 or abs(b.imag) > 0:
        raise ValidationError("b_quartic_inside needs real 0 < |b| < 1")
    b = b.real
    m = bdi(n_P=1, inside=[b])
    y11 = I * b * (b**2 - b * Z * (L**2 - 1) + L**2 - 2)
    y12 = (b**2 - 1) * L
    y21 = L * (b * Z - 1) * (b * L**2 * (b - Z) + b * Z - 1) * (1 / (b**2 - 1))
    y22 = I * L**2 * (b - Z)
    core = L**2 * (b * Z - 1) ** 2 + b * (b - Z) * (b * (b + Z) - 2)
    w_num = _mat([
        [Poly2.const(-1), -I * (b - Z) * core],
        [Poly2.const(-I * b), -((b**2 - 1) ** 3 - b * (b - Z) * core)],
    ])
    w_den = _mat([
        [(b**2 - 1) ** 3 * L, b**2 * (b**2 - 1) ** 2 * L**2 * (L**2 - 1)],
        [Poly2.const((b**2 - 1) ** 3), b**2 * L * (L**2 - 1) * (b**2 - 1) ** 2],
    ])
    g, h, tau, lead = _gh(m)
    return SmithFixture("b_quartic_inside", {"b": complex(b)}, m, _block_matrix(m),
                        _mat([[y11, y12], [y21, y22]]), w_num, w_den, g, h, tau, lead)


def _sextic_y(a: float, b: float):
    y11 = -b * a**2 * (b + Z) + a**2 + a * b * (1 - b * Z) + b**2
    y12 = I * L * (a**2 - Z * (a + b) + a * b + b**2 - 1)
    K = (a**2 * b**2 * L**2 * (a**2 + a * b + b**2 - 1) - a**4 * b**2 - a**2 * b**4 - a**3 * b
         + a**2 - a * b**3 + a * b + b**2 - 1)
    lead21 = a * (a**2 - 1) * b * (b**2 - 1) * (a + b) * (a * b - 1) ** 2 * (a**2 * b**2 - a**2 - a * b - b**2)
    y21 = lead21 * (a * Z - 1) * (b * Z - 1) * K * (
        (1 - L**2) * (a - Z) ** 2 * (b - Z) ** 2
        * (a**2 * b**2 + a**2 * b * Z - a**2 + a * b * (b * Z - 1) - b**2) ** 2
        - (a**2 - 1) ** 2 * (b**2 - 1) ** 2 * (a * b - 1) ** 2)
    lead22 = -I * a * (a**2 - 1) * b * (b**2 - 1) * (a + b) * (a * b - 1) ** 2 * (a**2 * (b**2 - 1) - a * b - b**2)
    y22 = lead22 * L * (a - Z) * (b - Z) * K * (
        (a**2 - 1) ** 2 * (b**2 - 1) ** 2 * (a * b - 1) ** 2
        - (L**2 - 1) * (a - Z) * (a * Z - 1) * (b - Z) * (b * Z - 1)
        * (a**2 - Z * (a + b) + a * b + b**2 - 1)
        * (a**2 * (b * (b + Z) - 1) + a * b * (b * Z - 1) - b**2))
    W = (a**3 * (a**2 - 1) ** 4 * b**3 * (b**2 - 1) ** 4 * (a + b) * (a * b - 1) ** 5
         * (-a**2 * (b**2 - 1) + a * b + b**2)) * L * (L**2 - 1) * K
    br = (a**3 * (b * (-2 * b**2 + Z**2 + 2) + L**2 * (b - Z) * (b * (b + Z) - 1) - Z)
          + a**2 * (b**2 * (-L**2 * (Z**2 + 1) + Z**2 + 2) + b * (L**2 - 1) * Z * (Z**2 + 2) - L**2 * Z**2 + Z**2 - 1)
          + a * b * (b**2 * (-L**2 * (Z**2 + 1) + Z**2 + 2) + b * (L**2 - 1) * Z * (Z**2 + 2) - L**2 * Z**2 + Z**2 - 1)
          + b**2 * ((L**2 - 1) * Z * (b - Z) - 1) + 1)
    w11 = -I * (a**2 - Z * (a + b) + a * b + b**2 - 1) * br
    w11_den = (a**2 - 1) ** 3 * (b**2 - 1) ** 3 * (a * b - 1) ** 3 * L
    w12 = -I * (a - Z) * (b - Z) * (
        L**2 * (a * Z - 1) * (b * Z - 1) * (a**2 - Z * (a + b) + a * b + b**2 - 1)
        + (a - Z) * (b - Z) * (a**2 * (b * (b + Z) - 1) + a * b * (b * Z - 1) - b**2))
    w21 = -b * a**2 * (b + Z) + a**2 + a * b * (1 - b * Z) + b**2
    w21_den = Poly2.const((a**2 - 1) ** 2 * (b**2 - 1) ** 2 * (a * b - 1) ** 2)
    w22 = -(a * Z - 1) * (b * Z - 1) * (a**2 - 1) * (b**2 - 1) * (a * b - 1) * L
    y = _mat([[y11, y12], [y21, y22]])
    return y, _mat([[w11, w12], [w21, w22]]), _mat([[w11_den, W], [w21_den, W]])


def build_ab_sextic(a: float, b: float) -> SmithFixture:
    """Smith form for ``f = (z - a)**2 (z - b)**2 / z**2`` with real ``|a| < 1``.

    For ``|b| > 1`` the matrix polynomial is the ``|b| < 1`` one divided by
    ``b**2``, so ``y`` is unchanged and ``w`` is rescaled by ``1/b**2``.
    """
    a, b = float(np.real(a)), float(np.real(b))
    if not 0 < abs(a) < 1 or abs(b) in (0.0, 1.0) or a == b or a * b == 1:
        raise ValidationError("ab_sextic needs real 0 < |a| < 1, |b| != 1, a != b, ab != 1")
    if abs(b) < 1:
        m = bdi(n_P=2, inside=[a, b])
        scale = 1.0
    else:
        m = bdi(n_P=2, inside=[a], outside=[b])
        scale = 1.0 / b**2
    y, w_num, w_den = _sextic_y(a, b)
    # y (a / b**2) w' = diag(1, q) holds with w' = b**2 w
    w_num = _mat([[e * (1 / scale) for e in row] for row in w_num])
    g, h, tau, lead = _gh(m)
    return SmithFixture("ab_sextic", {"a": complex(a), "b": complex(b)}, m, _block_matrix(m),
                        y, w_num, w_den, g, h, tau, lead)


def build_aiii_b_quartic(b: complex) -> SmithFixture:
    """Smith data for the AIII chain ``f = (z - b)**2 / z``, ``|b| < 1``.

    Only the ``y`` matrix is available in closed form, so ``w`` is absent.
    The printed entries label the first-row partner of ``y_11`` as a second
    ``y_21``; it is read as ``y_12``.
    """
    b = complex(b)
    if not 0 < abs(b) < 1:
        raise ValidationError("aiii_b_quartic needs 0 < |b| < 1")
    bb = b.conjugate()
    n2 = abs(b) ** 2
    m = aiii(n_P=1, inside=[b])
    y11 = (L**2 - 2) * n2 + 1
    y12 = (-1 / bb) * L * y11
    y21 = (n2 - 1) * (bb * ((1 - L**2) * Z * (n2**2 - bb * (2 * b - Z) * (Z * bb - 1)) - 2 * b)
                      - Z * (n2 - 1) ** 2 * bb + L**2 * n2**2 + 1)
    y22 = (1 / bb) * L * (n2 - 1) * (
        n2**2 * (bb * (L**2 * Z - b) - L**2 + 1)
        + 2 * n2 * (bb * (b - Z) - 1)
        + bb * ((L**2 - 1) * Z**2 * bb**2 * (Z - 2 * b) + (L**2 - 1) * Z * bb * (2 * b - Z) + b + Z))
    g, h, tau, lead = _gh(m)
    return SmithFixture("aiii_b_quartic", {"b": b}, m, _block_matrix(m),
                        _mat([[y11, y12], [y21, y22]]), None, None, g, h, tau, lead)


def build_fixture(family: str, **params) -> SmithFixture:
    """Dispatch to the builder of ``family``."""
    if family == "b_quartic_inside":
        return build_b_quartic_inside(params["b"])
    if family == "ab_sextic":
        return build_ab_sextic(params["a"], params["b"])
    if family == "aiii_b_quartic":
        return build_aiii_b_quartic(params["b"])
    raise ValidationError(f"unknown fixture family {family!r}; expected one of {FAMILIES}")


# ---------------------------------------------------------------------------
# Gorodetsky matrix

def gorodetsky_columns(fix: SmithFixture, n: int) -> list[Poly2]:
    """Row generator ``m^(n)(z)``: ``y21 h z^i, y22 h z^i, y21 g z^(i+n), y22 g z^(i+n)``."""
    K = fix.K
    cols = [fix.y21 * fix.h * Z**i for i in range(K)]
    cols += [fix.y22 * fix.h * Z**i for i in range(K)]
    cols += [fix.y21 * fix.g * Z ** (i + n) for i in range(K)]
    cols += [fix.y22 * fix.g * Z ** (i + n) for i in range(K)]
    return cols


def gorodetsky_matrix(fix: SmithFixture, n: int, lam: complex) -> np.ndarray:
    """``M(n, lam)``: rows ``m^(n)(tau_i)`` and ``d/dz m^(n)(tau_i)``."""
    cols = gorodetsky_columns(fix, n)
    ders = [c.dz() for c in cols]
    rows = []
    for t in fix.tau:
        rows.append([c(t, lam) for c in cols])
        rows.append([d(t, lam) for d in ders])
    return np.array(rows, dtype=complex)


def gorodetsky_ratio(fix: SmithFixture, N: int, lam: complex) -> complex:
    """Block Toeplitz determinant ``det(i lam - A_N)`` (BDI) or ``det(lam - A_N)`` (AIII).

    Raises
    ------
    SingularM0
        When ``M(0, lam)`` is numerically singular at this ``lam``.
    """
    if N < 0:
        raise ValidationError("N must be non-negative")
    if N == 0:
        return 1 + 0j
    lam = complex(lam)
    M0 = gorodetsky_matrix(fix, 0, lam)
    d0 = np.linalg.det(M0)
    if d0 == 0 or not np.isfinite(d0) or np.linalg.cond(M0) > 1e15:
        raise SingularM0(f"M(0, lambda) is singular at lambda={lam}; resample")
    trivial = (1 - lam**2) if fix.trivial_factor_sign == 1 else (lam**2 - 1)
    return complex((trivial * fix.leading_factor) ** N * np.linalg.det(gorodetsky_matrix(fix, N, lam)) / d0)


# ---------------------------------------------------------------------------
# Smith identity check

@dataclass(frozen=True)
class SmithResidual:
    """Worst residual of ``y a w - diag(1, q)`` over the sampled points.

    ``relative`` divides by ``max(1, |q|)``; ``backward`` divides entrywise by
    ``|y| |a| |w|`` and measures the error relative to the rounding scale of
    the product itself.
    """

    relative: float
    backward: float
    samples: int


def _evaluate(mat, z, lam):
    return np.array([[e(z, lam) for e in row] for row in mat], dtype=complex)


def smith_identity_residual(fix: SmithFixture, samples: int = 20, seed: int = 0) -> SmithResidual | None:
    """Check ``y a w = diag(1, q)`` at random points; ``None`` if ``w`` is not available.

    Points are drawn with ``|z| <= 1.1`` and ``lam`` near the real segment
    ``[-1, 1]``, the region where the fixture enters the determinant.
    """
    if fix.w_num is None:
        return None
    rng = np.random.default_rng(seed)
    rel = back = 0.0
    for _ in range(samples):
        z = np.sqrt(rng.uniform(0, 1.21)) * np.exp(2j * np.pi * rng.uniform())
        lam = complex(rng.uniform(-1, 1), 0.2 * rng.normal())
        A = _evaluate(fix.a, z, lam)
        Y = _evaluate(fix.y, z, lam)
        W = _evaluate(fix.w_num, z, lam) / _evaluate(fix.w_den, z, lam)
        D = np.diag([1, complex(fix.smith_diagonal(z))])
        err = np.abs(Y @ A @ W - D)
        rel = max(rel, float(err.max() / max(1.0, np.abs(D).max())))
        back = max(back, float((err / (np.abs(Y) @ np.abs(A) @ np.abs(W))).max()))
    return SmithResidual(rel, back, samples)


# ---------------------------------------------------------------------------
# serialisation

def _grid_from(doc):
    if doc is None:
        return None
    return _mat([[Poly2.from_table(t) for t in row] for row in doc])


def fixture_from_document(doc: dict) -> SmithFixture:
    if doc.get("schema") != SCHEMA_VERSION:
        raise ValidationError(f"unsupported fixture schema {doc.get('schema')!r}")
    return SmithFixture(
        family=doc["family"],
        params={k: complex(*v) for k, v in doc["params"].items()},
        model=parse_model(doc["model"]),
        a=_grid_from(doc["a"]),
        y=_grid_from(doc["y"]),
        w_num=_grid_from(doc["w_num"]),
        w_den=_grid_from(doc["w_den"]),
        g=Poly2.from_table(doc["g"]),
        h=Poly2.from_table(doc["h"]),
        tau=tuple(complex(*t) for t in doc["tau"]),
        leading_factor=complex(*doc["leading_factor"]),
    )


REFERENCE_PARAMS = {
    "b_quartic_inside": ("b_quartic_inside", {"b": 0.5}),
    "ab_sextic": ("ab_sextic", {"a": 0.3, "b": 0.6}),
    "ab_sextic_mixed": ("ab_sextic", {"a": 0.5, "b": 3.0}),
    "aiii_b_quartic": ("aiii_b_quartic", {"b": 0.25 + 0.25 * np.sqrt(3) * 1j}),
}


def load_fixture(name: str) -> SmithFixture:
    """Load a shipped reference fixture by name (a key of ``REFERENCE_FILES``)."""
    if name not in REFERENCE_FILES:
        raise ValidationError(f"unknown fixture {name!r}; expected one of {sorted(REFERENCE_FILES)}")
    text = resources.files("toeplitz_chains").joinpath("data", REFERENCE_FILES[name]).read_text()
    return fixture_from_document(json.loads(text))


def write_reference_fixtures(directory) -> list:
    """Regenerate the shipped JSON files from the closed-form builders."""
    from pathlib import Path

    out = []
    for name, (family, params) in REFERENCE_PARAMS.items():
        path = Path(directory) / REFERENCE_FILES[name]
        path.write_text(json.dumps(build_fixture(family, **params).to_document()))
        out.append(path)
    return out
