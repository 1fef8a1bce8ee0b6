"""Chain models in factored form.

A translation-invariant chain in the BDI or AIII class is fixed by the
Laurent polynomial

    f(z) = phase * z**(-n_P) * prod_j (z - z_j)**m * prod_k (z - Z_k)**m

with zeros ``z_j`` strictly inside and ``Z_k`` strictly outside the unit
circle.  The special class studied throughout the package has ``m = 2``;
``m = 1`` models are accepted as targets of the approximation module only.

Zeros are kept sorted by proximity to the unit circle: ``|z_1| >= |z_2| >= ...``
and ``|Z_1| <= |Z_2| <= ...``.  The overall normalisation of ``f`` is never
stored because no quantity computed here depends on it.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    BadPhase,
    ConjugationViolation,
    SubsetExplosion,
    UnitCircleRoot,
    ValidationError,
    ZeroOnUnitCircle,
)

BDI = "BDI"
AIII = "AIII"
CLASSES = (BDI, AIII)

#: largest n_z + n_Z for which subset enumerations are attempted
SUBSET_CAP = 20

_CIRCLE_TOL = 1e-12
_CONJ_TOL = 1e-9


def _sorted_inside(zs):
    return tuple(sorted(zs, key=lambda z: (-abs(z), -z.imag, z.real)))


def _sorted_outside(zs):
    return tuple(sorted(zs, key=lambda z: (abs(z), -z.imag, z.real)))


def _is_conjugate_closed(zs, tol=_CONJ_TOL):
    remaining = list(zs)
    while remaining:
        z = remaining.pop(0)
        if abs(z.imag) <= tol:
            continue
        dist = [abs(w - z.conjugate()) for w in remaining]
        if not dist or min(dist) > tol * max(1.0, abs(z)):
            return False
        remaining.pop(int(np.argmin(dist)))
    return True


def _snap_conjugates(zs, tol=_CONJ_TOL):
    """Make a numerically conjugate-closed list exactly closed."""
    out = []
    remaining = [complex(z) for z in zs]
    while remaining:
        z = remaining.pop(0)
        if abs(z.imag) <= tol * max(1.0, abs(z)):
            out.append(complex(z.real, 0.0))
            continue
        dist = [abs(w - z.conjugate()) for w in remaining]
        j = int(np.argmin(dist)) if dist else -1
        if j < 0 or dist[j] > 1e-6 * max(1.0, abs(z)):
            raise ConjugationViolation(f"zero {z} has no conjugate partner")
        w = remaining.pop(j)
        mid = 0.5 * (z + w.conjugate())
        out.extend([mid, mid.conjugate()])
    return out


@dataclass(frozen=True)
class ModelSpec:
    """Validated chain model.

    Parameters
    ----------
    cls : {"BDI", "AIII"}
        Symmetry class.
    phase : complex
        ``sigma = +-1`` for BDI, ``exp(i theta)`` for AIII.
    n_P : int
        Order of the pole of ``f`` at the origin.
    zeros_inside, zeros_outside : tuple of complex
        Distinct zeros, each of multiplicity ``multiplicity``.
    multiplicity : {1, 2}
    """

    cls: str
    phase: complex
    n_P: int
    zeros_inside: tuple[complex, ...] = ()
    zeros_outside: tuple[complex, ...] = ()
    multiplicity: int = 2

    def __post_init__(self):
        if self.cls not in CLASSES:
            raise ValidationError(f"unknown class {self.cls!r}")
        if self.multiplicity not in (1, 2):
            raise ValidationError("multiplicity must be 1 or 2")
        phase = complex(self.phase)
        if abs(abs(phase) - 1.0) > 1e-12:
            raise BadPhase(f"phase {phase} is not of unit modulus")
        if self.cls == BDI:
            if abs(phase.imag) > 1e-12:
                raise BadPhase("BDI models need sigma = +1 or -1")
            phase = complex(math.copysign(1.0, phase.real), 0.0)
        inside = [complex(z) for z in self.zeros_inside]
        outside = [complex(z) for z in self.zeros_outside]
        for z in inside + outside:
            if abs(abs(z) - 1.0) <= _CIRCLE_TOL:
                raise ZeroOnUnitCircle(f"zero {z} lies on the unit circle")
        if any(abs(z) >= 1 for z in inside):
            raise ValidationError("zeros_inside must satisfy |z| < 1")
        if any(abs(z) <= 1 for z in outside):
            raise ValidationError("zeros_outside must satisfy |Z| > 1")
        if self.cls == BDI:
            if not (_is_conjugate_closed(inside) and _is_conjugate_closed(outside)):
                raise ConjugationViolation("BDI zeros must be closed under conjugation")
            inside = _snap_conjugates(inside)
            outside = _snap_conjugates(outside)
        object.__setattr__(self, "phase", phase)
        object.__setattr__(self, "n_P", int(self.n_P))
        object.__setattr__(self, "zeros_inside", _sorted_inside(inside))
        object.__setattr__(self, "zeros_outside", _sorted_outside(outside))

    # basic counts -------------------------------------------------------
    @property
    def n_z(self) -> int:
        return len(self.zeros_inside)

    @property
    def n_Z(self) -> int:
        return len(self.zeros_outside)

    @property
    def sigma(self) -> int:
        if self.cls != BDI:
            raise ValidationError("sigma is defined for BDI models only")
        return int(self.phase.real)

    @property
    def theta(self) -> float:
        return math.atan2(self.phase.imag, self.phase.real)

    @property
    def winding(self) -> int:
        return winding_number(self)

    def __call__(self, z):
        """Evaluate f at ``z`` (array-like)."""
        z = np.asarray(z, dtype=complex)
        out = self.phase * z ** (-self.n_P)
        for r in self.zeros_inside + self.zeros_outside:
            out = out * (z - r) ** self.multiplicity
        return out

    def inverted(self) -> "ModelSpec":
        """Model for ``f(1/z)``: zeros are replaced by their inverses."""
        m = self.multiplicity
        n_total = m * (self.n_z + self.n_Z)
        scale = complex(np.prod([(-r) ** m for r in self.zeros_inside + self.zeros_outside]))
        phase = self.phase * scale / abs(scale) if scale != 0 else self.phase
        return ModelSpec(
            self.cls,
            phase,
            n_total - self.n_P,
            tuple(1 / Z for Z in self.zeros_outside),
            tuple(1 / z for z in self.zeros_inside),
            m,
        )

    def to_document(self) -> dict:
        doc = {"class": self.cls}
        if self.cls == BDI:
            doc["sigma"] = self.sigma
        else:
            doc["theta"] = self.theta
        doc["n_P"] = self.n_P
        doc["zeros_inside"] = [[z.real, z.imag] for z in self.zeros_inside]
        doc["zeros_outside"] = [[z.real, z.imag] for z in self.zeros_outside]
        doc["multiplicity"] = self.multiplicity
        return doc

    def digest(self) -> str:
        """Content hash, stable across runs for identical models."""
        text = json.dumps(self.to_document(), sort_keys=True, separators=(",", ":"),
                          default=repr)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def bdi(sigma=1, n_P=0, inside=(), outside=(), multiplicity=2) -> ModelSpec:
    """Shorthand constructor for BDI models."""
    return ModelSpec(BDI, sigma, n_P, tuple(inside), tuple(outside), multiplicity)


def aiii(theta=0.0, n_P=0, inside=(), outside=(), multiplicity=2) -> ModelSpec:
    """Shorthand constructor for AIII models."""
    return ModelSpec(AIII, complex(math.cos(theta), math.sin(theta)), n_P,
                     tuple(inside), tuple(outside), multiplicity)


def winding_number(m: ModelSpec) -> int:
    return m.multiplicity * m.n_z - m.n_P


# ---------------------------------------------------------------------------
# parsing

def _complex_list(items, key):
    out = []
    for item in items:
        if isinstance(item, (int, float)):
            out.append(complex(item))
        elif len(item) == 2:
            out.append(complex(float(item[0]), float(item[1])))
        else:
            raise ValidationError(f"{key}: expected [re, im] pairs")
    return out


def parse_model(document) -> ModelSpec:
    """Build a ModelSpec from a JSON document (text, path or mapping)."""
    if isinstance(document, Path):
        document = document.read_text()
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"model document is not valid JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise ValidationError("model document must be a JSON object")
    cls = document.get("class")
    if cls not in CLASSES:
        raise ValidationError(f"'class' must be one of {CLASSES}")
    if cls == BDI:
        sigma = document.get("sigma", 1)
        if sigma not in (1, -1):
            raise BadPhase("'sigma' must be +1 or -1")
        phase = complex(sigma)
    else:
        if "sigma" in document and "theta" not in document:
            raise BadPhase("AIII models take 'theta', not 'sigma'")
        theta = float(document.get("theta", 0.0))
        if not math.isfinite(theta):
            raise BadPhase("'theta' must be finite")
        phase = complex(math.cos(theta), math.sin(theta))

    if "couplings" in document:
        couplings = {}
        for entry in document["couplings"]:
            if len(entry) != 3:
                raise ValidationError("couplings entries are [alpha, re, im]")
            couplings[int(entry[0])] = complex(float(entry[1]), float(entry[2]))
        return from_coefficients(couplings, cls)

    try:
        n_P = int(document["n_P"])
    except (KeyError, TypeError, ValueError):
        raise ValidationError("'n_P' (integer) is required") from None
    mult = int(document.get("multiplicity", 2))
    inside = _complex_list(document.get("zeros_inside", []), "zeros_inside")
    outside = _complex_list(document.get("zeros_outside", []), "zeros_outside")
    return ModelSpec(cls, phase, n_P, tuple(inside), tuple(outside), mult)


# ---------------------------------------------------------------------------
# coefficients

def coefficients(m: ModelSpec) -> dict[int, complex]:
    """Couplings ``t_alpha`` with ``f(z) = sum_alpha t_alpha z**alpha``."""
    poly = np.array([1.0 + 0j])
    for r in m.zeros_inside + m.zeros_outside:
        factor = P.polyfromroots([r] * m.multiplicity)
        poly = P.polymul(poly, factor)
    poly = m.phase * poly
    out = {}
    for power, c in enumerate(poly):
        if c != 0:
            c = complex(c)
            if m.cls == BDI:
                c = complex(c.real, 0.0)
            out[power - m.n_P] = c
    return out


def coupling_range(couplings: Mapping[int, complex]) -> int:
    """Largest |alpha| with a non-zero coupling."""
    return max((abs(a) for a, t in couplings.items() if abs(t) > 0), default=0)


def _newton(coeffs, r, steps=1):
    d = P.polyder(coeffs)
    for _ in range(steps):
        dv = P.polyval(r, d)
        if dv == 0:
            break
        r = r - P.polyval(r, coeffs) / dv
    return r


def from_coefficients(couplings: Mapping[int, complex], cls: str = BDI) -> ModelSpec:
    """Recover the factored form from a finite list of couplings.

    Roots come from the companion matrix followed by one Newton step.  When
    every root pairs up with a partner the model is returned with
    multiplicity 2; otherwise a multiplicity-1 model is returned and
    operations restricted to the special class will refuse it.
    """
    support = {int(a): complex(t) for a, t in couplings.items() if abs(t) > 0}
    if not support:
        raise ValidationError("couplings are identically zero")
    lo, hi = min(support), max(support)
    coeffs = np.zeros(hi - lo + 1, dtype=complex)
    for a, t in support.items():
        coeffs[a - lo] = t
    lead = coeffs[-1]
    if cls == BDI:
        if any(abs(t.imag) > 1e-12 * max(1.0, abs(t)) for t in support.values()):
            raise ValidationError("BDI couplings must be real")
        phase = complex(math.copysign(1.0, lead.real))
    else:
        phase = lead / abs(lead)

    roots = np.roots(coeffs[::-1]) if len(coeffs) > 1 else np.array([])
    roots = np.array([_newton(coeffs, r) for r in roots])
    for r in roots:
        if abs(abs(r) - 1.0) < 1e-9:
            raise UnitCircleRoot(f"root {r} lies on the unit circle")

    paired = _pair_double_roots(coeffs, list(roots))
    if paired is not None:
        zeros, mult = paired, 2
    else:
        zeros, mult = list(roots), 1
    inside = [z for z in zeros if abs(z) < 1]
    outside = [z for z in zeros if abs(z) > 1]
    return ModelSpec(cls, phase, -lo, tuple(inside), tuple(outside), mult)


def _pair_double_roots(coeffs, roots):
    if len(roots) % 2:
        return None
    remaining = list(roots)
    deriv = P.polyder(coeffs)
    out = []
    scale = max(1.0, max((abs(r) for r in roots), default=1.0))
    while remaining:
        r = remaining.pop(0)
        dist = [abs(w - r) for w in remaining]
        j = int(np.argmin(dist))
        if dist[j] > 1e-4 * scale:
            return None
        w = remaining.pop(j)
        # a double root of the polynomial is a simple root of its derivative
        out.append(_newton(deriv, 0.5 * (r + w), steps=3))
    return out


# ---------------------------------------------------------------------------
# genericity

@dataclass(frozen=True)
class GenericityReport:
    generic: bool
    strongly_generic: bool
    colliding_pairs: tuple[tuple[int, int], ...]
    mutually_inverse_pairs: tuple[tuple[int, int], ...]


def _reflection(m: ModelSpec, w: complex) -> complex:
    """Partner of a zero under the class's reflection in the unit circle."""
    return 1 / w if m.cls == BDI else 1 / w.conjugate()


def inverse_set(m: ModelSpec) -> tuple[complex, ...]:
    """The set S = {z_j} u {Z_k^{-1}} whose subset products label decay rates."""
    return tuple(m.zeros_inside) + tuple(1 / Z for Z in m.zeros_outside)


def subset_products(values, cap=SUBSET_CAP) -> np.ndarray:
    """Products over all subsets, indexed by bit mask."""
    values = list(values)
    if len(values) > cap:
        raise SubsetExplosion(f"{len(values)} zeros exceed the subset cap {cap}")
    out = np.ones(1, dtype=complex)
    for v in values:
        out = np.concatenate([out, out * v])
    return out


def classify_genericity(m: ModelSpec, tol: float = 1e-9) -> GenericityReport:
    """Check the generic and strongly generic conditions."""
    n_total = m.n_z + m.n_Z
    if n_total > SUBSET_CAP:
        raise SubsetExplosion(f"n_z + n_Z = {n_total} exceeds the cap {SUBSET_CAP}")
    zeros = list(m.zeros_inside) + list(m.zeros_outside)
    points = zeros + [_reflection(m, w) for w in zeros]
    colliding = []
    for i, j in itertools.combinations(range(len(points)), 2):
        a, b = points[i], points[j]
        if abs(a - b) <= tol * max(1.0, abs(a), abs(b)):
            colliding.append((i, j))
    inverse_pairs = []
    for j, z in enumerate(m.zeros_inside):
        for k, Z in enumerate(m.zeros_outside):
            if abs(_reflection(m, Z) - z) <= tol * max(1.0, abs(z)):
                inverse_pairs.append((j, k))
    generic = not colliding
    strongly = generic and _strongly_generic(m, tol)
    return GenericityReport(generic, strongly, tuple(colliding), tuple(inverse_pairs))


def _conjugation_permutation(values, tol):
    perm = []
    for v in values:
        dist = [abs(w - v.conjugate()) for w in values]
        j = int(np.argmin(dist))
        perm.append(j if dist[j] <= tol * max(1.0, abs(v)) else -1)
    return perm


def _strongly_generic(m: ModelSpec, tol: float) -> bool:
    S = inverse_set(m)
    n = len(S)
    if n == 0:
        return True
    logs = np.log(np.abs(subset_products(S)))
    # indices of a zero and of its conjugate form one orbit; equal moduli are
    # allowed only between subsets picking the same number from every orbit
    perm = _conjugation_permutation(S, tol) if m.cls == BDI else list(range(n))
    orbit = [min(i, perm[i]) if perm[i] >= 0 else i for i in range(n)]
    masks = np.arange(1 << n)
    signature = np.zeros((1 << n, n), dtype=np.int8)
    for i in range(n):
        signature[:, orbit[i]] += (masks >> i) & 1
    order = np.argsort(logs, kind="stable")
    i = 0
    while i < len(order):
        j = i + 1
        ref = logs[order[i]]
        while j < len(order) and logs[order[j]] - ref <= tol * max(1.0, abs(ref)):
            j += 1
        group = order[i:j]
        if len(group) > 1 and np.any(signature[group] != signature[group[0]]):
            return False
        i = j
    return True


def is_generic(m: ModelSpec, tol: float = 1e-9) -> bool:
    return classify_genericity(m, tol).generic
