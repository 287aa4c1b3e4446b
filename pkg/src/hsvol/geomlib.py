"""Generalized lengths and Möbius triangles.

A generalized length ``l`` lives in ``R_{<0} ∪ [0, iπ] ∪ (iπ + R_{>0})``.  On
that set ``cosh`` is a bijection onto the real line, so a length is stored by
its (real) cosh value and everything else is derived from it.

Most functions come in two flavours: a scalar one working on the small value
types defined here, and an array one (suffix ``_array`` or plural name) that
broadcasts over leading axes and is used by the batch code paths.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

#: default tolerance (radians) on angle-sum and triangle-inequality residuals
EPS_CLASS = 1e-9


class DomainError(ValueError):
    """Input outside the domain of a length or angle operation."""


class EuclideanLengthsError(DomainError):
    """The law of cosines for angles degenerates on Euclidean-type lengths."""


class InconsistentLengthsError(DomainError):
    """Three lengths that do not come from any Möbius triangle."""


class LengthClass(enum.Enum):
    NEGATIVE_REAL = "NegativeReal"
    ZERO = "Zero"
    IMAGINARY_OPEN = "ImaginaryOpen"
    I_PI = "IPi"
    I_PI_PLUS_POSITIVE = "IPiPlusPositive"


class TriangleTag(enum.IntEnum):
    SPHERICAL = 0
    HYPERBOLIC = 1
    EUCLIDEAN = 2
    FLIPPED_HYPERBOLIC = 3
    FLIPPED_EUCLIDEAN = 4

    @property
    def label(self) -> str:
        return _TRIANGLE_LABELS[self]


_TRIANGLE_LABELS = {
    TriangleTag.SPHERICAL: "Spherical",
    TriangleTag.HYPERBOLIC: "Hyperbolic",
    TriangleTag.EUCLIDEAN: "Euclidean",
    TriangleTag.FLIPPED_HYPERBOLIC: "FlippedHyperbolic",
    TriangleTag.FLIPPED_EUCLIDEAN: "FlippedEuclidean",
}


def classify_cosh(c: float, tol: float = EPS_CLASS) -> LengthClass:
    if abs(c - 1.0) <= tol:
        return LengthClass.ZERO
    if abs(c + 1.0) <= tol:
        return LengthClass.I_PI
    if c > 1.0:
        return LengthClass.NEGATIVE_REAL
    if c < -1.0:
        return LengthClass.I_PI_PLUS_POSITIVE
    return LengthClass.IMAGINARY_OPEN


@dataclass(frozen=True)
class GeneralizedLength:
    """A length in the extended domain, stored by ``cosh_value = cosh(l)``."""

    cosh_value: float

    def __post_init__(self):
        c = self.cosh_value
        if not isinstance(c, (int, float, np.floating, np.integer)) or not math.isfinite(c):
            raise DomainError(f"cosh value must be a finite real, got {c!r}")
        object.__setattr__(self, "cosh_value", float(c))

    @property
    def re(self) -> float:
        c = self.cosh_value
        if c > 1.0:
            return -math.acosh(c)
        if c < -1.0:
            return math.acosh(-c)
        return 0.0

    @property
    def im(self) -> float:
        c = self.cosh_value
        if c > 1.0:
            return 0.0
        if c < -1.0:
            return math.pi
        return math.acos(c)

    def length_class(self, tol: float = EPS_CLASS) -> LengthClass:
        return classify_cosh(self.cosh_value, tol)

    def as_complex(self) -> complex:
        return complex(self.re, self.im)

    def sinh(self) -> complex:
        """``sinh(l)`` on the representative branch.

        Negative reals and ``iπ + r`` both give a negative real sinh; the open
        imaginary segment gives ``i·sin``.
        """
        c = self.cosh_value
        if abs(c) > 1.0:
            return complex(-math.sqrt(c * c - 1.0), 0.0)
        return complex(0.0, math.sqrt(1.0 - c * c))

    @property
    def weight(self) -> float:
        return schlafli_weight(self)

    def __repr__(self) -> str:
        return f"GeneralizedLength({self.as_complex()!r}, cosh={self.cosh_value!r})"


def gen_length_from_cosh(c: float) -> GeneralizedLength:
    return GeneralizedLength(c)


def schlafli_weight(length: GeneralizedLength) -> float:
    """``Re(l) + Im(l)``; continuous in the cosh value."""
    return float(schlafli_weights(length.cosh_value))


def schlafli_weights(c):
    """Array version of :func:`schlafli_weight` on raw cosh values."""
    c = np.asarray(c, dtype=float)
    out = np.empty_like(c)
    hi = c > 1.0
    lo = c < -1.0
    mid = ~(hi | lo)
    out[hi] = -np.arccosh(c[hi])
    out[lo] = np.pi + np.arccosh(-c[lo])
    out[mid] = np.arccos(c[mid])
    return out if out.ndim else out[()]


@dataclass(frozen=True)
class MobiusTriangle:
    angles: tuple[float, float, float]

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        if len(angles) != 3:
            raise DomainError("a Möbius triangle has exactly three angles")
        for k, a in enumerate(angles):
            if not (0.0 < a < math.pi):
                raise DomainError(f"angle {k} = {a!r} not in (0, pi)")
        object.__setattr__(self, "angles", angles)

    @property
    def angle_sum(self) -> float:
        return sum(self.angles)


@dataclass(frozen=True)
class TriangleType:
    tag: TriangleTag
    flip_apex: int | None = None

    def __post_init__(self):
        flipped = self.tag in (TriangleTag.FLIPPED_HYPERBOLIC, TriangleTag.FLIPPED_EUCLIDEAN)
        if flipped != (self.flip_apex is not None):
            raise ValueError("flip_apex is set exactly for the flipped tags")


def triangle_coshes(angles):
    """cosh of the three edge lengths, edge ``i`` opposite angle ``i``.

    Uses the factorisation

        cosh(a1) - 1 = 2 cos(s/2) cos((a2+a3-a1)/2) / (sin a2 sin a3)

    which keeps the residual accurate near the Euclidean locus.
    """
    angles = np.asarray(angles, dtype=float)
    s = angles.sum(axis=-1)
    sin = np.sin(angles)
    out = np.empty_like(angles)
    half = np.cos(0.5 * s)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        rest = angles[..., j] + angles[..., k] - angles[..., i]
        out[..., i] = 1.0 + 2.0 * half * np.cos(0.5 * rest) / (sin[..., j] * sin[..., k])
    return out


def triangle_edge_lengths(t: MobiusTriangle) -> tuple[GeneralizedLength, GeneralizedLength, GeneralizedLength]:
    c = triangle_coshes(t.angles)
    return tuple(GeneralizedLength(float(x)) for x in c)


def triangle_residuals(angles):
    """Return ``(s - π, r)`` where ``r[..., i] = α_i + π - α_j - α_k``."""
    angles = np.asarray(angles, dtype=float)
    s = angles.sum(axis=-1)
    r = 2.0 * angles + np.pi - s[..., None]
    return s - np.pi, r


def classify_triangles(angles, eps: float = EPS_CLASS):
    """Vectorised 5-way classification.

    Returns ``(tags, apex)`` integer arrays; ``apex`` is -1 for unflipped tags.
    """
    excess, r = triangle_residuals(angles)
    apex = np.argmin(r, axis=-1)
    rmin = np.take_along_axis(r, apex[..., None], axis=-1)[..., 0]
    tags = np.where(
        excess > eps,
        TriangleTag.SPHERICAL,
        np.where(excess < -eps, TriangleTag.HYPERBOLIC, TriangleTag.EUCLIDEAN),
    )
    flipped = rmin <= eps
    tags = np.where(
        flipped,
        np.where(rmin < -eps, TriangleTag.FLIPPED_HYPERBOLIC, TriangleTag.FLIPPED_EUCLIDEAN),
        tags,
    )
    apex = np.where(flipped, apex, -1)
    return tags.astype(int), apex.astype(int)


def classify_triangle(t: MobiusTriangle, eps: float = EPS_CLASS) -> TriangleType:
    tags, apex = classify_triangles(np.array(t.angles), eps)
    tag = TriangleTag(int(tags))
    return TriangleType(tag, None if int(apex) < 0 else int(apex))


def angles_from_lengths(
    l1: GeneralizedLength,
    l2: GeneralizedLength,
    l3: GeneralizedLength,
    eps: float = EPS_CLASS,
) -> MobiusTriangle:
    """Recover the angles of a Möbius triangle from its three edge lengths."""
    lengths = (l1, l2, l3)
    for k, l in enumerate(lengths):
        if l.length_class(eps) in (LengthClass.ZERO, LengthClass.I_PI):
            raise EuclideanLengthsError(f"length {k} is of Euclidean type ({l.cosh_value!r})")
    c = [l.cosh_value for l in lengths]
    sh = [l.sinh() for l in lengths]
    angles = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        q = (-c[i] + c[j] * c[k]) / (sh[j] * sh[k])
        if abs(q.imag) > eps * max(1.0, abs(q.real)):
            raise InconsistentLengthsError(
                f"lengths mix spherical and hyperbolic families (cos = {q!r})"
            )
        x = q.real
        if abs(x) > 1.0 + eps:
            raise InconsistentLengthsError(f"cos of angle {i} is {x!r}, outside [-1, 1]")
        angles.append(math.acos(min(1.0, max(-1.0, x))))
    return MobiusTriangle(tuple(angles))


def length_from_parts(re: float, im: float) -> GeneralizedLength:
    """Inverse of ``(re, im)``; re-applies cosh to a representative."""
    return GeneralizedLength(cmath.cosh(complex(re, im)).real)
