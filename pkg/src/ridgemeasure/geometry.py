"""Canonical half-sphere directions and point-hyperplane duality.

Every line through the origin of R^d meets the unit sphere in an
antipodal pair.  Exactly one member of each pair belongs to the
canonical half-sphere used throughout this package: the last
coordinate is positive, or it is (numerically) zero and the rule
recurses on the remaining leading coordinates, bottoming out at {+1}
in one dimension.  Hyperplanes {x : a.x = b} therefore carry a unique
(canonical unit normal, offset) description.

Hyperplanes whose normal is not orthogonal to the last axis can be
rescaled so the last normal coordinate equals one; the remaining
coefficients (u, v) locate the hyperplane as a point of a dual space.
Under this map the hyperplanes through a fixed domain point (z0, y0)
form a dual hyperplane {(u, v) : v = y0 + u.z0}, and the hyperplanes
crossing a vertical segment above z0 form a dual slab
{(u, v) : v - u.z0 in (y1, y2]}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EPS_ZERO",
    "UNIT_TOL",
    "Direction",
    "Hyperplane",
    "DualPoint",
    "DualHyperplane",
    "DualSlab",
    "canonicalize_direction",
    "in_half_sphere",
    "psi",
    "psi_inverse",
    "dual_of_point",
    "cosine_factor",
]

# Coordinates with magnitude at or below EPS_ZERO are treated as exact
# zeros by the half-sphere membership rule; ties resolve as "zero".
EPS_ZERO = 1e-12

# Tolerance for "this raw vector already has unit length" checks on
# user-supplied input.  Direction itself is stricter (1e-12) because
# its coordinates always come out of an explicit normalization.
UNIT_TOL = 1e-9


def _coords_of(a) -> np.ndarray:
    if isinstance(a, Direction):
        return np.asarray(a.coords, dtype=float)
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("expected a 1-D coordinate vector")
    return arr


@dataclass(frozen=True)
class Direction:
    """Unit vector in R^d, stored as a plain tuple of floats.

    The constructor only enforces unit length (within 1e-12); whether
    the vector is the canonical half-sphere representative is a
    separate question answered by :func:`in_half_sphere`.  Canonical
    measures and hyperplanes require it, finite-network units may sit
    on either hemisphere.
    """

    coords: tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) + 0.0 for c in self.coords)  # +0.0 drops -0.0
        if not coords:
            raise ValueError("empty direction")
        if not all(math.isfinite(c) for c in coords):
            raise ValueError("direction coordinates must be finite")
        norm = math.sqrt(math.fsum(c * c for c in coords))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"direction is not unit length (|a| = {norm!r})")
        object.__setattr__(self, "coords", coords)

    def __len__(self) -> int:
        return len(self.coords)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def negated(self) -> "Direction":
        return Direction(tuple(-c for c in self.coords))


def in_half_sphere(a, eps: float = EPS_ZERO) -> bool:
    """Return True iff the unit vector is the canonical representative.

    Scanning from the last coordinate: a coordinate above ``eps``
    decides membership positively, one below ``-eps`` negatively, and
    anything in between counts as zero and defers to the next
    coordinate towards the front.  Raises if the input is not unit
    length.
    """
    arr = _coords_of(a)
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > UNIT_TOL:
        raise ValueError(f"in_half_sphere expects a unit vector (|a| = {norm!r})")
    for c in arr[::-1]:
        if c > eps:
            return True
        if c < -eps:
            return False
    return False


def canonicalize_direction(a, eps: float = EPS_ZERO) -> tuple[Direction, float]:
    """Normalize a nonzero vector and flip it onto the half-sphere.

    Returns ``(d, s)`` with ``d`` canonical and ``s`` in {+1, -1} such
    that ``s * d`` equals ``a / |a|`` up to float rounding.
    """
    arr = _coords_of(a)
    norm = float(np.linalg.norm(arr))
    if norm <= eps:
        raise ValueError("degenerate direction: zero vector")
    unit = arr if abs(norm - 1.0) <= 1e-12 else arr / norm
    sign = 0.0
    for c in unit[::-1]:
        if c > eps:
            sign = 1.0
            break
        if c < -eps:
            sign = -1.0
            break
    if sign == 0.0:
        # Unit length forces some coordinate above eps in magnitude.
        raise ValueError("degenerate direction: all coordinates below tolerance")
    coords = unit if sign > 0 else -unit
    return Direction(tuple(coords)), sign


@dataclass(frozen=True)
class Hyperplane:
    """The set {x : normal.x = offset}, with canonical unit normal.

    Keeping the normal canonical makes the (normal, offset) pair a
    unique name for the hyperplane; building from an arbitrary normal
    goes through :meth:`from_vector`, which flips the offset together
    with the normal.
    """

    normal: Direction
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "offset", float(self.offset))
        if not math.isfinite(self.offset):
            raise ValueError("hyperplane offset must be finite")
        if not in_half_sphere(self.normal):
            raise ValueError("hyperplane normal must be canonical")

    @classmethod
    def from_vector(cls, a, b: float) -> "Hyperplane":
        """Build from any nonzero normal ``a`` and offset ``b`` of a.x = b."""
        arr = _coords_of(a)
        norm = float(np.linalg.norm(arr))
        direction, sign = canonicalize_direction(arr)
        return cls(direction, sign * float(b) / norm)

    def signed_distance(self, x) -> float:
        return float(np.dot(self.normal.array, np.asarray(x, dtype=float)) - self.offset)


@dataclass(frozen=True)
class DualPoint:
    """Dual coordinates (u, v) of a hyperplane with last normal coordinate
    rescaled to one."""

    u: tuple[float, ...]
    v: float

    def __post_init__(self):
        u = tuple(float(c) for c in self.u)
        v = float(self.v)
        if not (all(math.isfinite(c) for c in u) and math.isfinite(v)):
            raise ValueError("dual point coordinates must be finite")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)


@dataclass(frozen=True)
class DualHyperplane:
    """The dual-space hyperplane {(u, v) : v = y0 + u.z0}.

    This is exactly the image of the domain point (z0, y0): a
    hyperplane passes through (z0, y0) iff its dual point lies here.
    """

    z0: tuple[float, ...]
    y0: float

    def __post_init__(self):
        z0 = tuple(float(c) for c in self.z0)
        y0 = float(self.y0)
        if not (all(math.isfinite(c) for c in z0) and math.isfinite(y0)):
            raise ValueError("dual hyperplane coefficients must be finite")
        object.__setattr__(self, "z0", z0)
        object.__setattr__(self, "y0", y0)

    def contains(self, p: DualPoint, tol: float = 1e-9) -> bool:
        if len(p.u) != len(self.z0):
            raise ValueError("dual dimension mismatch")
        gap = p.v - self.y0 - math.fsum(ui * zi for ui, zi in zip(p.u, self.z0))
        return abs(gap) <= tol


@dataclass(frozen=True)
class DualSlab:
    """The dual-space slab {(u, v) : v - u.z0 in (y1, y2]}.

    Half-open on the left, closed on the right, with -inf/+inf allowed
    as endpoints.  It collects the hyperplanes crossing the vertical
    segment above z0 between heights y1 (exclusive) and y2 (inclusive).
    """

    z0: tuple[float, ...]
    y1: float
    y2: float

    def __post_init__(self):
        z0 = tuple(float(c) for c in self.z0)
        y1 = float(self.y1)
        y2 = float(self.y2)
        if not all(math.isfinite(c) for c in z0):
            raise ValueError("slab base point must be finite")
        if math.isnan(y1) or math.isnan(y2) or y1 > y2:
            raise ValueError("slab heights must satisfy y1 <= y2")
        object.__setattr__(self, "z0", z0)
        object.__setattr__(self, "y1", y1)
        object.__setattr__(self, "y2", y2)

    def contains(self, p: DualPoint) -> bool:
        if len(p.u) != len(self.z0):
            raise ValueError("dual dimension mismatch")
        t = p.v - math.fsum(ui * zi for ui, zi in zip(p.u, self.z0))
        return self.y1 < t <= self.y2


def psi(h: Hyperplane) -> DualPoint:
    """Map a hyperplane with non-equatorial normal to its dual point.

    With normal a = (a_1, ..., a_d) and offset b, the dual point is
    (a_1/a_d, ..., a_{d-1}/a_d, b/a_d).  Normals whose last coordinate
    is zero within tolerance have no dual point and raise.
    """
    coords = h.normal.coords
    last = coords[-1]
    if abs(last) <= EPS_ZERO:
        raise ValueError("hyperplane not in H1: normal is orthogonal to the last axis")
    u = tuple(c / last for c in coords[:-1])
    return DualPoint(u, h.offset / last)


def psi_inverse(p: DualPoint) -> Hyperplane:
    """Recover the unique hyperplane whose dual point is ``p``.

    The normal is (u, 1) renormalized, which is automatically
    canonical because its last coordinate is positive; the round trip
    with :func:`psi` is exact to float rounding.
    """
    raw = np.append(np.asarray(p.u, dtype=float), 1.0)
    scale = float(np.linalg.norm(raw))
    return Hyperplane(Direction(tuple(raw / scale)), p.v / scale)


def dual_of_point(z0, y0: float) -> DualHyperplane:
    """Dual hyperplane of the domain point (z0, y0): all hyperplanes
    through that point, seen in dual coordinates."""
    arr = np.atleast_1d(np.asarray(z0, dtype=float))
    return DualHyperplane(tuple(arr), float(y0))


def cosine_factor(p: DualPoint) -> float:
    """Density factor 1/sqrt(1 + |u|^2) attached to a dual point.

    Equals the last coordinate of the corresponding canonical normal,
    i.e. the cosine of the angle between the normal and the last axis.
    """
    return 1.0 / math.sqrt(1.0 + math.fsum(c * c for c in p.u))
