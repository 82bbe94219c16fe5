"""Finite signed measures on (half-sphere) x R, as atoms plus particles.

A measure is a finite list of weighted (direction, offset) entries.
True point masses live in ``atoms``; ``particles`` hold a finite
quadrature cloud standing in for a component with no point masses.
The distinction is purely semantic (both enter every integral the same
way) but it is what extraction and the certificates reason about.

Canonicalization happens in two steps mirroring the underlying change
of variables: entries with arbitrary nonzero direction vectors are
rescaled onto the unit sphere (``normalize_from_euclidean``), then
lower-hemisphere entries are reflected onto the canonical half-sphere,
which costs an extra linear term recorded in an :class:`AffineTail`
(``fold_to_half_sphere``).  ``canonicalize_full`` composes the two and
merges duplicate entries.

Dual-space integrals (over slabs and half-spaces) weight each
non-equatorial entry by its last direction coordinate; equatorial
entries are retained in the measure but contribute zero, since they
have no dual point.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    EPS_ZERO,
    Direction,
    DualHyperplane,
    DualSlab,
    in_half_sphere,
)

__all__ = [
    "EPS_MERGE",
    "EPS_WEIGHT",
    "RidgeAtom",
    "RidgeMeasure",
    "AffineTail",
    "EuclideanMeasure",
    "normalize_from_euclidean",
    "fold_to_half_sphere",
    "canonicalize_full",
    "decompose",
    "slab_integral",
    "half_space_integral",
    "total_variation",
    "is_canonical",
    "entry_arrays",
    "merge_entries",
    "load_measure",
    "save_measure",
]

log = logging.getLogger(__name__)

# Two entries whose directions and offsets agree within EPS_MERGE
# (max-norm) are the same entry; weights below EPS_WEIGHT are pruned.
EPS_MERGE = 1e-9
EPS_WEIGHT = 1e-12


@dataclass(frozen=True)
class RidgeAtom:
    """One weighted entry (direction, offset, signed weight)."""

    dir: Direction
    b: float
    w: float

    def __post_init__(self):
        b = float(self.b)
        w = float(self.w)
        if not (math.isfinite(b) and math.isfinite(w)):
            raise ValueError("atom offset and weight must be finite")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "w", w)


@dataclass(frozen=True)
class RidgeMeasure:
    """Finite signed measure: point masses plus a particle cloud.

    ``dim`` is the ambient direction dimension.  Directions are unit
    vectors; canonical measures (everything downstream of
    :func:`canonicalize_full` or the file reader) additionally have all
    directions on the canonical half-sphere, no near-duplicate atoms,
    and no sub-threshold weights.
    """

    dim: int
    atoms: tuple[RidgeAtom, ...] = ()
    particles: tuple[RidgeAtom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "particles", tuple(self.particles))
        for e in self.atoms + self.particles:
            if len(e.dir) != self.dim:
                raise ValueError("entry dimension does not match measure dim")

    def all_entries(self) -> tuple[RidgeAtom, ...]:
        return self.atoms + self.particles


@dataclass(frozen=True)
class AffineTail:
    """Additive remainder a0.x + b0 plus the representation constant c0."""

    a0: tuple[float, ...]
    b0: float = 0.0
    c0: float = 0.0

    def __post_init__(self):
        a0 = tuple(float(c) + 0.0 for c in np.atleast_1d(np.asarray(self.a0, dtype=float)))
        b0 = float(self.b0)
        c0 = float(self.c0)
        if not (all(math.isfinite(c) for c in a0) and math.isfinite(b0) and math.isfinite(c0)):
            raise ValueError("affine tail must be finite")
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "b0", b0)
        object.__setattr__(self, "c0", c0)

    @classmethod
    def zero(cls, dim: int) -> "AffineTail":
        return cls((0.0,) * dim, 0.0, 0.0)


@dataclass(frozen=True)
class EuclideanMeasure:
    """Raw finite measure with unconstrained direction vectors.

    Entries are (a, b, w) with a of length ``dim`` and any norm;
    compact support is automatic because the list is finite.
    """

    dim: int
    entries: tuple[tuple[tuple[float, ...], float, float], ...]

    def __post_init__(self):
        cleaned = []
        for a, b, w in self.entries:
            vec = tuple(float(c) for c in np.atleast_1d(np.asarray(a, dtype=float)))
            if len(vec) != self.dim:
                raise ValueError("entry direction length does not match dim")
            b = float(b)
            w = float(w)
            if not (all(math.isfinite(c) for c in vec) and math.isfinite(b) and math.isfinite(w)):
                raise ValueError("entries must be finite")
            cleaned.append((vec, b, w))
        object.__setattr__(self, "entries", tuple(cleaned))


def entry_arrays(m: RidgeMeasure) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stack atoms then particles into (directions, offsets, weights) arrays."""
    entries = m.all_entries()
    if not entries:
        return (
            np.zeros((0, m.dim)),
            np.zeros(0),
            np.zeros(0),
        )
    A = np.array([e.dir.coords for e in entries], dtype=float)
    b = np.array([e.b for e in entries], dtype=float)
    w = np.array([e.w for e in entries], dtype=float)
    return A, b, w


def is_canonical(m: RidgeMeasure) -> bool:
    """True iff every entry direction lies on the canonical half-sphere."""
    return all(in_half_sphere(e.dir) for e in m.all_entries())


def normalize_from_euclidean(t: EuclideanMeasure) -> RidgeMeasure:
    """Rescale arbitrary-norm entries onto the unit sphere.

    (a, b, w) becomes (a/|a|, b/|a|, w*|a|), which leaves the induced
    function unchanged because the activation is positively
    homogeneous.  Entries with |a| below tolerance contribute nothing
    and are dropped (logged, not silently).  Directions stay on the
    full sphere; folding onto the half-sphere is a separate step.
    """
    atoms = []
    for a, b, w in t.entries:
        arr = np.asarray(a, dtype=float)
        norm = float(np.linalg.norm(arr))
        if norm <= EPS_ZERO:
            log.info("dropping zero-direction entry (b=%r, w=%r): it contributes nothing", b, w)
            continue
        if abs(norm - 1.0) <= 1e-12:
            unit, bb, ww = arr, b, w
        else:
            unit, bb, ww = arr / norm, b / norm, w * norm
        atoms.append(RidgeAtom(Direction(tuple(unit)), bb, ww))
    return RidgeMeasure(t.dim, tuple(atoms), ())


def fold_to_half_sphere(m: RidgeMeasure) -> tuple[RidgeMeasure, AffineTail]:
    """Reflect lower-hemisphere entries onto the canonical half-sphere.

    An entry (a, b, w) with a off the half-sphere is replaced by
    (-a, -b, w); the identity relu(-t) = relu(t) - t makes the swap
    exact at the cost of the linear term w * (a.x), which accumulates
    into the returned tail.  The defining contract is pointwise:

        eval(input, x) = eval(output, x) + tail.a0 . x   for all x.
    """
    a0 = np.zeros(m.dim)
    out_atoms: list[RidgeAtom] = []
    out_particles: list[RidgeAtom] = []
    for src, dst in ((m.atoms, out_atoms), (m.particles, out_particles)):
        for e in src:
            if in_half_sphere(e.dir):
                dst.append(e)
            else:
                a0 += e.w * e.dir.array
                dst.append(RidgeAtom(e.dir.negated(), -e.b, e.w))
    folded = RidgeMeasure(m.dim, tuple(out_atoms), tuple(out_particles))
    return folded, AffineTail(tuple(a0), 0.0, 0.0)


def merge_entries(
    entries,
    eps_merge: float = EPS_MERGE,
    eps_weight: float = EPS_WEIGHT,
) -> tuple[RidgeAtom, ...]:
    """Merge near-duplicate (direction, offset) entries and prune dust.

    Entries are sorted lexicographically by (coordinates, offset) and
    merged greedily into the first member of each run whose direction
    and offset agree within ``eps_merge`` in max-norm; merged weights
    below ``eps_weight`` in magnitude are dropped.  The output order is
    the sorted order, which makes canonical measures deterministic.
    """
    ordered = sorted(entries, key=lambda e: (e.dir.coords, e.b))
    merged: list[RidgeAtom] = []
    rep: RidgeAtom | None = None
    wsum = 0.0

    def close(a: RidgeAtom, b: RidgeAtom) -> bool:
        gap = max(abs(x - y) for x, y in zip(a.dir.coords, b.dir.coords))
        return max(gap, abs(a.b - b.b)) <= eps_merge

    def flush():
        if rep is not None and abs(wsum) >= eps_weight:
            merged.append(RidgeAtom(rep.dir, rep.b, wsum))

    for e in ordered:
        if rep is not None and close(rep, e):
            wsum += e.w
        else:
            flush()
            rep = e
            wsum = e.w
    flush()
    return tuple(merged)


def canonicalize_full(t: EuclideanMeasure, c0: float = 0.0) -> tuple[RidgeMeasure, AffineTail]:
    """Full canonicalization pipeline: normalize, fold, merge, prune.

    The function value is preserved pointwise: evaluating the raw
    entries equals evaluating the canonical measure plus its tail.
    """
    sphere = normalize_from_euclidean(t)
    folded, tail = fold_to_half_sphere(sphere)
    atoms = merge_entries(folded.atoms)
    return RidgeMeasure(t.dim, atoms, ()), AffineTail(tail.a0, 0.0, float(c0))


def decompose(m: RidgeMeasure) -> tuple[RidgeMeasure, RidgeMeasure]:
    """Split into the purely atomic part and the particle residual."""
    return (
        RidgeMeasure(m.dim, m.atoms, ()),
        RidgeMeasure(m.dim, (), m.particles),
    )


def total_variation(m: RidgeMeasure) -> float:
    """Sum of absolute weights over atoms and particles."""
    _, _, w = entry_arrays(m)
    return float(np.sum(np.abs(w)))


def _require_upper(al: np.ndarray) -> None:
    if np.any(al < -EPS_ZERO):
        raise ValueError("measure is not canonical: entry direction off the half-sphere")


def slab_integral(m: RidgeMeasure, s: DualSlab) -> float:
    """Weighted mass of dual points inside a slab.

    Each non-equatorial entry contributes w * (last direction
    coordinate) when its hyperplane crosses the vertical segment above
    ``s.z0`` between heights y1 (exclusive) and y2 (inclusive); in
    primal terms, when a.(z0, y1) < b <= a.(z0, y2).  Equatorial
    entries contribute zero.
    """
    z0 = np.asarray(s.z0, dtype=float)
    if z0.size != m.dim - 1:
        raise ValueError("slab base dimension does not match measure dim")
    A, b, w = entry_arrays(m)
    if A.shape[0] == 0:
        return 0.0
    al = A[:, -1]
    _require_upper(al)
    keep = al > EPS_ZERO
    A, b, w, al = A[keep], b[keep], w[keep], al[keep]
    if A.shape[0] == 0:
        return 0.0
    x1 = np.append(z0, s.y1)
    x2 = np.append(z0, s.y2)
    hi = A @ x2 >= b
    lo = A @ x1 >= b
    return float(np.sum((w * al)[hi & ~lo]))


def half_space_integral(m: RidgeMeasure, boundary: DualHyperplane, side: str) -> float:
    """Weighted mass of dual points strictly on one side of a dual
    hyperplane; points exactly on the boundary are excluded.

    ``side`` is "above" (v > y0 + u.z0) or "below" (v < y0 + u.z0).
    """
    if side not in ("above", "below"):
        raise ValueError('side must be "above" or "below"')
    z0 = np.asarray(boundary.z0, dtype=float)
    if z0.size != m.dim - 1:
        raise ValueError("boundary dimension does not match measure dim")
    A, b, w = entry_arrays(m)
    if A.shape[0] == 0:
        return 0.0
    al = A[:, -1]
    _require_upper(al)
    keep = al > EPS_ZERO
    t = A @ np.append(z0, boundary.y0)
    if side == "above":
        sel = keep & (b > t)
    else:
        sel = keep & (b < t)
    return float(np.sum((w * al)[sel]))


# ----------------------------------------------------------------------
# Measure file format
#
# { "dim": int, "c0": number,
#   "atoms":     [{"a": [...], "b": number, "w": number}, ...],
#   "particles": [{"a": [...], "b": number, "w": number}, ...],
#   "tail": {"a0": [...], "b0": number} }
#
# The reader canonicalizes (entries may have any nonzero direction
# vectors); the writer refuses non-canonical measures so files on disk
# are always in canonical form.
# ----------------------------------------------------------------------


def _entries_from_json(raw, dim: int, what: str) -> EuclideanMeasure:
    if not isinstance(raw, list):
        raise ValueError(f"measure file: {what} must be a list")
    entries = []
    for item in raw:
        try:
            entries.append((tuple(item["a"]), float(item["b"]), float(item["w"])))
        except (TypeError, KeyError, ValueError) as exc:
            raise ValueError(f"measure file: malformed {what} entry: {exc}") from exc
    return EuclideanMeasure(dim, tuple(entries))


def load_measure(path) -> tuple[RidgeMeasure, AffineTail]:
    """Read a measure file and return it in canonical form."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"measure file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "dim" not in doc:
        raise ValueError('measure file must be an object with a "dim" field')
    dim = int(doc["dim"])
    if dim < 1:
        raise ValueError("measure dim must be at least 1")
    c0 = float(doc.get("c0", 0.0))
    raw_tail = doc.get("tail", {})
    a0_file = np.asarray(raw_tail.get("a0", [0.0] * dim), dtype=float)
    if a0_file.shape != (dim,):
        raise ValueError("measure file: tail a0 has wrong length")
    b0 = float(raw_tail.get("b0", 0.0))

    atoms_in = _entries_from_json(doc.get("atoms", []), dim, "atoms")
    particles_in = _entries_from_json(doc.get("particles", []), dim, "particles")

    atomic, tail_a = canonicalize_full(atoms_in, 0.0)
    cloud_folded, tail_p = fold_to_half_sphere(normalize_from_euclidean(particles_in))
    particles = merge_entries(cloud_folded.atoms)

    measure = RidgeMeasure(dim, atomic.atoms, particles)
    a0 = a0_file + np.asarray(tail_a.a0) + np.asarray(tail_p.a0)
    return measure, AffineTail(tuple(a0), b0, c0)


def save_measure(path, m: RidgeMeasure, tail: AffineTail) -> None:
    """Write a canonical measure (plus tail) to a measure file."""
    if len(tail.a0) != m.dim:
        raise ValueError("tail dimension does not match measure dim")
    if not is_canonical(m):
        raise ValueError("refusing to write a non-canonical measure")
    doc = {
        "dim": m.dim,
        "c0": tail.c0,
        "atoms": [{"a": list(e.dir.coords), "b": e.b, "w": e.w} for e in m.atoms],
        "particles": [{"a": list(e.dir.coords), "b": e.b, "w": e.w} for e in m.particles],
        "tail": {"a0": list(tail.a0), "b0": tail.b0},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
