"""Pointwise evaluation, one-sided derivatives, and rotations.

A measure plus tail induces the function

    f(x) = sum_e w_e * (relu(a_e.x - b_e) - relu(-b_e)) + a0.x + b0 + c0

over atoms and particles alike; a finite network is the plain
weighted-relu sum c0 + sum_i c_i relu(a_i.x - b_i).  Both evaluators
accept a single point or a batch of points stacked as rows.

The one-sided directional derivative in the +last-axis direction has a
closed form for canonical measures: the weighted sum of last direction
coordinates over entries whose half-space condition a.x >= b holds
(boundary included, making it the right derivative at creases).
Derivatives in other directions are obtained by rotating the
representation first, which is what :func:`rotate_representation` is
for.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .geometry import EPS_ZERO, Direction
from .measure import (
    AffineTail,
    RidgeAtom,
    RidgeMeasure,
    entry_arrays,
    fold_to_half_sphere,
    merge_entries,
)

__all__ = [
    "FD_H",
    "ORTHO_TOL",
    "relu",
    "NetworkUnit",
    "FiniteNetwork",
    "eval_measure",
    "eval_network",
    "directional_derivative",
    "fd_directional_derivative",
    "rotate_representation",
    "load_network",
    "save_network",
]

import json

# Default forward-difference step; the quotient is trusted only at
# points further than sqrt(FD_H) from every entry hyperplane.
FD_H = 1e-7

# Rotation matrices must satisfy |R^T R - I| <= ORTHO_TOL entrywise.
ORTHO_TOL = 1e-10


def relu(t):
    """max(0, t), elementwise."""
    return np.maximum(t, 0.0)


@dataclass(frozen=True)
class NetworkUnit:
    """One term c * relu(a.x - b) of a finite network."""

    c: float
    a: Direction
    b: float

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "b", float(self.b))
        if not (math.isfinite(self.c) and math.isfinite(self.b)):
            raise ValueError("unit weight and offset must be finite")


@dataclass(frozen=True)
class FiniteNetwork:
    """Finite-width network c0 + sum_i c_i relu(a_i.x - b_i).

    Unit directions are unit vectors anywhere on the sphere: encoding
    a linear term requires one unit on each hemisphere, so units are
    not restricted to the canonical half (unlike measure entries).
    """

    dim: int
    c0: float
    units: tuple[NetworkUnit, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "units", tuple(self.units))
        for u in self.units:
            if len(u.a) != self.dim:
                raise ValueError("unit dimension does not match network dim")


def _as_batch(x, dim: int) -> tuple[np.ndarray, bool]:
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.ndim != 2 or X.shape[1] != dim:
        raise ValueError(f"points must have dimension {dim}")
    return X, single


def eval_measure(m: RidgeMeasure, tail: AffineTail | None, x):
    """Evaluate the function induced by a measure (plus optional tail).

    ``x`` may be one point of length dim or a batch of shape (N, dim);
    the result is a float or a length-N array accordingly.
    """
    X, single = _as_batch(x, m.dim)
    A, b, w = entry_arrays(m)
    if A.shape[0]:
        vals = relu(X @ A.T - b) @ w - float(np.dot(relu(-b), w))
    else:
        vals = np.zeros(X.shape[0])
    if tail is not None:
        if len(tail.a0) != m.dim:
            raise ValueError("tail dimension does not match measure dim")
        vals = vals + X @ np.asarray(tail.a0) + tail.b0 + tail.c0
    return float(vals[0]) if single else vals


def eval_network(net: FiniteNetwork, x):
    """Evaluate a finite network at one point or a batch of points."""
    X, single = _as_batch(x, net.dim)
    if net.units:
        A = np.array([u.a.coords for u in net.units], dtype=float)
        b = np.array([u.b for u in net.units], dtype=float)
        c = np.array([u.c for u in net.units], dtype=float)
        vals = net.c0 + relu(X @ A.T - b) @ c
    else:
        vals = np.full(X.shape[0], net.c0)
    return float(vals[0]) if single else vals


def directional_derivative(m: RidgeMeasure, x, tail: AffineTail | None = None):
    """One-sided derivative in the +last-axis direction.

    For a canonical measure this is the sum of w * (last direction
    coordinate) over entries with a.x >= b, boundary included.
    Equatorial entries (last coordinate within tolerance of zero) are
    counted as exact zeros.  Accepts a single point or a batch.
    """
    X, single = _as_batch(x, m.dim)
    A, b, w = entry_arrays(m)
    if A.shape[0]:
        al = A[:, -1]
        if np.any(al < -EPS_ZERO):
            raise ValueError("measure is not canonical: entry direction off the half-sphere")
        contrib = np.where(al > EPS_ZERO, w * al, 0.0)
        active = (X @ A.T) >= b
        vals = active @ contrib
    else:
        vals = np.zeros(X.shape[0])
    if tail is not None:
        vals = vals + tail.a0[-1]
    return float(vals[0]) if single else vals


def fd_directional_derivative(f, x, d, h: float = FD_H) -> float:
    """Forward-difference quotient (f(x + h*d) - f(x)) / h."""
    if h <= 0:
        raise ValueError("step h must be positive")
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    return (f(x + h * d) - f(x)) / h


def rotate_representation(
    m: RidgeMeasure, tail: AffineTail, R
) -> tuple[RidgeMeasure, AffineTail]:
    """Rotate a representation so the new function is g(x) = f(R^T x).

    Entry directions map through R and are folded back onto the
    canonical half-sphere (tail picks up the fold corrections); the
    tail's linear part rotates along.  Function values and total
    variation are preserved pointwise.
    """
    R = np.asarray(R, dtype=float)
    if R.shape != (m.dim, m.dim):
        raise ValueError("rotation matrix shape does not match measure dim")
    if np.max(np.abs(R.T @ R - np.eye(m.dim))) > ORTHO_TOL:
        raise ValueError("matrix is not orthogonal within tolerance")

    def rotated(entries):
        out = []
        for e in entries:
            vec = R @ e.dir.array
            vec = vec / np.linalg.norm(vec)
            out.append(RidgeAtom(Direction(tuple(vec)), e.b, e.w))
        return tuple(out)

    spun = RidgeMeasure(m.dim, rotated(m.atoms), rotated(m.particles))
    folded, fold_tail = fold_to_half_sphere(spun)
    out = RidgeMeasure(
        m.dim, merge_entries(folded.atoms), merge_entries(folded.particles)
    )
    a0 = R @ np.asarray(tail.a0) + np.asarray(fold_tail.a0)
    return out, AffineTail(tuple(a0), tail.b0, tail.c0)


# ----------------------------------------------------------------------
# Network file format
#
# { "dim": int, "c0": number,
#   "units": [{"c": number, "a": [...], "b": number}, ...] }
#
# The reader rescales non-unit direction vectors (the relu is
# positively homogeneous) and drops zero-weight units; degenerate
# directions fold their constant contribution into c0.
# ----------------------------------------------------------------------


def load_network(path) -> FiniteNetwork:
    """Read a network file, normalizing directions and pruning dust."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"network file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "dim" not in doc:
        raise ValueError('network file must be an object with a "dim" field')
    dim = int(doc["dim"])
    if dim < 1:
        raise ValueError("network dim must be at least 1")
    c0 = float(doc.get("c0", 0.0))
    units = []
    for item in doc.get("units", []):
        try:
            c = float(item["c"])
            b = float(item["b"])
            a = np.asarray(item["a"], dtype=float)
        except (TypeError, KeyError, ValueError) as exc:
            raise ValueError(f"network file: malformed unit: {exc}") from exc
        if a.shape != (dim,):
            raise ValueError("network file: unit direction has wrong length")
        norm = float(np.linalg.norm(a))
        if norm <= EPS_ZERO:
            c0 += c * float(relu(-b))
            continue
        if abs(norm - 1.0) > 1e-12:
            a, b, c = a / norm, b / norm, c * norm
        if abs(c) >= 1e-12:
            units.append(NetworkUnit(c, Direction(tuple(a)), b))
    return FiniteNetwork(dim, c0, tuple(units))


def save_network(path, net: FiniteNetwork) -> None:
    """Write a finite network to a network file."""
    doc = {
        "dim": net.dim,
        "c0": net.c0,
        "units": [{"c": u.c, "a": list(u.a.coords), "b": u.b} for u in net.units],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
