"""Real-coordinate algebra for single-qubit Hermitian operators.

Every 2x2 Hermitian operator is stored as a real 4-vector x with the fixed
convention

    X = (1/2) * sum_i x_i sigma_i,   sigma = (I, sx, sy, sz),

so trace(X) = x0, the Hilbert-Schmidt inner product Tr(X Y) is (1/2) x.y,
and the rank-1 projector onto Bloch direction n has coordinates (1, n).
Composite directions (ordered tuples Z_1..Z_n with sum zero and unit total
HS norm) are the search space of the gap optimization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

_UNIT_TOL = 1e-12
_DIRECTION_TOL = 1e-12
_DEGENERATE_TOL = 1e-14


def _frozen_array(values, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class HermOp:
    """A 2x2 Hermitian operator as its real Pauli coordinate 4-vector."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen_array(self.coords, (4,)))

    @property
    def trace(self) -> float:
        return float(self.coords[0])

    @property
    def spatial(self) -> np.ndarray:
        return self.coords[1:]


@dataclass(frozen=True)
class BlochPoint:
    """A unit vector on the Bloch sphere."""

    n: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.n, (3,))
        if abs(np.linalg.norm(arr) - 1.0) > _UNIT_TOL:
            raise ValidationError(
                "Bloch point must be a unit 3-vector, got norm %r" % np.linalg.norm(arr)
            )
        object.__setattr__(self, "n", arr)


@dataclass(frozen=True)
class Direction:
    """An ordered tuple Z_1..Z_n with sum 0 and total HS norm 1.

    Constructed via normalize_direction (or directly from coordinates that
    already satisfy the constraints; construction validates them).
    """

    parts: tuple[HermOp, ...]

    def __post_init__(self):
        parts = tuple(
            p if isinstance(p, HermOp) else HermOp(p) for p in self.parts
        )
        if len(parts) < 2:
            raise ValidationError("a direction needs at least 2 components")
        mat = np.stack([p.coords for p in parts])
        if np.max(np.abs(mat.sum(axis=0))) > _DIRECTION_TOL:
            raise ValidationError("direction components must sum to zero")
        total = 0.5 * float(np.sum(mat * mat))
        if abs(total - 1.0) > _DIRECTION_TOL:
            raise ValidationError(
                "direction must have unit total HS norm, got %r" % total
            )
        object.__setattr__(self, "parts", parts)

    @property
    def n_outcomes(self) -> int:
        return len(self.parts)

    def coords_matrix(self) -> np.ndarray:
        """Component coordinates as an (n, 4) array, one row per Z_i."""
        return np.stack([p.coords for p in self.parts])


def hs_inner(a: HermOp, b: HermOp) -> float:
    """Hilbert-Schmidt inner product Tr(X Y) = (1/2) x.y in coordinates."""
    return 0.5 * float(np.dot(a.coords, b.coords))


def projector(n: BlochPoint) -> HermOp:
    """Rank-1 projector (1/2)(I + n.sigma), coordinates (1, n)."""
    return HermOp(np.concatenate(([1.0], n.n)))


def eig_max(a: HermOp) -> float:
    """Larger eigenvalue (x0 + |x_vec|) / 2."""
    return 0.5 * (float(a.coords[0]) + float(np.linalg.norm(a.coords[1:])))


def eig_min(a: HermOp) -> float:
    """Smaller eigenvalue (x0 - |x_vec|) / 2."""
    return 0.5 * (float(a.coords[0]) - float(np.linalg.norm(a.coords[1:])))


def is_psd(a: HermOp, tol: float = 0.0) -> bool:
    """Positive semidefiniteness: x0 >= 0 and x0^2 >= |x_vec|^2."""
    x0 = float(a.coords[0])
    return x0 >= -tol and x0 * x0 - float(np.dot(a.coords[1:], a.coords[1:])) >= -tol


def normalize_direction(zraw: Iterable[HermOp | Sequence[float] | np.ndarray]) -> Direction:
    """Center and scale raw components into the normalized direction set.

    Applies Z_i -> (Z_i - C) / sqrt(D) with C the component mean and D the
    total HS norm of the centered tuple. Rejects degenerate input where all
    components coincide (D below 1e-14).
    """
    rows = [
        p.coords if isinstance(p, HermOp) else np.asarray(p, dtype=float).reshape(4)
        for p in zraw
    ]
    if len(rows) < 2:
        raise ValidationError("a direction needs at least 2 components")
    mat = np.stack(rows)
    centered = mat - mat.mean(axis=0)
    d = 0.5 * float(np.sum(centered * centered))
    if d <= _DEGENERATE_TOL:
        raise ValidationError(
            "degenerate direction: all components equal (spread %r)" % d
        )
    return Direction(tuple(HermOp(row) for row in centered / np.sqrt(d)))
