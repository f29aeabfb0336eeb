"""Local-hidden-state ensembles and the capacity support function.

An LHS ensemble is a probability measure over pure qubit states (Bloch
points). The capacity of an ensemble is the convex body of all n-component
operator tuples it can simulate through response functions; its support in a
composite direction Z has the closed form

    h(Z) = sum_k w_k max_i <Z_i, P_k>,

a weighted node sum of per-node maxima (the per-node response optimization is
solved exactly by assigning each node to its best component). A brute-force
response-function oracle cross-checks that nothing feasible beats this value.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import FormatError, ValidationError
from .pauli import Direction, HermOp
from .quadrature import Quadrature, _force_unit_sum

_WEIGHT_SUM_TOL = 1e-6
_NODE_NORM_TOL = 1e-6


@dataclass(frozen=True)
class UniformEnsemble:
    """The spherically symmetric ensemble, discretized by a quadrature rule."""

    quadrature: Quadrature

    @property
    def points(self) -> np.ndarray:
        return self.quadrature.nodes

    @property
    def weights(self) -> np.ndarray:
        return self.quadrature.weights

    @property
    def affine_coords(self) -> np.ndarray:
        return self.quadrature.affine_coords


@dataclass(frozen=True)
class DiscreteEnsemble:
    """A finite ensemble of Bloch points with probability weights."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if points.ndim != 2 or points.shape[1] != 3 or points.shape[0] == 0:
            raise ValidationError("ensemble points must be a nonempty (N, 3) array")
        if weights.shape != (points.shape[0],):
            raise ValidationError("ensemble weights must match the point count")
        if np.any(weights < 0.0):
            raise ValidationError("ensemble weights must be nonnegative")
        if abs(np.sum(weights) - 1.0) > 1e-12:
            raise ValidationError("ensemble weights must sum to 1")
        norms = np.linalg.norm(points, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-9:
            raise ValidationError("ensemble points must be unit vectors")
        points.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @cached_property
    def affine_coords(self) -> np.ndarray:
        coords = np.concatenate(
            [np.ones((self.points.shape[0], 1)), self.points], axis=1
        )
        coords.setflags(write=False)
        return coords


LhsEnsemble = UniformEnsemble | DiscreteEnsemble


def load_discrete(path: str) -> DiscreteEnsemble:
    """Load a discrete ensemble from rows "x y z w" (unit point, probability)."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = stripped.split()
            if len(fields) != 4:
                raise FormatError(
                    "%s:%d: expected 4 fields 'x y z w', got %d"
                    % (path, lineno, len(fields))
                )
            try:
                rows.append([float(f) for f in fields])
            except ValueError as exc:
                raise FormatError(
                    "%s:%d: non-numeric field in %r" % (path, lineno, stripped)
                ) from exc
    if not rows:
        raise FormatError("%s: no ensemble rows found" % path)
    arr = np.array(rows)
    points, w = arr[:, :3], arr[:, 3].copy()
    norms = np.linalg.norm(points, axis=1)
    if np.max(np.abs(norms - 1.0)) > _NODE_NORM_TOL:
        raise ValidationError(
            "%s: ensemble points are not unit length (worst deviation %r)"
            % (path, np.max(np.abs(norms - 1.0)))
        )
    if np.any(w < 0.0):
        raise ValidationError("%s: ensemble weights must be nonnegative" % path)
    total = np.sum(w)
    if abs(total - 1.0) > _WEIGHT_SUM_TOL:
        raise ValidationError(
            "%s: ensemble weights sum to %r, expected 1" % (path, total)
        )
    w /= total
    return DiscreteEnsemble(points / norms[:, None], _force_unit_sum(w))


def _component_values(u: LhsEnsemble, z: Direction) -> np.ndarray:
    """Matrix of <Z_i, P_k>, shape (nodes, components)."""
    return u.affine_coords @ z.coords_matrix().T / 2.0


def capacity_support(u: LhsEnsemble, z: Direction) -> float:
    """Support of the ensemble capacity: sum_k w_k max_i <Z_i, P_k>.

    At nodes where several components tie for the maximum the lowest index
    wins; the value is unaffected by the tie rule.
    """
    return float(np.dot(u.weights, _component_values(u, z).max(axis=1)))


def uniform_capacity_pair(z: Direction) -> float:
    """Exact uniform-ensemble capacity for a two-component direction.

    For n=2 the direction constraint forces Z_2 = -Z_1, so the node maximum
    is |<Z_1, P>| and the spherical average has the closed form
    (1/4)(b + a^2 / b) for |a| <= b, else |a| / 2, with a the scalar part and
    b the Bloch-vector norm of Z_1. No quadrature error enters.
    """
    if z.n_outcomes != 2:
        raise ValidationError("closed-form uniform capacity needs a 2-component direction")
    a = float(z.parts[0].coords[0])
    b = float(np.linalg.norm(z.parts[0].coords[1:]))
    if abs(a) <= b:
        return 0.25 * (b + a * a / b)
    return 0.5 * abs(a)


def ensemble_barycenter(u: LhsEnsemble) -> HermOp:
    """The ensemble average sum_k w_k P(n_k) as an operator."""
    return HermOp(u.weights @ u.affine_coords)


def minimal_requirement_residual(u: LhsEnsemble, rho) -> float:
    """HS distance between the ensemble barycenter and the B-side marginal.

    Zero means the ensemble reproduces the state's reduced density operator
    and is admissible as a local model candidate.
    """
    diff = ensemble_barycenter(u).coords - rho.rho_b.coords
    return float(np.sqrt(0.5 * np.dot(diff, diff)))


def greedy_response_value(u: DiscreteEnsemble, z: Direction) -> float:
    """Value of the per-node argmax response (ties to the lowest index)."""
    vals = _component_values(u, z)
    picks = np.argmax(vals, axis=1)
    return float(np.dot(u.weights, vals[np.arange(len(picks)), picks]))


def response_oracle(
    u: DiscreteEnsemble, z: Direction, trials: int, rng: np.random.Generator | None = None
) -> float:
    """Best simulated value over random row-stochastic responses plus greedy.

    Each trial draws a row-stochastic matrix G (rows uniform on the simplex)
    and evaluates sum_k w_k sum_i G_ki <Z_i, P_k>; the greedy per-node argmax
    assignment is always included, so the result equals capacity_support up
    to roundoff and never exceeds it.
    """
    if not isinstance(u, DiscreteEnsemble):
        raise ValidationError("response oracle runs on discrete ensembles only")
    if rng is None:
        rng = np.random.default_rng(0)
    vals = _component_values(u, z)
    n_points, n_comp = vals.shape
    best = greedy_response_value(u, z)
    for _ in range(trials):
        g = rng.dirichlet(np.ones(n_comp), size=n_points)
        best = max(best, float(np.dot(u.weights, np.sum(g * vals, axis=1))))
    return best
