"""Rank-1 n-outcome measurements and their steering-side support.

A rank-1 POVM is parameterized by n Bloch directions and n weights alpha in
[0, 1] with the completeness constraint sum_i alpha_i (1, n_i) = (2, 0, 0, 0).
For 4 generic directions the alphas are uniquely determined by a linear
solve; direction sets that make the system near-singular or push any alpha
out of [0, 1] are infeasible (the optimizer treats them as infinite energy).
The two-outcome projective case has an exact support formula, so it never
needs a search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .pauli import BlochPoint, Direction, HermOp, eig_max, hs_inner
from .states import TwoQubitState, dual_map, steering_map

_ALPHA_SLACK = 1e-12
_COMPLETENESS_TOL = 1e-9
COND_THRESHOLD = 1e10


@dataclass(frozen=True)
class RankOnePovm:
    """Measurement with elements E_i = alpha_i P(n_i)."""

    dirs: tuple[BlochPoint, ...]
    alphas: np.ndarray

    def __post_init__(self):
        dirs = tuple(
            d if isinstance(d, BlochPoint) else BlochPoint(d) for d in self.dirs
        )
        alphas = np.array(self.alphas, dtype=float).reshape(len(dirs))
        if np.any(alphas < -_ALPHA_SLACK) or np.any(alphas > 1.0 + _ALPHA_SLACK):
            raise ValidationError("measurement weights must lie in [0, 1]")
        resid = np.zeros(4)
        resid[0] = np.sum(alphas) - 2.0
        for d, a in zip(dirs, alphas):
            resid[1:] += a * d.n
        if np.max(np.abs(resid)) > _COMPLETENESS_TOL:
            raise ValidationError(
                "measurement elements must sum to the identity "
                "(worst completeness residual %r)" % np.max(np.abs(resid))
            )
        alphas.setflags(write=False)
        object.__setattr__(self, "dirs", dirs)
        object.__setattr__(self, "alphas", alphas)

    @property
    def n_outcomes(self) -> int:
        return len(self.dirs)

    def dir_matrix(self) -> np.ndarray:
        return np.stack([d.n for d in self.dirs])


@dataclass(frozen=True)
class Pvm:
    """Two-outcome projective measurement along an axis."""

    axis: BlochPoint

    def as_povm(self) -> RankOnePovm:
        return RankOnePovm(
            (self.axis, BlochPoint(-self.axis.n)), np.array([1.0, 1.0])
        )


def solve_alphas(dirs) -> np.ndarray | None:
    """Solve the completeness constraint for 4 directions.

    Returns the unique alphas when the directions are independent and every
    alpha lies in [0, 1]; returns None (infeasible) when the 4x4 system is
    near-singular (R-diagonal ratio above 1e10) or any alpha falls outside
    [0, 1].
    """
    mats = [d.n if isinstance(d, BlochPoint) else np.asarray(d, dtype=float) for d in dirs]
    if len(mats) != 4:
        raise ValidationError("alpha solve needs exactly 4 directions")
    a = np.ones((4, 4))
    for i, n in enumerate(mats):
        a[1:, i] = n
    q, r = np.linalg.qr(a)
    diag = np.abs(np.diag(r))
    if diag.min() == 0.0 or diag.max() / diag.min() > COND_THRESHOLD:
        return None
    alphas = np.linalg.solve(r, q.T @ np.array([2.0, 0.0, 0.0, 0.0]))
    if np.any(alphas < -_ALPHA_SLACK) or np.any(alphas > 1.0 + _ALPHA_SLACK):
        return None
    return np.clip(alphas, 0.0, 1.0)


def measurement_support(
    rho: TwoQubitState, z: Direction, e: RankOnePovm | Pvm
) -> float:
    """Steering-side support sum_i <Z_i, image of alpha_i P(n_i)>."""
    if isinstance(e, Pvm):
        e = e.as_povm()
    if e.n_outcomes != z.n_outcomes:
        raise ValidationError(
            "direction has %d components but measurement has %d outcomes"
            % (z.n_outcomes, e.n_outcomes)
        )
    smap = steering_map(rho)
    total = 0.0
    for part, d, alpha in zip(z.parts, e.dirs, e.alphas):
        image = smap(HermOp(alpha * np.concatenate(([1.0], d.n))))
        total += hs_inner(part, image)
    return total


def pvm_support_closed_form(rho: TwoQubitState, z: Direction) -> float:
    """Exact optimum of the support over all two-outcome projective measurements.

    Writing P_2 = I - P_1 reduces the support to
    <T(Z_1 - Z_2), P_1> + tr T(Z_2) with T the adjoint steering map, and the
    maximum of a linear functional over rank-1 projectors is the top
    eigenvalue, so no search over axes is needed.
    """
    if z.n_outcomes != 2:
        raise ValidationError("closed-form projective support needs a 2-component direction")
    z1, z2 = z.parts
    diff = dual_map(rho, HermOp(z1.coords - z2.coords))
    return eig_max(diff) + dual_map(rho, z2).trace
