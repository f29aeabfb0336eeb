"""Numerical integration over the Bloch sphere with the normalized measure.

Weights always sum to 1 (probability convention), so ensemble averages and
capacity integrals are plain weighted sums with no surface-area factor.
The default rule is a Gauss-Legendre grid in cos(theta) crossed with a
uniform azimuthal grid; externally tabulated node files ("x y z w" rows,
either unit-sum or 4*pi-sum weight convention) can be dropped in.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from .errors import FormatError, ValidationError

_WEIGHT_SUM_TOL = 1e-6
_NODE_NORM_TOL = 1e-6


def _force_unit_sum(w: np.ndarray) -> np.ndarray:
    # adjust one weight so the float sum is exactly 1.0; simple repeated
    # nudging can cycle among rounding quanta, but the sum is monotone in any
    # single weight, so bisection over that weight always lands on the exact
    # value (trying another slot covers rare rounding-aliasing misses)
    if float(np.sum(w)) == 1.0:
        return w
    preferred = [int(np.argmin(w)), int(np.argmax(w))]
    for target in preferred + [j for j in range(len(w)) if j not in preferred]:
        if _bisect_slot_to_unit_sum(w, target):
            return w
    raise ValidationError("could not normalize quadrature weights to exact unit sum")


def _bisect_slot_to_unit_sum(w: np.ndarray, j: int) -> bool:
    base = float(w[j])

    def total(t: float) -> float:
        w[j] = t
        return float(np.sum(w))

    residual = 1.0 - total(base)
    if residual == 0.0:
        return True
    step = abs(residual) + np.spacing(1.0)
    lo, hi = base, base
    for _ in range(64):  # bracket the exact-sum point
        if residual > 0.0:
            hi = base + step
            val = total(hi)
            if val == 1.0:
                return True
            if val > 1.0:
                break
        else:
            lo = base - step
            if lo <= 0.0:
                w[j] = base
                return False
            val = total(lo)
            if val == 1.0:
                return True
            if val < 1.0:
                break
        step *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        val = total(mid)
        if val == 1.0:
            return True
        if val < 1.0:
            lo = mid
        else:
            hi = mid
    w[j] = base
    return False


@dataclass(frozen=True)
class Quadrature:
    """Unit nodes on the sphere with positive weights summing to 1."""

    nodes: np.ndarray
    weights: np.ndarray
    rule_id: str = "custom"

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 3 or nodes.shape[0] == 0:
            raise ValidationError("nodes must be a nonempty (N, 3) array")
        if weights.shape != (nodes.shape[0],):
            raise ValidationError("weights must match the node count")
        if np.any(weights <= 0.0):
            raise ValidationError("all quadrature weights must be positive")
        if abs(np.sum(weights) - 1.0) > 1e-12:
            raise ValidationError("quadrature weights must sum to 1")
        norms = np.linalg.norm(nodes, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-9:
            raise ValidationError("quadrature nodes must be unit vectors")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.nodes.shape[0]

    @cached_property
    def affine_coords(self) -> np.ndarray:
        """Node projector coordinates (1, n) as an (N, 4) array."""
        coords = np.concatenate(
            [np.ones((len(self), 1)), self.nodes], axis=1
        )
        coords.setflags(write=False)
        return coords


def product_rule(n_polar: int, n_azimuthal: int) -> Quadrature:
    """Gauss-Legendre nodes in cos(theta) crossed with a uniform azimuthal grid.

    Integrates spherical polynomials of degree <= 2*n_polar - 1 in cos(theta)
    exactly, and azimuthal harmonics e^{ik phi} exactly for |k| < n_azimuthal.
    """
    if n_polar < 2 or n_azimuthal < 4:
        raise ValidationError(
            "degenerate rule sizes: need n_polar >= 2 and n_azimuthal >= 4"
        )
    t, wt = roots_legendre(n_polar)
    phi = 2.0 * np.pi * np.arange(n_azimuthal) / n_azimuthal
    ct = np.repeat(t, n_azimuthal)
    st = np.sqrt(np.maximum(0.0, 1.0 - ct * ct))
    nodes = np.stack(
        [st * np.tile(np.cos(phi), n_polar), st * np.tile(np.sin(phi), n_polar), ct],
        axis=1,
    )
    w = np.repeat(wt, n_azimuthal)
    w /= np.sum(w)
    return Quadrature(nodes, _force_unit_sum(w), "product:%dx%d" % (n_polar, n_azimuthal))


def load_lebedev(path: str) -> Quadrature:
    """Load a tabulated spherical rule from rows "x y z w".

    Blank lines and lines starting with "#" are skipped. Node vectors must be
    unit length within 1e-6 (renormalized). Weights must sum to either 1 or
    4*pi within relative 1e-6 (both conventions occur in published tables)
    and are renormalized to 1.
    """
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
        raise FormatError("%s: no quadrature rows found" % path)
    arr = np.array(rows)
    nodes, w = arr[:, :3], arr[:, 3].copy()
    norms = np.linalg.norm(nodes, axis=1)
    if np.max(np.abs(norms - 1.0)) > _NODE_NORM_TOL:
        raise ValidationError(
            "%s: node vectors are not unit length (worst deviation %r)"
            % (path, np.max(np.abs(norms - 1.0)))
        )
    if np.any(w <= 0.0):
        raise ValidationError("%s: weights must be positive" % path)
    total = np.sum(w)
    if abs(total - 1.0) > _WEIGHT_SUM_TOL and abs(total / (4.0 * np.pi) - 1.0) > _WEIGHT_SUM_TOL:
        raise ValidationError(
            "%s: weights sum to %r, expected 1 or 4*pi" % (path, total)
        )
    w /= total
    return Quadrature(nodes / norms[:, None], _force_unit_sum(w), "lebedev:%s" % path)


def integrate(q: Quadrature, f: Callable[[np.ndarray], float]) -> float:
    """Weighted node sum sum_k w_k f(n_k); f takes a unit 3-vector."""
    values = np.fromiter((f(node) for node in q.nodes), dtype=float, count=len(q))
    return float(np.dot(q.weights, values))


def rule_from_id(rule_id: str) -> Quadrature:
    """Build a rule from its identifier.

    "product:L" expands to product_rule(L, 2L); "product:LxM" sets both sizes;
    "lebedev:<path>" loads a node file.
    """
    kind, sep, rest = rule_id.partition(":")
    if not sep:
        raise ValidationError(
            "quadrature id must look like product:L, product:LxM, or lebedev:<path>"
        )
    if kind == "product":
        sizes = rest.lower().split("x")
        try:
            if len(sizes) == 1:
                n_polar = int(sizes[0])
                n_azimuthal = 2 * n_polar
            elif len(sizes) == 2:
                n_polar, n_azimuthal = int(sizes[0]), int(sizes[1])
            else:
                raise ValueError
        except ValueError:
            raise ValidationError(
                "bad product rule id %r, expected product:L or product:LxM" % rule_id
            ) from None
        return product_rule(n_polar, n_azimuthal)
    if kind == "lebedev":
        if not rest:
            raise ValidationError("lebedev rule id needs a path: lebedev:<path>")
        return load_lebedev(rest)
    raise ValidationError("unknown quadrature kind %r" % kind)
