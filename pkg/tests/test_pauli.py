"""Pauli-coordinate algebra checked against explicit 2x2 complex matrices."""

from __future__ import annotations

import numpy as np
import pytest

from steergap import (
    BlochPoint,
    Direction,
    HermOp,
    ValidationError,
    eig_max,
    eig_min,
    hs_inner,
    is_psd,
    normalize_direction,
    projector,
)

# independent matrix-side oracle: the coordinate convention is
# X = (1/2) sum_i x_i sigma_i
SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def to_matrix(coords) -> np.ndarray:
    return 0.5 * sum(c * s for c, s in zip(np.asarray(coords, dtype=float), SIGMA))


def random_unit(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def test_trace_and_spatial_views():
    rng = np.random.default_rng(1)
    for _ in range(50):
        coords = rng.normal(size=4)
        op = HermOp(coords)
        assert op.trace == coords[0]
        assert np.array_equal(op.spatial, coords[1:])
        assert abs(op.trace - np.trace(to_matrix(coords)).real) < 1e-12


def test_hs_inner_matches_matrix_trace():
    rng = np.random.default_rng(2)
    for _ in range(50):
        x = rng.normal(size=4)
        y = rng.normal(size=4)
        oracle = np.trace(to_matrix(x) @ to_matrix(y)).real
        assert abs(hs_inner(HermOp(x), HermOp(y)) - oracle) < 1e-12


def test_projector_is_rank_one_projector():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = random_unit(rng)
        p = projector(BlochPoint(n))
        assert np.array_equal(p.coords, np.concatenate(([1.0], n)))
        mat = to_matrix(p.coords)
        assert np.max(np.abs(mat @ mat - mat)) < 1e-12
        assert abs(np.trace(mat).real - 1.0) < 1e-12
        eigs = np.linalg.eigvalsh(mat)
        assert np.allclose(eigs, [0.0, 1.0], atol=1e-12)


def test_bloch_point_must_be_unit():
    with pytest.raises(ValidationError):
        BlochPoint((0.5, 0.0, 0.0))
    with pytest.raises(ValidationError):
        BlochPoint((1.0, 1e-5, 0.0))


def test_eigenvalues_match_eigvalsh():
    rng = np.random.default_rng(4)
    for _ in range(50):
        coords = rng.normal(size=4) * rng.uniform(0.1, 3.0)
        lo, hi = np.linalg.eigvalsh(to_matrix(coords))
        op = HermOp(coords)
        assert abs(eig_max(op) - hi) < 1e-12
        assert abs(eig_min(op) - lo) < 1e-12


def test_eigenvalue_anchors():
    assert eig_max(HermOp((1, 0, 0, 1))) == 1.0
    assert eig_min(HermOp((1, 0, 0, 1))) == 0.0
    assert eig_max(HermOp((0, 0, 0, 2))) == 1.0
    assert eig_min(HermOp((0, 0, 0, 2))) == -1.0


def test_is_psd_matches_spectrum():
    rng = np.random.default_rng(5)
    for _ in range(50):
        v = rng.normal(size=3)
        vn = np.linalg.norm(v)
        assert is_psd(HermOp(np.concatenate(([vn + 0.1], v))))
        assert not is_psd(HermOp(np.concatenate(([vn - 0.1], v))))
        assert not is_psd(HermOp(np.concatenate(([-0.1], 0.0 * v))))
    # rank-1 boundary case is exactly PSD in coordinate arithmetic
    assert is_psd(HermOp((1, 1, 0, 0)))


def test_is_psd_tolerance():
    assert not is_psd(HermOp((1.0, 0.0, 0.0, 1.0 + 1e-6)))
    assert is_psd(HermOp((1.0, 0.0, 0.0, 1.0 + 1e-6)), tol=1e-5)


def test_direction_constructor_validates():
    good = Direction(((0, 0, 0, 1), (0, 0, 0, -1)))
    assert good.n_outcomes == 2
    assert good.coords_matrix().shape == (2, 4)
    assert np.array_equal(good.coords_matrix()[0], [0, 0, 0, 1])
    with pytest.raises(ValidationError):
        Direction(((0, 0, 0, 1), (0, 0, 0, -0.5)))
    with pytest.raises(ValidationError):
        Direction(((0, 0, 0, 2), (0, 0, 0, -2)))
    with pytest.raises(ValidationError):
        Direction(((0, 0, 0, 1),))


def test_normalize_direction_anchor():
    z = normalize_direction([(1, 0, 0, 0), (0, 0, 0, 0)])
    assert np.allclose(z.coords_matrix(), [[1, 0, 0, 0], [-1, 0, 0, 0]], atol=1e-15)


def test_normalize_direction_properties():
    rng = np.random.default_rng(6)
    for trial in range(60):
        k = 2 + trial % 3
        rows = rng.normal(size=(k, 4))
        z = normalize_direction(rows)
        mat = z.coords_matrix()
        assert np.max(np.abs(mat.sum(axis=0))) <= 1e-12
        assert abs(0.5 * np.sum(mat * mat) - 1.0) <= 1e-12
        again = normalize_direction(mat)
        assert np.max(np.abs(again.coords_matrix() - mat)) <= 1e-14


def test_normalize_direction_shift_quotient():
    # adding a common offset to every component never changes the result
    rng = np.random.default_rng(7)
    for _ in range(20):
        rows = rng.normal(size=(3, 4))
        shift = rng.normal(size=4)
        a = normalize_direction(rows).coords_matrix()
        b = normalize_direction(rows + shift).coords_matrix()
        assert np.max(np.abs(a - b)) <= 1e-12


def test_normalize_direction_rejects_degenerate():
    with pytest.raises(ValidationError):
        normalize_direction([(1, 2, 3, 4), (1, 2, 3, 4)])
    with pytest.raises(ValidationError):
        normalize_direction([(1, 2, 3, 4)])
