"""Capacity support function against brute-force and closed-form oracles."""

from __future__ import annotations

import numpy as np
import pytest

from steergap import (
    BlochPoint,
    DiscreteEnsemble,
    Direction,
    FormatError,
    UniformEnsemble,
    ValidationError,
    capacity_support,
    ensemble_barycenter,
    greedy_response_value,
    hs_inner,
    load_discrete,
    minimal_requirement_residual,
    normalize_direction,
    product_rule,
    projector,
    response_oracle,
    uniform_capacity_pair,
    werner,
)


def naive_capacity(u, z: Direction) -> float:
    # slow per-node oracle built from scalar primitives only
    total = 0.0
    for point, weight in zip(u.points, u.weights):
        proj = projector(BlochPoint(point))
        total += weight * max(hs_inner(part, proj) for part in z.parts)
    return total


def random_direction(rng, k: int) -> Direction:
    return normalize_direction(rng.normal(size=(k, 4)))


def random_discrete(rng, n_points: int) -> DiscreteEnsemble:
    pts = rng.normal(size=(n_points, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    return DiscreteEnsemble(pts, rng.dirichlet(np.ones(n_points)))


def test_capacity_matches_naive_oracle():
    rng = np.random.default_rng(30)
    uq = UniformEnsemble(product_rule(6, 8))
    for trial in range(20):
        z = random_direction(rng, 2 + trial % 3)
        u = uq if trial % 2 == 0 else random_discrete(rng, 2 + int(rng.integers(1, 15)))
        assert abs(capacity_support(u, z) - naive_capacity(u, z)) <= 1e-14


def test_uniform_pair_closed_form_anchors():
    # axis-aligned balanced direction: capacity is exactly 1/4
    z = Direction(((0, 0, 0, 1), (0, 0, 0, -1)))
    assert uniform_capacity_pair(z) == 0.25
    # mixed scalar/vector split on the unit shell: value 1/(4 b)
    z = Direction(((0.6, 0, 0, 0.8), (-0.6, 0, 0, -0.8)))
    assert abs(uniform_capacity_pair(z) - 0.3125) < 1e-15
    # scalar-dominant branch: value |a|/2
    b = np.sqrt(1.0 - 0.81)
    z = Direction(((0.9, 0, 0, b), (-0.9, 0, 0, -b)))
    assert abs(uniform_capacity_pair(z) - 0.45) < 1e-15


def test_uniform_pair_matches_fine_quadrature():
    rng = np.random.default_rng(31)
    u = UniformEnsemble(product_rule(256, 512))
    for _ in range(8):
        v = rng.normal(size=4)
        z = normalize_direction([v, -v])
        assert abs(uniform_capacity_pair(z) - capacity_support(u, z)) <= 1e-6


def test_uniform_pair_rejects_other_sizes():
    z = normalize_direction(np.random.default_rng(0).normal(size=(3, 4)))
    with pytest.raises(ValidationError):
        uniform_capacity_pair(z)


def test_barycenter_and_residual_uniform():
    u = UniformEnsemble(product_rule(32, 64))
    bary = ensemble_barycenter(u)
    assert abs(bary.coords[0] - 1.0) <= 1e-12
    assert np.max(np.abs(bary.spatial)) <= 1e-12
    for p in (0.0, 0.5, 1.0):
        assert minimal_requirement_residual(u, werner(p)) <= 1e-12


def test_residual_detects_violation():
    # a single point at the pole misses the maximally mixed marginal by 1/sqrt(2)
    u = DiscreteEnsemble(np.array([[0.0, 0.0, 1.0]]), np.array([1.0]))
    residual = minimal_requirement_residual(u, werner(0.6))
    assert abs(residual - 1.0 / np.sqrt(2.0)) <= 1e-12


def test_antipodal_pair_satisfies_requirement():
    u = DiscreteEnsemble(np.array([[0, 0, 1.0], [0, 0, -1.0]]), np.array([0.5, 0.5]))
    assert minimal_requirement_residual(u, werner(0.3)) <= 1e-15


def test_greedy_equals_capacity():
    rng = np.random.default_rng(32)
    for trial in range(30):
        u = random_discrete(rng, 2 + int(rng.integers(1, 19)))
        z = random_direction(rng, 2 + trial % 3)
        assert abs(greedy_response_value(u, z) - capacity_support(u, z)) <= 1e-12


def test_response_oracle_never_beats_capacity():
    rng = np.random.default_rng(33)
    for trial in range(15):
        u = random_discrete(rng, 2 + int(rng.integers(1, 12)))
        z = random_direction(rng, 2 + trial % 3)
        cap = capacity_support(u, z)
        best = response_oracle(u, z, trials=40, rng=rng)
        assert best <= cap + 1e-12
        assert best >= cap - 1e-12


def test_response_oracle_needs_discrete_ensemble():
    u = UniformEnsemble(product_rule(4, 4))
    z = Direction(((0, 0, 0, 1), (0, 0, 0, -1)))
    with pytest.raises(ValidationError):
        response_oracle(u, z, trials=1)


def test_discrete_ensemble_validation():
    good_pts = np.array([[0, 0, 1.0], [1.0, 0, 0]])
    with pytest.raises(ValidationError):
        DiscreteEnsemble(good_pts, np.array([0.5, 0.4]))
    with pytest.raises(ValidationError):
        DiscreteEnsemble(good_pts, np.array([1.5, -0.5]))
    with pytest.raises(ValidationError):
        DiscreteEnsemble(np.array([[0, 0, 0.9], [0, 0, -1.0]]), np.array([0.5, 0.5]))
    with pytest.raises(ValidationError):
        DiscreteEnsemble(np.zeros((0, 3)), np.zeros(0))


def test_load_discrete(tmp_path):
    path = tmp_path / "ensemble.txt"
    path.write_text(
        "# two-point ensemble\n"
        "0 0 1 0.5000001\n"
        "\n"
        "0 0 -1 0.5\n"
    )
    u = load_discrete(str(path))
    assert u.points.shape == (2, 3)
    assert float(np.sum(u.weights)) == 1.0

    bad_sum = tmp_path / "badsum.txt"
    bad_sum.write_text("0 0 1 0.5\n0 0 -1 0.3\n")
    with pytest.raises(ValidationError):
        load_discrete(str(bad_sum))

    bad_row = tmp_path / "badrow.txt"
    bad_row.write_text("0 0 1\n")
    with pytest.raises(FormatError):
        load_discrete(str(bad_row))

    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing\n")
    with pytest.raises(FormatError):
        load_discrete(str(empty))

    bad_norm = tmp_path / "badnorm.txt"
    bad_norm.write_text("0 0 0.7 1.0\n")
    with pytest.raises(ValidationError):
        load_discrete(str(bad_norm))
