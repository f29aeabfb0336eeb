"""Two-qubit states and the steering map against explicit 4x4 density matrices."""

from __future__ import annotations

import json

import numpy as np
import pytest

from steergap import (
    HermOp,
    TwoQubitState,
    ValidationError,
    dual_map,
    hs_inner,
    load_state,
    state_from_density,
    steering_map,
    werner,
)
from steergap.states import StateFormatError, StatePsdError, StateTraceError

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def op_matrix(coords) -> np.ndarray:
    return 0.5 * sum(c * s for c, s in zip(np.asarray(coords, dtype=float), SIGMA))


def theta_oracle(rho4: np.ndarray) -> np.ndarray:
    out = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            out[i, j] = np.trace(rho4 @ np.kron(SIGMA[i], SIGMA[j])).real
    return out


def partial_trace_a(rho4: np.ndarray) -> np.ndarray:
    return np.einsum("abac->bc", rho4.reshape(2, 2, 2, 2))


def partial_trace_b(rho4: np.ndarray) -> np.ndarray:
    return np.einsum("abcb->ac", rho4.reshape(2, 2, 2, 2))


def random_density(rng) -> np.ndarray:
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def test_werner_tensor_is_diagonal():
    for p in (0.0, 0.3, 0.5, 1.0):
        assert np.array_equal(werner(p).theta, np.diag([1.0, -p, -p, -p]))
    with pytest.raises(ValidationError):
        werner(-0.1)
    with pytest.raises(ValidationError):
        werner(1.1)


def test_werner_extremes_reconstruct():
    # p=1 is the singlet projector, p=0 the maximally mixed state
    psi = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2.0)
    singlet = np.outer(psi, psi.conj())
    assert np.max(np.abs(werner(1.0).reconstructed_density() - singlet)) < 1e-12
    assert np.max(np.abs(werner(0.0).reconstructed_density() - np.eye(4) / 4.0)) < 1e-12


def test_density_round_trip_and_marginals():
    rng = np.random.default_rng(10)
    for _ in range(25):
        rho4 = random_density(rng)
        state = state_from_density(rho4)
        assert np.max(np.abs(state.theta - theta_oracle(rho4))) < 1e-12
        assert np.max(np.abs(state.reconstructed_density() - rho4)) < 1e-12
        assert np.max(np.abs(op_matrix(state.rho_b.coords) - partial_trace_a(rho4))) < 1e-12
        assert np.max(np.abs(op_matrix(state.rho_a.coords) - partial_trace_b(rho4))) < 1e-12


def test_state_from_density_rejects_bad_input():
    with pytest.raises(StateFormatError):
        state_from_density(np.eye(3))
    bad = np.eye(4, dtype=complex) / 4.0
    bad[0, 1] = 0.5
    with pytest.raises(StateFormatError):
        state_from_density(bad)


def test_trace_and_psd_validation():
    with pytest.raises(StateTraceError):
        TwoQubitState(np.diag([1.0 + 1e-6, 0.0, 0.0, 0.0]))
    with pytest.raises(StatePsdError):
        TwoQubitState(np.diag([1.0, -1.2, -1.2, -1.2]))
    # both are validation errors for exit-code purposes
    assert issubclass(StateTraceError, ValidationError)
    assert issubclass(StatePsdError, ValidationError)


def test_steering_map_matches_partial_trace():
    rng = np.random.default_rng(11)
    for _ in range(25):
        rho4 = random_density(rng)
        state = state_from_density(rho4)
        smap = steering_map(state)
        x = rng.normal(size=4)
        image = smap(HermOp(x))
        oracle = partial_trace_a((np.kron(op_matrix(x), np.eye(2))) @ rho4)
        assert np.max(np.abs(op_matrix(image.coords) - oracle)) < 1e-12


def test_steering_map_of_identity_is_b_marginal():
    rng = np.random.default_rng(12)
    for _ in range(10):
        state = state_from_density(random_density(rng))
        image = steering_map(state)(HermOp((2.0, 0.0, 0.0, 0.0)))
        assert np.max(np.abs(image.coords - state.rho_b.coords)) < 1e-12


def test_dual_map_matches_partial_trace():
    rng = np.random.default_rng(13)
    for _ in range(25):
        rho4 = random_density(rng)
        state = state_from_density(rho4)
        z = rng.normal(size=4)
        image = dual_map(state, HermOp(z))
        oracle = partial_trace_b(rho4 @ np.kron(np.eye(2), op_matrix(z)))
        assert np.max(np.abs(op_matrix(image.coords) - oracle)) < 1e-12


def test_dual_map_is_adjoint_of_steering_map():
    rng = np.random.default_rng(14)
    for _ in range(50):
        state = state_from_density(random_density(rng))
        smap = steering_map(state)
        x = HermOp(rng.normal(size=4))
        z = HermOp(rng.normal(size=4))
        lhs = hs_inner(z, smap(x))
        rhs = hs_inner(dual_map(state, z), x)
        assert abs(lhs - rhs) <= 1e-12


def test_load_state_pauli_tensor(tmp_path):
    path = tmp_path / "state.json"
    path.write_text(json.dumps({"pauli_tensor": werner(0.5).theta.tolist()}))
    assert np.array_equal(load_state(str(path)).theta, werner(0.5).theta)


def test_load_state_density_matrix(tmp_path):
    rho4 = werner(0.3).reconstructed_density()
    path = tmp_path / "state.json"
    doc = {"density_matrix": {"re": rho4.real.tolist(), "im": rho4.imag.tolist()}}
    path.write_text(json.dumps(doc))
    assert np.max(np.abs(load_state(str(path)).theta - werner(0.3).theta)) < 1e-12


def test_load_state_rejects_malformed(tmp_path):
    cases = [
        "not json at all",
        json.dumps([1, 2, 3]),
        json.dumps({"pauli_tensor": [[1, 0], [0, 1]]}),
        json.dumps({"pauli_tensor": werner(0.5).theta.tolist(), "extra": 1}),
        json.dumps({"density_matrix": {"re": np.eye(4).tolist()}}),
        json.dumps({"something_else": 0}),
    ]
    for i, text in enumerate(cases):
        path = tmp_path / ("bad%d.json" % i)
        path.write_text(text)
        with pytest.raises(StateFormatError):
            load_state(str(path))
    with pytest.raises(OSError):
        load_state(str(tmp_path / "missing.json"))
