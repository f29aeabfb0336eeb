"""Two-qubit states, the Werner family, and the steering map.

A state is stored as its real Pauli correlation tensor
theta[i, j] = Tr[rho (sigma_i (x) sigma_j)], i, j in 0..3, which makes every
downstream computation real arithmetic. The steering map sends an operator X
on side A to the conditional operator Tr_A[rho (X (x) I)] on side B; in Pauli
coordinates it is the linear map x -> theta^T x / 2, and its adjoint (used by
the closed-form projective-measurement support) is x -> theta x / 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, ValidationError
from .pauli import HermOp

_TRACE_TOL = 1e-10
_PSD_TOL = 1e-10

PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


class StateFormatError(FormatError):
    """State file malformed: bad JSON, wrong shapes, unknown keys."""


class StateTraceError(ValidationError):
    """State tensor has theta_00 != 1 (non-unit trace)."""


class StatePsdError(ValidationError):
    """Reconstructed density matrix is not positive semidefinite."""


@dataclass(frozen=True)
class TwoQubitState:
    """A two-qubit density operator as its 4x4 Pauli tensor."""

    theta: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).reshape(4, 4)
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        if abs(theta[0, 0] - 1.0) > _TRACE_TOL:
            raise StateTraceError(
                "state tensor must have unit trace (theta[0,0] = 1), got %r"
                % theta[0, 0]
            )
        eigs = np.linalg.eigvalsh(self.reconstructed_density())
        if eigs.min() < -_PSD_TOL:
            raise StatePsdError(
                "state is not positive semidefinite (min eigenvalue %r)" % eigs.min()
            )

    def reconstructed_density(self) -> np.ndarray:
        """The 4x4 density matrix (1/4) sum_ij theta_ij sigma_i (x) sigma_j."""
        rho = np.zeros((4, 4), dtype=complex)
        for i in range(4):
            for j in range(4):
                rho += self.theta[i, j] * np.kron(PAULI[i], PAULI[j])
        return rho / 4.0

    @property
    def rho_b(self) -> HermOp:
        """Reduced state of side B, coordinates (1, theta[0, 1:])."""
        return HermOp(self.theta[0, :])

    @property
    def rho_a(self) -> HermOp:
        """Reduced state of side A, coordinates (1, theta[1:, 0])."""
        return HermOp(self.theta[:, 0])


@dataclass(frozen=True)
class SteeringMap:
    """The linear map x -> s x with s = theta^T / 2.

    Applied to the coordinates of X it yields the coordinates of
    Tr_A[rho (X (x) I)]; applied to identity coordinates (2,0,0,0) it yields
    the reduced state of side B.
    """

    s: np.ndarray

    def __post_init__(self):
        s = np.array(self.s, dtype=float).reshape(4, 4)
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    def __call__(self, x: HermOp) -> HermOp:
        return HermOp(self.s @ x.coords)


def werner(p: float) -> TwoQubitState:
    """Werner state: p-mixture of the singlet with the maximally mixed state.

    Pauli tensor diag(1, -p, -p, -p).
    """
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError("werner parameter must be in [0, 1], got %r" % p)
    return TwoQubitState(np.diag([1.0, -p, -p, -p]))


def steering_map(rho: TwoQubitState) -> SteeringMap:
    """Steering map of a state, s = theta^T / 2 in Pauli coordinates."""
    return SteeringMap(rho.theta.T / 2.0)


def dual_map(rho: TwoQubitState, z: HermOp) -> HermOp:
    """Adjoint of the steering map: coordinates theta z / 2.

    Satisfies <dual_map(rho, Z), X> = <Z, steering_map(rho)(X)> for all X,
    i.e. it is Tr_B[rho (I (x) Z)].
    """
    return HermOp(rho.theta @ z.coords / 2.0)


def state_from_density(rho4: np.ndarray) -> TwoQubitState:
    """Build a state from a 4x4 density matrix in the |00>,|01>,|10>,|11> basis."""
    rho4 = np.asarray(rho4, dtype=complex)
    if rho4.shape != (4, 4):
        raise StateFormatError("density matrix must be 4x4, got %r" % (rho4.shape,))
    if np.max(np.abs(rho4 - rho4.conj().T)) > 1e-8:
        raise StateFormatError("density matrix is not Hermitian")
    theta = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            val = np.trace(rho4 @ np.kron(PAULI[i], PAULI[j]))
            theta[i, j] = val.real
    return TwoQubitState(theta)


def _as_real_matrix(obj, what: str) -> np.ndarray:
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFormatError("%s must be a 4x4 array of reals" % what) from exc
    if arr.shape != (4, 4):
        raise StateFormatError(
            "%s must be a 4x4 array of reals, got shape %r" % (what, arr.shape)
        )
    return arr


def load_state(path: str) -> TwoQubitState:
    """Load a validated state from a JSON file.

    Schema: an object with exactly one of
      {"pauli_tensor": 4x4 array of reals}
      {"density_matrix": {"re": 4x4 array, "im": 4x4 array}}
    in the |00>,|01>,|10>,|11> basis. Unknown keys are rejected. Trace,
    Hermiticity, and positivity violations are reported distinctly.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFormatError("state file is not valid JSON: %s" % exc) from exc
    if not isinstance(doc, dict):
        raise StateFormatError("state file must contain a JSON object")
    keys = set(doc)
    if keys == {"pauli_tensor"}:
        return TwoQubitState(_as_real_matrix(doc["pauli_tensor"], "pauli_tensor"))
    if keys == {"density_matrix"}:
        dm = doc["density_matrix"]
        if not isinstance(dm, dict) or set(dm) != {"re", "im"}:
            raise StateFormatError(
                'density_matrix must be an object with exactly keys "re" and "im"'
            )
        re = _as_real_matrix(dm["re"], 'density_matrix "re"')
        im = _as_real_matrix(dm["im"], 'density_matrix "im"')
        return state_from_density(re + 1j * im)
    raise StateFormatError(
        'state file must contain exactly one of "pauli_tensor" or '
        '"density_matrix", got keys %s' % sorted(keys)
    )
