"""The gap function via simulated annealing over directions and measurements.

The gap of a state against an LHS ensemble is the minimum over normalized
composite directions Z (and measurements E) of

    F(Z, E) = capacity_support(u, Z) - measurement_support(rho, Z, E).

A negative minimum certifies that some measurement produces an assemblage
outside the ensemble's capacity. Two modes are provided: "pvm2" anneals a
single coordinate 4-vector (the antipodal partner and the optimal projective
measurement are closed form), and "povm4" anneals a 4x4 parameterization of
four-component directions jointly with a rank-1 four-outcome measurement.

Reproducibility: a run is seeded by one master seed; replica k draws its
generator from numpy's SeedSequence(seed).spawn(replicas)[k], and each
trajectory consumes only its own generator inside one compiled kernel, so
fixed seeds give bit-identical trajectories on any worker schedule.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .capacity import (
    DiscreteEnsemble,
    LhsEnsemble,
    UniformEnsemble,
    capacity_support,
    uniform_capacity_pair,
)
from .errors import InfeasibleConfigError, ValidationError
from .measurements import Pvm, RankOnePovm, measurement_support, pvm_support_closed_form, solve_alphas
from .pauli import BlochPoint, Direction, HermOp
from .states import TwoQubitState, steering_map

MODES = ("pvm2", "povm4")
DOF_POVM4 = 20
DOF_PVM2 = 4
DOF_MEASUREMENT_ONLY = 8
DESK_REPLICAS = 32
FULL_REPLICAS = 512

# mixing matrix sending a 4x4 block with zero last column onto four-component
# directions: columns of X @ R_MIX sum to zero and inherit X's Frobenius norm
R_MIX = 0.5 * np.array(
    [
        [1.0, -1.0, -1.0, 1.0],
        [-1.0, -1.0, 1.0, 1.0],
        [-1.0, 1.0, -1.0, 1.0],
        [1.0, 1.0, 1.0, 1.0],
    ]
)
R_MIX.setflags(write=False)


@dataclass(frozen=True)
class ZParam:
    """Four-component direction parameterization Z = X R.

    x is 4x4 with last column identically zero and squared Frobenius norm 2;
    the induced direction satisfies the direction-set constraints
    algebraically (R's rows sum to (0, 0, 0, 2) and R is orthogonal).
    """

    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(4, 4)
        if np.max(np.abs(x[:, 3])) > 1e-12:
            raise ValidationError("last column of the direction block must be zero")
        if abs(np.sum(x * x) - 2.0) > 1e-12:
            raise ValidationError("direction block must have squared Frobenius norm 2")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    def direction(self) -> Direction:
        zmat = self.x @ R_MIX
        return Direction(tuple(HermOp(zmat[:, i]) for i in range(4)))


@dataclass(frozen=True)
class AnnealConfig:
    """Cooling-schedule and replica parameters.

    dof defaults per mode (20 for povm4: 11 effective direction freedoms plus
    8 measurement angles, rounded up; 4 for pvm2: 3 effective direction
    freedoms, rounded up); steps per temperature are
    steps_per_temp_multiplier x dof and the initial temperature is estimated
    from init_temp_samples (default 1000 x dof) random feasible states.
    """

    cool_factor: float = 0.95
    t_final: float = 1e-9
    steps_per_temp_multiplier: int = 100
    dof: int | None = None
    replicas: int = DESK_REPLICAS
    seed: int = 0
    init_temp_samples: int | None = None
    workers: int = 1

    def __post_init__(self):
        if not 0.0 < self.cool_factor < 1.0:
            raise ValidationError("cool_factor must lie strictly between 0 and 1")
        if self.t_final <= 0.0:
            raise ValidationError("t_final must be positive")
        if self.steps_per_temp_multiplier < 1:
            raise ValidationError("steps_per_temp_multiplier must be >= 1")
        if self.replicas < 1:
            raise ValidationError("replicas must be >= 1")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")
        if self.dof is not None and self.dof < 1:
            raise ValidationError("dof must be >= 1")
        if self.init_temp_samples is not None and self.init_temp_samples < 1:
            raise ValidationError("init_temp_samples must be >= 1")

    def resolve(self, default_dof: int) -> tuple[int, int, int]:
        """Concrete (dof, steps_per_temp, init_temp_samples)."""
        dof = self.dof if self.dof is not None else default_dof
        n_t0 = self.init_temp_samples if self.init_temp_samples is not None else 1000 * dof
        return dof, self.steps_per_temp_multiplier * dof, n_t0


@dataclass(frozen=True)
class GapResult:
    """Outcome of a replicated annealing run; gap = min(replica_energies)."""

    gap: float
    best_z: Direction
    best_e: RankOnePovm | Pvm
    replica_energies: tuple[float, ...]
    p: float | None
    mode: str
    config: AnnealConfig
    wall_time: float

    def to_dict(self) -> dict:
        if isinstance(self.best_e, Pvm):
            best_e = {"kind": "pvm", "axis": self.best_e.axis.n.tolist()}
        else:
            best_e = {
                "kind": "rank1_povm",
                "dirs": self.best_e.dir_matrix().tolist(),
                "alphas": self.best_e.alphas.tolist(),
            }
        return {
            "gap": self.gap,
            "best_z": self.best_z.coords_matrix().tolist(),
            "best_e": best_e,
            "replica_energies": list(self.replica_energies),
            "p": self.p,
            "mode": self.mode,
            "config": asdict(self.config),
            "wall_time": self.wall_time,
        }


def werner_parameter(rho: TwoQubitState) -> float | None:
    """The Werner mixing parameter when the tensor has the Werner pattern."""
    theta = rho.theta
    off = theta - np.diag(np.diag(theta))
    if np.max(np.abs(off)) > 1e-12:
        return None
    d = np.diag(theta)
    if abs(d[1] - d[2]) > 1e-12 or abs(d[1] - d[3]) > 1e-12:
        return None
    p = -d[1]
    if not 0.0 <= p <= 1.0:
        return None
    return float(p)


def gap_pvm_analytic(p: float) -> float:
    """Exact Werner-state gap under projective measurements: 1/4 - p/2."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError("werner parameter must be in [0, 1], got %r" % p)
    return 0.25 - 0.5 * p


def _capacity_term(u: LhsEnsemble, z: Direction) -> float:
    if isinstance(u, UniformEnsemble) and z.n_outcomes == 2:
        return uniform_capacity_pair(z)
    return capacity_support(u, z)


def objective(rho: TwoQubitState, u: LhsEnsemble, z: Direction, e) -> float:
    """Energy F(Z, E) = capacity term minus measurement support.

    e may be a RankOnePovm, a Pvm, or a bare sequence of 4 Bloch directions;
    in the last case the completeness weights are solved first and an
    infeasible set yields +inf (infeasibility is a value, not an error).
    For two-component directions against the uniform ensemble the capacity
    term is exact (closed form), matching the pvm2 annealing mode.
    """
    if not isinstance(e, (RankOnePovm, Pvm)):
        dirs = tuple(d if isinstance(d, BlochPoint) else BlochPoint(d) for d in e)
        alphas = solve_alphas(dirs)
        if alphas is None:
            return float("inf")
        e = RankOnePovm(dirs, alphas)
    return _capacity_term(u, z) - measurement_support(rho, z, e)


def _ensemble_arrays(u: LhsEnsemble) -> tuple[np.ndarray, np.ndarray]:
    return (
        np.array(u.affine_coords, dtype=float),
        np.array(u.weights, dtype=float),
    )


def _check_mode(mode: str):
    if mode not in MODES:
        raise ValidationError("mode must be one of %s, got %r" % (MODES, mode))


def anneal_once(
    rho: TwoQubitState,
    u: LhsEnsemble,
    mode: str,
    config: AnnealConfig,
    rng: np.random.Generator,
) -> tuple[float, Direction, RankOnePovm | Pvm]:
    """One cooling trajectory; returns (best energy, best direction, best measurement)."""
    _check_mode(mode)
    if mode == "povm4":
        dof, steps, n_t0 = config.resolve(DOF_POVM4)
        p_aff, w = _ensemble_arrays(u)
        smat = np.array(steering_map(rho).s, dtype=float)
        status, best_f, bx, bdirs, balphas, _t0 = _kernels.anneal_povm4(
            p_aff, w, smat, np.array(R_MIX), config.t_final, config.cool_factor,
            steps, n_t0, rng,
        )
        if status != _kernels.OK:
            raise InfeasibleConfigError(
                "no feasible measurement found while estimating the initial temperature"
            )
        bx *= np.sqrt(2.0 / np.sum(bx * bx))
        zmat = bx @ R_MIX
        z = Direction(tuple(HermOp(zmat[:, i]) for i in range(4)))
        bdirs /= np.linalg.norm(bdirs, axis=1)[:, None]
        e = RankOnePovm(tuple(BlochPoint(row) for row in bdirs), balphas)
        return float(best_f), z, e

    dof, steps, n_t0 = config.resolve(DOF_PVM2)
    closed = isinstance(u, UniformEnsemble)
    if closed:
        p_aff, w = np.zeros((1, 4)), np.ones(1)
    else:
        p_aff, w = _ensemble_arrays(u)
    theta = np.array(rho.theta, dtype=float)
    status, best_f, bxv, _t0 = _kernels.anneal_pvm2(
        theta, p_aff, w, closed, config.t_final, config.cool_factor, steps, n_t0, rng,
    )
    bxv /= np.linalg.norm(bxv)
    z = Direction((HermOp(bxv), HermOp(-bxv)))
    tvec = (theta @ bxv)[1:]
    tnorm = np.linalg.norm(tvec)
    axis = tvec / tnorm if tnorm > 1e-12 else np.array([0.0, 0.0, 1.0])
    return float(best_f), z, Pvm(BlochPoint(axis))


def _replica_run(args):
    rho, u, mode, config, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    return anneal_once(rho, u, mode, config, rng)


def gap(
    rho: TwoQubitState,
    u: LhsEnsemble,
    mode: str,
    config: AnnealConfig | None = None,
) -> GapResult:
    """Replicated annealing estimate of the gap.

    Runs config.replicas independent trajectories (seeded by the splitting
    rule in the module docstring, optionally across worker processes) and
    returns the minimum with all replica energies.
    """
    _check_mode(mode)
    if config is None:
        config = AnnealConfig()
    start = time.perf_counter()
    children = np.random.SeedSequence(config.seed).spawn(config.replicas)
    payloads = [(rho, u, mode, config, child) for child in children]
    if config.workers > 1 and config.replicas > 1:
        with ProcessPoolExecutor(max_workers=min(config.workers, config.replicas)) as pool:
            outcomes = list(pool.map(_replica_run, payloads))
    else:
        outcomes = [_replica_run(p) for p in payloads]
    energies = tuple(float(o[0]) for o in outcomes)
    best_idx = int(np.argmin(energies))
    _, best_z, best_e = outcomes[best_idx]
    return GapResult(
        gap=energies[best_idx],
        best_z=best_z,
        best_e=best_e,
        replica_energies=energies,
        p=werner_parameter(rho),
        mode=mode,
        config=config,
        wall_time=time.perf_counter() - start,
    )


def check_direction(
    rho: TwoQubitState,
    u: LhsEnsemble,
    z: Direction,
    mode: str = "pvm2",
    config: AnnealConfig | None = None,
) -> float:
    """Margin of the capacity inequality in one fixed direction.

    A negative margin certifies that some measurement's assemblage leaves the
    ensemble capacity along z (a steering witness). For two-component
    directions the measurement optimum is closed form (and so is the uniform
    capacity term, making the margin exact); four-component directions anneal
    the measurement only, with the direction held fixed.
    """
    _check_mode(mode)
    if mode == "pvm2":
        if z.n_outcomes != 2:
            raise ValidationError("pvm2 margins need a 2-component direction")
        return _capacity_term(u, z) - pvm_support_closed_form(rho, z)
    if z.n_outcomes != 4:
        raise ValidationError("povm4 margins need a 4-component direction")
    if config is None:
        config = AnnealConfig(replicas=8)
    cap = capacity_support(u, z)
    dof, steps, n_t0 = config.resolve(DOF_MEASUREMENT_ONLY)
    smat = np.array(steering_map(rho).s, dtype=float)
    zmat = np.array(z.coords_matrix().T, dtype=float)
    best = -np.inf
    for child in np.random.SeedSequence(config.seed).spawn(config.replicas):
        rng = np.random.default_rng(child)
        status, meas, _dirs, _alphas, _t0 = _kernels.anneal_measurement_only(
            zmat, smat, config.t_final, config.cool_factor, steps, n_t0, rng,
        )
        if status != _kernels.OK:
            raise InfeasibleConfigError(
                "no feasible measurement found while estimating the initial temperature"
            )
        best = max(best, meas)
    return cap - best
