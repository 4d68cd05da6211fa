"""Synchronous and asynchronous iteration of P(k+1) = D +/- F P(k).

A node that is idle in an iteration keeps its previous value exactly; an
active node applies the full update.  With all nodes active this is the
synchronous iteration.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .activation import ScheduleState, iter_activations
from .errors import DimensionMismatch, NonFiniteState, NotContractive
from .linalg import as_vector, certify_contractive, inf_norm, solve_linear
from .matrix_gen import SignConvention, SystemSpec
from .rng import make_rng

DIVERGENCE_LIMIT = 1e100


class Reference(str, enum.Enum):
    FIXED_POINT = "FIXED_POINT"
    SUCCESSIVE = "SUCCESSIVE"


@dataclass(frozen=True)
class ConvergenceCriterion:
    """Stop once the error is <= ``tolerance`` (infinity norm).

    FIXED_POINT measures ||P(k) - P*||.  SUCCESSIVE measures the change a
    full synchronous update would make, ||(D +/- F P(k)) - P(k)||; under
    FULL_SYNC that is exactly the next successive difference, and unlike
    ||P(k) - P(k-1)|| it cannot be fooled by an iteration in which few or
    no nodes happened to update.
    """

    tolerance: float
    max_iterations: int
    reference: Reference = Reference.FIXED_POINT

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        object.__setattr__(self, "reference", Reference(self.reference))


@dataclass
class TrajectoryRecord:
    iterations: int
    initial_state: np.ndarray
    state_iterations: list[int]  # iteration index of each entry in ``states``
    states: list[np.ndarray]
    masks: np.ndarray  # (iterations, n) bool, row k-1 is the mask applied to reach P(k)
    error_norms: np.ndarray  # error of P(k) for k = 1..iterations
    converged_at: int | None = None
    fixed_point: np.ndarray | None = field(default=None, repr=False)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1] if self.states else self.initial_state


def compute_fixed_point(spec: SystemSpec) -> np.ndarray:
    """Solve (I - F) P = D (PLUS) or (I + F) P = D (MINUS).

    Raises NotContractive unless rho(F) < 1 is certified.
    """
    cert = certify_contractive(spec.F)
    if not cert.certified_below_one:
        raise NotContractive(f"cannot certify rho(F) < 1 (Gelfand bound {cert.rho:.6g})")
    M = np.eye(spec.n) - spec.sign_convention.factor * spec.F
    return solve_linear(M, spec.D)


def sync_step(spec: SystemSpec, P: np.ndarray) -> np.ndarray:
    return spec.D + spec.sign_convention.factor * (spec.F @ P)


def step(spec: SystemSpec, P, mask) -> np.ndarray:
    """One asynchronous update: active nodes update, idle nodes keep P_i."""
    P = np.asarray(P, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if P.shape != (spec.n,) or mask.shape != (spec.n,):
        raise DimensionMismatch(
            f"system has n = {spec.n}, got state {P.shape} and mask {mask.shape}"
        )
    return np.where(mask, sync_step(spec, P), P)


def run_trajectory(
    spec: SystemSpec,
    P0,
    schedule: ScheduleState,
    criterion: ConvergenceCriterion,
    record_stride: int = 1,
) -> TrajectoryRecord:
    """Iterate ``step`` with masks drawn from ``schedule`` until convergence
    or ``criterion.max_iterations``.

    Errors are recorded every iteration; states every ``record_stride``
    iterations plus the final one.
    """
    if record_stride < 1:
        raise ValueError("record_stride must be >= 1")
    P = as_vector(P0, spec.n).copy()
    if schedule.policy.n != spec.n:
        raise DimensionMismatch(f"schedule has n = {schedule.policy.n}, system has n = {spec.n}")

    P_star = None
    if criterion.reference is Reference.FIXED_POINT:
        P_star = compute_fixed_point(spec)

    kmax = criterion.max_iterations
    masks = np.empty((kmax, spec.n), dtype=bool)
    errors = np.empty(kmax)
    state_iterations: list[int] = []
    states: list[np.ndarray] = []
    converged_at = None
    stream = iter_activations(schedule)

    k = 0
    while k < kmax:
        mask = next(stream)
        P = step(spec, P, mask)
        masks[k] = mask
        k += 1
        if not np.all(np.abs(P) <= DIVERGENCE_LIMIT):
            raise NonFiniteState(f"state exceeded {DIVERGENCE_LIMIT:g} at iteration {k}")
        if P_star is not None:
            err = inf_norm(P - P_star)
        else:
            err = inf_norm(sync_step(spec, P) - P)
        errors[k - 1] = err
        if k % record_stride == 0:
            state_iterations.append(k)
            states.append(P.copy())
        if err <= criterion.tolerance:
            converged_at = k
            break

    if not state_iterations or state_iterations[-1] != k:
        state_iterations.append(k)
        states.append(P.copy())
    return TrajectoryRecord(
        iterations=k,
        initial_state=as_vector(P0, spec.n).copy(),
        state_iterations=state_iterations,
        states=states,
        masks=masks[:k],
        error_norms=errors[:k],
        converged_at=converged_at,
        fixed_point=P_star,
    )


def perturb_matrix(spec: SystemSpec, epsilon: float, seed: int = 0) -> SystemSpec:
    """Model a constant estimation error: F_hat = F + E with E uniform on
    [-epsilon, epsilon], zero on the diagonal if F's diagonal is zero.

    The result is not certified; callers must check rho(F_hat) < 1.
    """
    if not epsilon >= 0:
        raise ValueError("epsilon must be >= 0")
    if epsilon == 0:
        return SystemSpec(spec.F.copy(), spec.D.copy(), spec.sign_convention)
    E = make_rng(seed).uniform(-epsilon, epsilon, size=spec.F.shape)
    if not np.any(np.diag(spec.F)):
        np.fill_diagonal(E, 0.0)
    return SystemSpec(spec.F + E, spec.D.copy(), spec.sign_convention)


__all__ = [
    "ConvergenceCriterion",
    "Reference",
    "SignConvention",
    "TrajectoryRecord",
    "compute_fixed_point",
    "perturb_matrix",
    "run_trajectory",
    "step",
    "sync_step",
]
