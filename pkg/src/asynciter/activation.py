"""Binary diagonal activation patterns A(k) and window coverage checks.

An activation mask is a boolean vector of length n; ``mask[i]`` is True
when node i updates at that iteration.  Windows of length T are the T
consecutive iterations {k-T+1, ..., k}.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

import numpy as np

from .errors import LengthMismatch
from .rng import check_seed, make_rng

NEVER = -1  # last_update sentinel: the node has not updated yet


class ScheduleKind(str, enum.Enum):
    FULL_SYNC = "FULL_SYNC"
    BERNOULLI = "BERNOULLI"
    ROUND_ROBIN = "ROUND_ROBIN"
    BOUNDED_DELAY_REPAIR = "BOUNDED_DELAY_REPAIR"


@dataclass(frozen=True)
class SchedulePolicy:
    kind: ScheduleKind
    n: int
    p_update: tuple[float, ...] | None = None
    T: int | None = None
    seed: int = 0

    def __post_init__(self):
        kind = ScheduleKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.n < 1:
            raise ValueError("n must be >= 1")
        check_seed(self.seed)
        if kind in (ScheduleKind.BERNOULLI, ScheduleKind.BOUNDED_DELAY_REPAIR):
            if self.p_update is None:
                raise ValueError(f"{kind.value} needs p_update")
            p = tuple(float(v) for v in self.p_update)
            if len(p) != self.n:
                raise ValueError(f"p_update has length {len(p)}, expected {self.n}")
            for i, v in enumerate(p):
                if not 0.0 < v <= 1.0:
                    raise ValueError(f"p_update[{i}] = {v} is not in (0, 1]")
            object.__setattr__(self, "p_update", p)
        if kind is ScheduleKind.BOUNDED_DELAY_REPAIR and (self.T is None or self.T < 1):
            raise ValueError("BOUNDED_DELAY_REPAIR needs T >= 1")

    @property
    def gamma(self) -> float:
        """Smallest per-node update probability (pre-repair)."""
        if self.kind is ScheduleKind.FULL_SYNC:
            return 1.0
        if self.kind is ScheduleKind.ROUND_ROBIN:
            return 1.0 / self.n
        return min(self.p_update)


@dataclass(frozen=True)
class ScheduleState:
    policy: SchedulePolicy
    iteration: int = 0
    last_update: tuple[int, ...] = ()
    rng_state: dict = field(default=None, compare=False, repr=False)

    @classmethod
    def start(cls, policy: SchedulePolicy) -> "ScheduleState":
        return cls(
            policy,
            0,
            (NEVER,) * policy.n,
            make_rng(policy.seed).bit_generator.state,
        )


def _draw(policy: SchedulePolicy, k: int, last: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    kind = policy.kind
    if kind is ScheduleKind.FULL_SYNC:
        return np.ones(policy.n, dtype=bool)
    if kind is ScheduleKind.ROUND_ROBIN:
        mask = np.zeros(policy.n, dtype=bool)
        mask[k % policy.n] = True
        return mask
    mask = rng.random(policy.n) < np.asarray(policy.p_update)
    if kind is ScheduleKind.BOUNDED_DELAY_REPAIR:
        # idle streak k - last - 1 has reached T - 1: this is the last chance
        mask |= (k - last) >= policy.T
    return mask


def next_activation(state: ScheduleState) -> tuple[np.ndarray, ScheduleState]:
    """Draw the mask for ``state.iteration`` and return it with the successor state.

    ``state`` itself is never modified.
    """
    policy = state.policy
    rng = np.random.Generator(np.random.Philox(key=0))
    rng.bit_generator.state = state.rng_state
    last = np.array(state.last_update, dtype=np.int64)
    mask = _draw(policy, state.iteration, last, rng)
    last[mask] = state.iteration
    new_state = replace(
        state,
        iteration=state.iteration + 1,
        last_update=tuple(int(v) for v in last),
        rng_state=rng.bit_generator.state,
    )
    return mask, new_state


def iter_activations(state: ScheduleState) -> Iterator[np.ndarray]:
    """Endless stream of masks, identical to repeated ``next_activation`` calls
    but without copying generator state at every step."""
    policy = state.policy
    rng = np.random.Generator(np.random.Philox(key=0))
    rng.bit_generator.state = state.rng_state
    last = np.array(state.last_update, dtype=np.int64)
    k = state.iteration
    while True:
        mask = _draw(policy, k, last, rng)
        last[mask] = k
        k += 1
        yield mask


def activations(policy: SchedulePolicy, count: int) -> np.ndarray:
    """The first ``count`` masks of ``policy`` as a (count, n) boolean array."""
    out = np.empty((count, policy.n), dtype=bool)
    stream = iter_activations(ScheduleState.start(policy))
    for k in range(count):
        out[k] = next(stream)
    return out


@dataclass(frozen=True)
class CoverageResult:
    satisfied: bool
    violations: list[tuple[int, int]]  # (window_start, node_index)

    def __bool__(self) -> bool:
        return self.satisfied


def verify_window_coverage(masks: Sequence, T: int) -> CoverageResult:
    """Check that every node is active at least once in every window of T
    consecutive masks."""
    if T < 1:
        raise ValueError("T must be >= 1")
    rows = [np.asarray(m, dtype=bool) for m in masks]
    if len({r.shape for r in rows}) > 1:
        raise LengthMismatch("masks disagree on the number of nodes")
    if len(rows) < T:
        raise ValueError(f"need at least T = {T} masks, got {len(rows)}")
    M = np.array(rows, dtype=np.int64)
    # windowed activation counts via cumulative sums
    csum = np.vstack([np.zeros((1, M.shape[1]), dtype=np.int64), np.cumsum(M, axis=0)])
    counts = csum[T:] - csum[:-T]
    starts, nodes = np.nonzero(counts == 0)
    violations = [(int(s), int(i)) for s, i in zip(starts, nodes)]
    return CoverageResult(not violations, violations)


def mask_string(mask) -> str:
    """n-character 0/1 string, node 0 leftmost."""
    return "".join("1" if a else "0" for a in np.asarray(mask, dtype=bool))
