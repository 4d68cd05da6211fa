"""Theoretical convergence-rate formulas and empirical rate fitting.

With gamma the smallest per-iteration update probability of any node, the
probability that all n independent nodes update at least once in a window
of T iterations is at least

    lambda = (1 - (1 - gamma)^T)^n,

and the rate is R = rho(F) * lambda / T, or R = rho(F) / T when every node
is certain to update within each window.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, InsufficientData, NonPositiveError

TAIL_FLOOR = 1e-14
MIN_FIT_POINTS = 10


class RateMode(str, enum.Enum):
    PROBABILISTIC = "PROBABILISTIC"
    DETERMINISTIC = "DETERMINISTIC"


@dataclass
class RateReport:
    gamma: float
    T: int
    n: int
    rho_F: float
    lambda_lower_bound: float
    theoretical_rate: float
    deterministic_rate: float
    mode: RateMode = RateMode.PROBABILISTIC
    empirical_contraction: float | None = None
    empirical_window_contraction: float | None = None  # contraction ** T
    fit_r_squared: float | None = None
    realized_update_frequency: float | None = None  # min over nodes

    @property
    def rate(self) -> float:
        """The rate selected by ``mode``."""
        if self.mode is RateMode.DETERMINISTIC:
            return self.deterministic_rate
        return self.theoretical_rate

    def with_fit(self, contraction: float, r_squared: float) -> "RateReport":
        self.empirical_contraction = contraction
        self.empirical_window_contraction = contraction**self.T
        self.fit_r_squared = r_squared
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        return d


def _check_gamma(gamma: float) -> None:
    if not 0.0 < gamma <= 1.0:
        raise DomainError(f"gamma must be in (0, 1], got {gamma}")


def coverage_probability_bound(gamma: float, T: int, n: int) -> float:
    """(1 - (1 - gamma)^T)^n, stable for small gamma."""
    _check_gamma(gamma)
    if T < 1 or n < 1:
        raise DomainError("T and n must be positive")
    one_window = -math.expm1(T * math.log1p(-gamma)) if gamma < 1.0 else 1.0
    return one_window**n


def theoretical_rate(
    rho_F: float,
    gamma: float,
    T: int,
    n: int,
    mode: RateMode = RateMode.PROBABILISTIC,
) -> RateReport:
    if rho_F < 0:
        raise DomainError("rho_F must be nonnegative")
    lam = coverage_probability_bound(gamma, T, n)
    return RateReport(
        gamma=gamma,
        T=T,
        n=n,
        rho_F=rho_F,
        lambda_lower_bound=lam,
        theoretical_rate=rho_F * lam / T,
        deterministic_rate=rho_F / T,
        mode=RateMode(mode),
    )


def fit_empirical_rate(error_norms: Sequence[float], burn_in: int | None = None) -> tuple[float, float]:
    """Fit log(error) ~ a + b k by least squares and return (exp(b), R^2).

    ``burn_in`` entries are dropped from the front (default: 10% of the
    sequence), and the trailing run of entries below 1e-14 is dropped from
    the back.
    """
    e = np.asarray(error_norms, dtype=float)
    if burn_in is None:
        burn_in = e.size // 10
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")

    end = e.size
    while end > 0 and e[end - 1] < TAIL_FLOOR:
        end -= 1
    head = e[:end]
    if np.any(head <= 0):
        k = int(np.flatnonzero(head <= 0)[0])
        raise NonPositiveError(f"error_norms[{k}] = {head[k]} is not positive")
    y = np.log(head[burn_in:])
    if y.size < MIN_FIT_POINTS:
        raise InsufficientData(f"{y.size} points left after burn-in and tail truncation, need {MIN_FIT_POINTS}")

    k = np.arange(y.size, dtype=float)
    kc = k - k.mean()
    yc = y - y.mean()
    slope = float(kc @ yc / (kc @ kc))
    ss_tot = float(yc @ yc)
    ss_res = float(np.sum((yc - slope * kc) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return math.exp(slope), r_squared
