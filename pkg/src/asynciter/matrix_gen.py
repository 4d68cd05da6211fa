"""Random test systems (F, D) with a prescribed spectral radius."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDraw, DimensionMismatch
from .linalg import as_matrix, as_vector, spectral_radius
from .rng import make_rng

MAX_REDRAWS = 8


class SignConvention(str, enum.Enum):
    """Whether an update computes D + F P (PLUS) or D - F P (MINUS)."""

    PLUS = "PLUS"
    MINUS = "MINUS"

    @property
    def factor(self) -> float:
        return 1.0 if self is SignConvention.PLUS else -1.0


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """One linear iterative system: interference matrix F, offsets D."""

    F: np.ndarray
    D: np.ndarray
    sign_convention: SignConvention = SignConvention.PLUS

    def __post_init__(self):
        F = as_matrix(self.F)
        D = as_vector(self.D)
        if D.size != F.shape[0]:
            raise DimensionMismatch(f"F is {F.shape[0]}x{F.shape[0]} but D has length {D.size}")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "sign_convention", SignConvention(self.sign_convention))

    @property
    def n(self) -> int:
        return self.D.size

    def same_as(self, other: "SystemSpec") -> bool:
        """Bit-for-bit equality of F, D and sign convention."""
        return (
            self.sign_convention is other.sign_convention
            and np.array_equal(self.F, other.F)
            and np.array_equal(self.D, other.D)
        )


def generate_system(
    n: int,
    target_rho: float,
    zero_diagonal: bool = False,
    seed: int = 0,
    sign_convention: SignConvention = SignConvention.PLUS,
) -> SystemSpec:
    """Draw F uniform on [-1, 1] (optionally with zero diagonal) and rescale
    it to spectral radius ``target_rho``; draw D uniform on [0, 1].

    F is drawn first, then D, from a single Philox stream keyed by ``seed``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= target_rho < 1.0:
        raise ValueError("target_rho must be in [0, 1)")
    rng = make_rng(seed)

    if target_rho == 0.0:
        F = np.zeros((n, n))
    else:
        for _ in range(MAX_REDRAWS):
            F = rng.uniform(-1.0, 1.0, size=(n, n))
            if zero_diagonal:
                np.fill_diagonal(F, 0.0)
            rho = spectral_radius(F).rho
            if rho >= 1e-12:
                break
        else:
            raise DegenerateDraw(f"{MAX_REDRAWS} draws of a {n}x{n} matrix all had spectral radius ~ 0")
        F = F * (target_rho / rho)
        if zero_diagonal:
            np.fill_diagonal(F, 0.0)  # scaling keeps zeros, but guard against -0.0

    D = rng.uniform(0.0, 1.0, size=n)
    return SystemSpec(F, D, SignConvention(sign_convention))
