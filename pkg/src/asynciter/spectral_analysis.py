"""Effective asynchronous matrices and window-product certification.

With activation mask A(k), the asynchronous iteration is
P(k+1) = A(k) D + F(k) P(k), where F(k) = A(k) F + (I - A(k)) keeps the
rows of F for active nodes and identity rows for idle ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .activation import verify_window_coverage
from .errors import DimensionMismatch, LengthMismatch, NoIdleNode
from .linalg import SpectralEstimate, as_matrix, spectral_radius


def effective_matrix(F, mask) -> np.ndarray:
    F = as_matrix(F)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (F.shape[0],):
        raise DimensionMismatch(f"mask has shape {mask.shape}, F is {F.shape[0]}x{F.shape[0]}")
    return np.where(mask[:, None], F, np.eye(F.shape[0]))


@dataclass(frozen=True)
class IdleRowReport:
    has_unit_left_eigenvector: bool
    rho_estimate: float


def idle_row_eigen_check(F_k, mask) -> IdleRowReport:
    """Confirm that every idle node's row of F(k) is its unit basis row.

    That makes e_i a left eigenvector with eigenvalue exactly 1, so
    rho(F(k)) >= 1.  Whether rho(F(k)) is exactly 1 depends on the rest of
    the matrix; the estimate is reported for that comparison.
    """
    F_k = as_matrix(F_k)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (F_k.shape[0],):
        raise DimensionMismatch(f"mask has shape {mask.shape}, F_k is {F_k.shape[0]}x{F_k.shape[0]}")
    idle = np.flatnonzero(~mask)
    if idle.size == 0:
        raise NoIdleNode("every node is active in this mask")
    eye = np.eye(F_k.shape[0])
    unit = all(np.array_equal(F_k[i], eye[i]) for i in idle)
    return IdleRowReport(unit, spectral_radius(F_k).rho)


@dataclass
class WindowProductReport:
    window_start: int
    window_length: int
    product: np.ndarray
    estimate: SpectralEstimate
    coverage_satisfied: bool

    def to_dict(self) -> dict:
        n = self.product.shape[0]
        return {
            "window_start": self.window_start,
            "window_length": self.window_length,
            "product": {"n": n, "entries": [float(v) for v in self.product.ravel()]},
            "estimate": self.estimate.to_dict(),
            "coverage_satisfied": self.coverage_satisfied,
        }


def window_product(F, masks: Sequence) -> np.ndarray:
    """F(t_T) ... F(t_2) F(t_1) for masks given in time order (latest leftmost)."""
    F = as_matrix(F)
    product = np.eye(F.shape[0])
    for mask in masks:
        product = effective_matrix(F, mask) @ product
    return product


def window_product_radius(F, masks: Sequence, window_start: int = 0) -> WindowProductReport:
    """Spectral radius and contraction certificate of one window product."""
    F = as_matrix(F)
    rows = [np.asarray(m, dtype=bool) for m in masks]
    if not rows:
        raise ValueError("need at least one mask")
    if len({r.shape for r in rows}) > 1:
        raise LengthMismatch("masks disagree on the number of nodes")
    product = window_product(F, rows)
    coverage = verify_window_coverage(rows, len(rows))
    return WindowProductReport(
        window_start=window_start,
        window_length=len(rows),
        product=product,
        estimate=spectral_radius(product),
        coverage_satisfied=coverage.satisfied,
    )


def disjoint_windows(F, masks, T: int) -> list[WindowProductReport]:
    """Reports for every complete disjoint T-window of a mask sequence."""
    masks = np.asarray(masks, dtype=bool)
    return [
        window_product_radius(F, masks[s:s + T], window_start=s)
        for s in range(0, len(masks) - T + 1, T)
    ]
