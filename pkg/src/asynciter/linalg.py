"""Dense real linear algebra: linear solves and spectral radius estimates.

Matrices and vectors are plain float64 numpy arrays.  The spectral radius
is estimated with the Gelfand formula rho(Q) = lim ||Q^k||^(1/k), evaluated
at k = 2^m by repeated squaring, using the Frobenius norm.  Because
rho(Q) <= ||Q^k||_F^(1/k) holds for every k, a value below one at any k is
a sound certificate that Q is contractive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DimensionMismatch, NonFiniteEntries, NotSquare, SingularMatrix

PIVOT_TOL = 1e-12
CERTIFY_MARGIN = 1e-12
MAX_SQUARINGS = 48
RHO_REL_TOL = 1e-8
_LOG_CERT_THRESHOLD = math.log1p(-CERTIFY_MARGIN)


@dataclass(frozen=True)
class SpectralEstimate:
    rho: float
    certified_below_one: bool
    certificate_exponent: int = 0  # the power k = 2^m that certified, 0 if none

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be nonnegative")
        if self.certified_below_one and self.certificate_exponent < 1:
            raise ValueError("a certified estimate needs certificate_exponent >= 1")

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "certified_below_one": self.certified_below_one,
            "certificate_exponent": self.certificate_exponent,
        }


def as_matrix(Q, *, square: bool = True) -> np.ndarray:
    """Validate and convert ``Q`` to a finite 2-D float64 array."""
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] < 1 or Q.shape[1] < 1:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {Q.shape}")
    if square and Q.shape[0] != Q.shape[1]:
        raise NotSquare(f"matrix must be square, got shape {Q.shape}")
    if not np.all(np.isfinite(Q)):
        raise NonFiniteEntries("matrix has NaN or infinite entries")
    return Q


def as_vector(x, n: int | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise DimensionMismatch(f"expected a non-empty 1-D vector, got shape {x.shape}")
    if n is not None and x.size != n:
        raise DimensionMismatch(f"expected a vector of length {n}, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteEntries("vector has NaN or infinite entries")
    return x


def solve_linear(M, b) -> np.ndarray:
    """Solve ``M x = b`` by Gaussian elimination with partial (row) pivoting.

    Raises SingularMatrix when a pivot falls below ``PIVOT_TOL`` in magnitude.
    """
    A = as_matrix(M).copy()
    n = A.shape[0]
    x = as_vector(b, n).copy()

    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if abs(A[p, k]) < PIVOT_TOL:
            raise SingularMatrix(f"pivot {k} has magnitude {abs(A[p, k]):.3g} < {PIVOT_TOL}")
        if p != k:
            A[[k, p]] = A[[p, k]]
            x[[k, p]] = x[[p, k]]
        factors = A[k + 1:, k] / A[k, k]
        A[k + 1:, k:] -= np.outer(factors, A[k, k:])
        x[k + 1:] -= factors * x[k]

    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - A[k, k + 1:] @ x[k + 1:]) / A[k, k]
    return x


def _log_norms(Q: np.ndarray, max_m: int) -> Iterator[tuple[int, float]]:
    """Yield ``(m, log ||Q^(2^m)||_F)`` for m = 0, 1, ..., max_m.

    The running power is kept normalised to unit norm and its log scale is
    accumulated separately, so neither overflow nor underflow can occur.
    Stops early (after yielding -inf) once the power is exactly zero.
    """
    scale = float(np.max(np.abs(Q)))
    if scale == 0.0:
        yield 0, -math.inf
        return
    S = Q / scale
    nrm = float(np.linalg.norm(S))
    S = S / nrm
    log_norm = math.log(scale) + math.log(nrm)
    yield 0, log_norm
    for m in range(1, max_m + 1):
        S = S @ S
        nrm = float(np.linalg.norm(S))
        if nrm == 0.0 or not math.isfinite(nrm):
            # exact nilpotency (a non-finite norm cannot arise from a unit-norm square)
            yield m, -math.inf
            return
        S = S / nrm
        log_norm = 2.0 * log_norm + math.log(nrm)
        yield m, log_norm


def certify_contractive(Q, max_exponent: int = MAX_SQUARINGS) -> SpectralEstimate:
    """Try to prove rho(Q) < 1 via ||Q^(2^m)||_F^(1/2^m) < 1 - 1e-12, m <= max_exponent.

    Never returns a false positive; may fail to certify when rho(Q) is
    extremely close to one.  ``rho`` in the result is the tightest Gelfand
    upper bound seen.
    """
    Q = as_matrix(Q)
    if not 1 <= max_exponent <= 64:
        raise ValueError("max_exponent must be in [1, 64]")
    best = math.inf
    for m, log_norm in _log_norms(Q, max_exponent):
        log_root = log_norm / 2**m
        best = min(best, log_root)
        if log_root < _LOG_CERT_THRESHOLD:
            return SpectralEstimate(math.exp(best), True, 2**m)
    return SpectralEstimate(math.exp(best), False, 0)


def spectral_radius(Q) -> SpectralEstimate:
    """Estimate the spectral radius of ``Q`` by Gelfand repeated squaring.

    Squaring stops once consecutive roots agree to a relative 1e-8 or after
    48 squarings.  The returned ``rho`` is the Richardson-extrapolated
    value (log ||Q^(2^(m+1))|| - log ||Q^(2^m)||) / 2^m, which cancels the
    leading 1/2^m error term of the raw roots, capped by the smallest raw
    root (each of which is a rigorous upper bound).
    """
    Q = as_matrix(Q)
    logs: list[float] = []
    best_root = math.inf
    cert_exponent = 0
    gen = _log_norms(Q, MAX_SQUARINGS)
    for m, log_norm in gen:
        if log_norm == -math.inf:
            return SpectralEstimate(0.0, True, cert_exponent or 2**m)
        logs.append(log_norm)
        log_root = log_norm / 2**m
        best_root = min(best_root, log_root)
        if not cert_exponent and log_root < _LOG_CERT_THRESHOLD:
            cert_exponent = 2**m
        if m > 0:
            root, old = math.exp(log_root), math.exp(logs[-2] / 2 ** (m - 1))
            if abs(root - old) <= RHO_REL_TOL * max(old, 1e-30):
                break
    if len(logs) > 1:
        rho = min((logs[-1] - logs[-2]) / 2 ** (len(logs) - 2), best_root)
    else:
        rho = best_root

    if not cert_exponent and rho < 0.0:
        # converged below one but not yet certified: keep squaring for the certificate only
        for m, log_norm in gen:
            if log_norm == -math.inf or log_norm / 2**m < _LOG_CERT_THRESHOLD:
                cert_exponent = 2**m
                break
    return SpectralEstimate(math.exp(rho), bool(cert_exponent), cert_exponent)


def inf_norm(x) -> float:
    return float(np.max(np.abs(x)))
